#!/usr/bin/env python3
"""Regenerate the bundled mini corpus under data/minicorpus/.

The corpus is fully deterministic (fixed seed, fixed templates): ~100 short
documents over six topics, a lexicon for the closed-class and adjective
vocabulary, six queries, and binary relevance judgments derived from topic
membership.  Run from the repository root:

    python3 tools/make_minicorpus.py
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "minicorpus"

LEXICON = {
    # closed classes
    "the": "Determiner", "a": "Determiner", "an": "Determiner",
    "of": "Preposition", "in": "Preposition", "on": "Preposition",
    "for": "Preposition", "with": "Preposition", "at": "Preposition",
    "from": "Preposition", "near": "Preposition", "under": "Preposition",
    # verbs and connectives, kept out of NPs
    "improves": "Other", "requires": "Other", "shows": "Other",
    "uses": "Other", "runs": "Other", "sells": "Other", "stores": "Other",
    "handles": "Other", "moves": "Other", "feeds": "Other", "is": "Other",
    "and": "Other", "also": "Other", "reports": "Other", "measures": "Other",
    # adjectives
    "cold": "Adjective", "hot": "Adjective", "new": "Adjective",
    "large": "Adjective", "small": "Adjective", "busy": "Adjective",
    "local": "Adjective", "solar": "Adjective", "annual": "Adjective",
    "fresh": "Adjective", "open": "Adjective", "main": "Adjective",
    "junior": "Adjective", "stainless": "Adjective",
    # adverbs
    "very": "Adverb", "fully": "Adverb",
}

# Topic -> (noun phrases that mark relevance, filler noun phrases)
TOPICS = {
    "steel": {
        "core": [
            "cold rolled steel strip", "surface quality", "steel strip",
            "rolling mill", "annealing furnace", "strip surface",
        ],
        "fill": [
            "coil storage", "steel plant", "strip thickness", "mill crew",
            "quality of surface of cold rolled steel strip",
        ],
    },
    "software": {
        "core": [
            "operating system", "memory manager", "data base",
            "query language", "system kernel",
        ],
        "fill": [
            "source code", "test suite", "release schedule",
            "design of the memory manager of the operating system",
        ],
    },
    "food": {
        "core": [
            "hot dog", "hot dog stand", "street vendor", "lunch crowd",
        ],
        "fill": [
            "fresh bread", "corner market", "food cart", "busy sidewalk",
        ],
    },
    "shipping": {
        "core": [
            "container terminal", "cargo vessel", "harbor crane",
            "shipping lane",
        ],
        "fill": [
            "dock worker", "customs office", "port authority",
            "freight in storage near docks",
        ],
    },
    "energy": {
        "core": [
            "solar panel array", "power grid", "battery storage",
            "panel array",
        ],
        "fill": [
            "control room", "voltage meter", "maintenance crew",
            "annual output report",
        ],
    },
    "college": {
        "core": [
            "junior college", "campus library", "evening class",
        ],
        "fill": [
            "college junior", "student council", "main hall",
            "tuition budget",
        ],
    },
}

VERBS = ["improves", "requires", "shows", "uses", "runs", "sells",
         "stores", "handles", "moves", "feeds", "reports", "measures"]
PREPS = ["of", "in", "on", "for", "with", "near"]

QUERIES = [
    ("q1", "cold rolled steel strip", "steel"),
    ("q2", "surface quality of steel strip", "steel"),
    ("q3", "operating system memory manager", "software"),
    ("q4", "hot dog stand", "food"),
    ("q5", "cargo vessel at container terminal", "shipping"),
    ("q6", "solar panel array power grid", "energy"),
]

DOCS_PER_TOPIC = 17


def sentence(rng, topic, noise_topic=None):
    spec = TOPICS[topic]
    nps = spec["core"] + spec["fill"]
    np1 = rng.choice(spec["core"])
    np2 = rng.choice(nps)
    # Occasional vocabulary bleed from another topic keeps ranking honest.
    if noise_topic is not None:
        np2 = rng.choice(TOPICS[noise_topic]["core"])
    verb = rng.choice(VERBS)
    if rng.random() < 0.5:
        prep = rng.choice(PREPS)
        np3 = rng.choice(nps)
        return f"The {np1} {verb} the {np2} {prep} the {np3}."
    return f"The {np1} {verb} a {np2}."


def main():
    rng = random.Random(173)
    OUT.mkdir(parents=True, exist_ok=True)

    docs = []
    qrels = []
    doc_no = 0
    topic_names = list(TOPICS)
    for topic in topic_names:
        for _ in range(DOCS_PER_TOPIC):
            doc_no += 1
            doc_id = f"{topic[:4]}{doc_no:03d}"
            n_sentences = rng.randint(2, 4)
            parts = []
            for _ in range(n_sentences):
                noise = None
                if rng.random() < 0.3:
                    noise = rng.choice([t for t in topic_names if t != topic])
                parts.append(sentence(rng, topic, noise))
            docs.append({"id": doc_id, "text": " ".join(parts)})
            for query_id, _, query_topic in QUERIES:
                if query_topic == topic:
                    qrels.append((query_id, doc_id))

    with open(OUT / "docs.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, sort_keys=True) + "\n")

    with open(OUT / "lexicon.tsv", "w", encoding="utf-8") as fh:
        fh.write("# lemma<TAB>category\n")
        for lemma in sorted(LEXICON):
            fh.write(f"{lemma}\t{LEXICON[lemma]}\n")

    with open(OUT / "queries.tsv", "w", encoding="utf-8") as fh:
        for query_id, text, _ in QUERIES:
            fh.write(f"{query_id}\t{text}\n")

    with open(OUT / "qrels.tsv", "w", encoding="utf-8") as fh:
        for query_id, doc_id in sorted(qrels):
            fh.write(f"{query_id}\t{doc_id}\n")

    print(f"wrote {len(docs)} docs, {len(QUERIES)} queries to {OUT}")


if __name__ == "__main__":
    main()

"""Tokenization, category tagging, and noun-phrase chunking.

Documents come in either as raw text plus a small lexicon, or pre-tagged as
(surface, tag) pairs.  Tagging is deliberately shallow: a lexicon lookup,
two suffix rules, and a noun default for unknown words.  Chunking matches a
closed tag pattern and produces simplex NPs (premodifier sequences ending in
a head noun) and complex NPs (simplex NPs joined by single prepositions).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

NOUN = "Noun"
ADJECTIVE = "Adjective"
ADVERB = "Adverb"
PAST_PARTICIPLE = "PastParticiple"
PROGRESSIVE_VERB = "ProgressiveVerb"
DETERMINER = "Determiner"
PREPOSITION = "Preposition"
OTHER = "Other"

CATEGORIES = frozenset({
    NOUN, ADJECTIVE, ADVERB, PAST_PARTICIPLE, PROGRESSIVE_VERB,
    DETERMINER, PREPOSITION, OTHER,
})

# Category assigned to multiword units promoted to single-word status.
# Not a token tag; it only appears on grouped units during parsing.
LEXATOM = "LexAtom"

# Categories allowed before the head noun of a simplex NP.
PREMOD_CATEGORIES = frozenset({
    ADVERB, ADJECTIVE, PAST_PARTICIPLE, PROGRESSIVE_VERB, NOUN,
})


class CorpusFormatError(ValueError):
    """Raised for malformed documents, lexicons, or tag names."""


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    category: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.lemma, self.category)


@dataclass
class Document:
    """One input record: raw text or a pre-tagged token list, never both."""

    id: str
    text: str | None = None
    tokens: list[tuple[str, str]] | None = None


@dataclass(eq=False)
class SimplexNP:
    """A determiner-stripped premodifier sequence ending in a head noun.

    ``position`` is the token offset of the first unit; ``span`` covers the
    full matched token range including any leading determiners.
    """

    doc_id: str
    position: int
    units: list[TaggedToken]
    span: tuple[int, int] = (0, 0)

    def lemmas(self) -> tuple[str, ...]:
        return tuple(u.lemma for u in self.units)


@dataclass(eq=False)
class ComplexNP:
    doc_id: str
    segments: list[SimplexNP]
    connectors: list[str]


# Words keep internal apostrophes ("wilson's" stays one token); hyphenated
# forms are matched whole and split afterwards; anything else is a
# single-character punctuation token.
_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*|\S")


def tokenize(text: str) -> list[str]:
    """Split raw text into word and punctuation tokens, breaking on hyphens."""
    out: list[str] = []
    for match in _TOKEN_RE.finditer(text):
        tok = match.group()
        if len(tok) == 1 and not tok.isalnum():
            out.append(tok)
            continue
        out.extend(part for part in tok.split("-") if part)
    return out


def tag_tokens(text: str, lexicon: dict[str, str]) -> list[TaggedToken]:
    """Tag raw text. Total: every token gets exactly one category.

    Lookup order: lexicon, then the -ed/-ing suffix rules, then the noun
    default for unknown words.  Tokens without any alphanumeric character
    are tagged Other so that punctuation breaks NP chunks.
    """
    tagged = []
    for surface in tokenize(text):
        lemma = surface.lower()
        category = lexicon.get(lemma)
        if category is None:
            if not any(c.isalnum() for c in lemma):
                category = OTHER
            elif lemma.endswith("ed"):
                category = PAST_PARTICIPLE
            elif lemma.endswith("ing"):
                category = PROGRESSIVE_VERB
            else:
                category = NOUN
        tagged.append(TaggedToken(surface, lemma, category))
    return tagged


def tag_pretokenized(pairs: list[tuple[str, str]] | list[list[str]]) -> list[TaggedToken]:
    """Convert (surface, tag) pairs, validating tags against the closed set."""
    tagged = []
    for surface, tag in pairs:
        if tag not in CATEGORIES:
            raise CorpusFormatError(f"unknown tag {tag!r} for token {surface!r}")
        tagged.append(TaggedToken(surface, surface.lower(), tag))
    return tagged


def doc_tokens(doc: Document, lexicon: dict[str, str]) -> list[TaggedToken]:
    if doc.tokens is not None:
        return tag_pretokenized(doc.tokens)
    return tag_tokens(doc.text or "", lexicon)


def chunk_simplex(tokens: list[TaggedToken], doc_id: str = "") -> list[SimplexNP]:
    """Extract maximal simplex NPs: Det* (Adv|Adj|PastPart|ProgVerb|Noun)* Noun.

    Determiners are dropped from the units.  Tokens consumed by a failed
    match are never reconsidered; every token belongs to at most one NP.
    """
    nps = []
    i, n = 0, len(tokens)
    while i < n:
        j = i
        while j < n and tokens[j].category == DETERMINER:
            j += 1
        k, last_noun = j, -1
        while k < n and tokens[k].category in PREMOD_CATEGORIES:
            if tokens[k].category == NOUN:
                last_noun = k
            k += 1
        if last_noun >= 0:
            nps.append(SimplexNP(
                doc_id=doc_id,
                position=j,
                units=list(tokens[j:last_noun + 1]),
                span=(i, last_noun + 1),
            ))
            i = last_noun + 1
        elif k == i:
            i += 1
        else:
            # A run without a noun cannot yield an NP, but the breaking
            # token may start one (e.g. a determiner).
            i = k
    return nps


def chunk_complex(tokens: list[TaggedToken], simplexes: list[SimplexNP]) -> list[ComplexNP]:
    """Join simplex NPs separated by exactly one preposition token."""
    out = []
    i = 0
    while i < len(simplexes):
        segments = [simplexes[i]]
        connectors: list[str] = []
        j = i
        while j + 1 < len(simplexes):
            gap = simplexes[j].span[1]
            nxt = simplexes[j + 1].span[0]
            if nxt - gap == 1 and tokens[gap].category == PREPOSITION:
                connectors.append(tokens[gap].lemma)
                segments.append(simplexes[j + 1])
                j += 1
            else:
                break
        if len(segments) >= 2:
            out.append(ComplexNP(simplexes[i].doc_id, segments, connectors))
        i = j + 1
    return out


def load_lexicon(path) -> dict[str, str]:
    """Read a tab-separated ``lemma<TAB>category`` file; ``#`` lines ignored."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusFormatError(f"{path}:{lineno}: expected lemma<TAB>category")
            lemma, category = parts
            if category not in CATEGORIES:
                raise CorpusFormatError(f"{path}:{lineno}: unknown category {category!r}")
            lexicon[lemma.lower()] = category
    return lexicon


def read_documents(path) -> list[Document]:
    """Read one JSON document per line with "id" and "text" or "tokens"."""
    docs = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            doc_id = record.get("id")
            if not doc_id:
                raise CorpusFormatError(f"{path}:{lineno}: missing document id")
            if doc_id in seen:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            has_text = "text" in record
            has_tokens = "tokens" in record
            if has_text == has_tokens:
                raise CorpusFormatError(
                    f"{path}:{lineno}: document {doc_id!r} needs exactly one of text/tokens")
            if has_text:
                docs.append(Document(id=doc_id, text=record["text"]))
            else:
                tokens = [(s, t) for s, t in record["tokens"]]
                docs.append(Document(id=doc_id, tokens=tokens))
    return docs

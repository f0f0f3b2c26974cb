"""End-to-end orchestration and on-disk stage artifacts.

Each stage reads the artifacts of the stage before it, does one unit of
work, and writes deterministic files into the output directory.  Every
artifact carries the hash of the algorithmic configuration that produced
it; a stage refuses to consume an artifact written under a different
configuration.
"""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field

from . import compounds as comp
from . import retrieval
from .atoms import detect_atoms, format_atom_line, read_atom_pairs
from .config import PipelineConfig
from .ingest import (
    ComplexNP,
    Document,
    SimplexNP,
    TaggedToken,
    chunk_complex,
    chunk_simplex,
    doc_tokens,
    load_lexicon,
    read_documents,
    tag_tokens,
)
from .parser import ParseNode, ParseResult, parse_corpus, parse_single_np
from .retrieval import InvertedIndex, RankedList
from .stats import StatTable

log = logging.getLogger(__name__)

CHUNKED_MAGIC = "npindex-chunked"
TREES_MAGIC = "npindex-trees"
ARTIFACT_VERSION = 1

CHUNKED_FILE = "chunked.jsonl"
STATS_FILE = "stats.jsonl"
ATOMS_FILE = "atoms.tsv"
PARSES_FILE = "parses.txt"
TREES_FILE = "trees.jsonl"
FINAL_ATOMS_FILE = "atoms_final.tsv"
COMPOUNDS_FILE = "compounds.tsv"
INDEX_FILE = "index.jsonl"
RUN_FILE = "run.txt"
REPORT_FILE = "eval.txt"
METRICS_FILE = "eval_metrics.tsv"
MANIFEST_FILE = "manifest.json"


class MissingArtifactError(FileNotFoundError):
    def __init__(self, path):
        self.artifact = str(path)
        super().__init__(f"missing artifact: {path}")


class ArtifactMismatchError(RuntimeError):
    def __init__(self, path, expected: str, found: str | None):
        super().__init__(
            f"artifact {path} was written under config hash {found!r}, "
            f"current config hash is {expected!r}; re-run the earlier stage")


@dataclass
class ChunkedDoc:
    doc_id: str
    simplexes: list[SimplexNP]
    complexes: list[ComplexNP]


@dataclass
class ChunkedCorpus:
    docs: list[ChunkedDoc]

    def all_simplexes(self) -> list[SimplexNP]:
        return [np for doc in self.docs for np in doc.simplexes]

    def np_inventory(self) -> set[tuple[str, ...]]:
        return comp.build_np_inventory(self.all_simplexes())


@dataclass
class PipelineArtifacts:
    """Everything the in-memory pipeline produces, stage by stage."""

    chunked: ChunkedCorpus | None = None
    parse: ParseResult | None = None
    doc_terms: dict[str, Counter] = field(default_factory=dict)
    index: InvertedIndex | None = None
    runs: list[RankedList] = field(default_factory=list)
    per_query: dict[str, retrieval.EvalReport] = field(default_factory=dict)
    mean: retrieval.EvalReport | None = None


# -- in-memory stages ----------------------------------------------------------


def chunk_corpus(documents: list[Document], lexicon: dict[str, str]) -> ChunkedCorpus:
    docs = []
    for document in documents:
        tokens = doc_tokens(document, lexicon)
        simplexes = chunk_simplex(tokens, doc_id=document.id)
        complexes = chunk_complex(tokens, simplexes)
        docs.append(ChunkedDoc(document.id, simplexes, complexes))
    return ChunkedCorpus(docs)


def corpus_doc_terms(chunked: ChunkedCorpus, parse: ParseResult,
                     config: PipelineConfig) -> dict[str, Counter]:
    inventory = chunked.np_inventory()
    substrings = None
    if config.attest_substrings:
        substrings = comp.build_substring_inventory(chunked.all_simplexes())
    terms = {}
    for doc in chunked.docs:
        terms[doc.doc_id] = comp.index_terms(
            doc.simplexes, doc.complexes, parse.trees, inventory, substrings)
    return terms


def process_query(text: str, lexicon: dict[str, str], word_table: StatTable,
                  atom_inventory, np_inventory, config: PipelineConfig,
                  substring_inventory=None) -> Counter:
    """Query text through the document pipeline, yielding its term multiset.

    Queries are parsed against the corpus word statistics and atom
    inventory; candidate compounds are attested against the document-side
    NP inventory (unless disabled by ``query_attest``).
    """
    tokens = tag_tokens(text, lexicon)
    simplexes = chunk_simplex(tokens, doc_id="__query__")
    complexes = chunk_complex(tokens, simplexes)
    trees = {
        np: parse_single_np(np.units, word_table, config, atom_inventory)
        for np in simplexes
    }
    inventory = np_inventory if config.query_attest else None
    substrings = substring_inventory if config.query_attest else None
    return comp.index_terms(simplexes, complexes, trees, inventory, substrings)


def search_queries(queries: list[tuple[str, str]], index: InvertedIndex,
                   lexicon: dict[str, str], word_table: StatTable,
                   atom_inventory, np_inventory,
                   config: PipelineConfig) -> list[RankedList]:
    runs = []
    for query_id, text in queries:
        counts = process_query(
            text, lexicon, word_table, atom_inventory, np_inventory, config)
        vector = retrieval.query_vector(counts, index)
        ranked = retrieval.search(
            vector, index, limit=config.search_limit, query_id=query_id)
        runs.append(ranked)
    return runs


# -- artifact serialization -----------------------------------------------------


def _require(path) -> str:
    if not os.path.exists(path):
        raise MissingArtifactError(path)
    return path


def _check_hash(path, header_hash: str | None, config: PipelineConfig) -> None:
    expected = config.config_hash()
    if header_hash != expected:
        raise ArtifactMismatchError(path, expected, header_hash)


def _out(config: PipelineConfig, name: str) -> str:
    os.makedirs(config.output_dir, exist_ok=True)
    return os.path.join(config.output_dir, name)


def _update_manifest(config: PipelineConfig, stage: str) -> None:
    path = _out(config, MANIFEST_FILE)
    manifest = {}
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    manifest.setdefault("stages", {})[stage] = config.config_hash()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _manifest_hash(config: PipelineConfig, stage: str) -> str | None:
    path = os.path.join(config.output_dir, MANIFEST_FILE)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return manifest.get("stages", {}).get(stage)


def save_chunked(chunked: ChunkedCorpus, path, config: PipelineConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "format": CHUNKED_MAGIC, "version": ARTIFACT_VERSION,
            "config_hash": config.config_hash(),
        }, sort_keys=True) + "\n")
        for doc in chunked.docs:
            np_index = {id(np): i for i, np in enumerate(doc.simplexes)}
            record = {
                "id": doc.doc_id,
                "nps": [{
                    "position": np.position,
                    "span": list(np.span),
                    "units": [[u.surface, u.lemma, u.category] for u in np.units],
                } for np in doc.simplexes],
                "complex": [{
                    "segments": [np_index[id(seg)] for seg in cnp.segments],
                    "connectors": cnp.connectors,
                } for cnp in doc.complexes],
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def load_chunked(path, config: PipelineConfig | None = None) -> ChunkedCorpus:
    docs = []
    with open(_require(path), encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != CHUNKED_MAGIC:
            raise ValueError(f"{path}: not a chunked-corpus file")
        if config is not None:
            _check_hash(path, header.get("config_hash"), config)
        for line in fh:
            record = json.loads(line)
            simplexes = []
            for np_rec in record["nps"]:
                units = [TaggedToken(s, l, c) for s, l, c in np_rec["units"]]
                simplexes.append(SimplexNP(
                    doc_id=record["id"],
                    position=np_rec["position"],
                    units=units,
                    span=tuple(np_rec["span"]),
                ))
            complexes = [
                ComplexNP(
                    doc_id=record["id"],
                    segments=[simplexes[i] for i in c_rec["segments"]],
                    connectors=list(c_rec["connectors"]),
                ) for c_rec in record["complex"]
            ]
            docs.append(ChunkedDoc(record["id"], simplexes, complexes))
    return ChunkedCorpus(docs)


def _tree_to_json(node: ParseNode):
    if node.is_leaf:
        return {"w": [node.token.surface, node.token.lemma, node.token.category]}
    rec = {"l": _tree_to_json(node.left), "r": _tree_to_json(node.right)}
    if node.atom_flag:
        rec["a"] = True
    return rec


def _tree_from_json(rec) -> ParseNode:
    if "w" in rec:
        surface, lemma, category = rec["w"]
        return ParseNode.leaf(TaggedToken(surface, lemma, category))
    return ParseNode.group(
        _tree_from_json(rec["l"]), _tree_from_json(rec["r"]),
        atom_flag=rec.get("a", False))


def save_trees(chunked: ChunkedCorpus, parse: ParseResult, path,
               config: PipelineConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "format": TREES_MAGIC, "version": ARTIFACT_VERSION,
            "config_hash": config.config_hash(),
            "phases": parse.phases_run,
        }, sort_keys=True) + "\n")
        for doc in chunked.docs:
            fh.write(json.dumps({
                "id": doc.doc_id,
                "trees": [_tree_to_json(parse.trees[np]) for np in doc.simplexes],
            }, sort_keys=True) + "\n")


def load_trees(path, chunked: ChunkedCorpus,
               config: PipelineConfig | None = None) -> dict[SimplexNP, ParseNode]:
    by_doc = {doc.doc_id: doc for doc in chunked.docs}
    trees: dict[SimplexNP, ParseNode] = {}
    with open(_require(path), encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != TREES_MAGIC:
            raise ValueError(f"{path}: not a parse-trees file")
        if config is not None:
            _check_hash(path, header.get("config_hash"), config)
        for line in fh:
            record = json.loads(line)
            doc = by_doc[record["id"]]
            for np, tree_rec in zip(doc.simplexes, record["trees"]):
                trees[np] = _tree_from_json(tree_rec)
    return trees


def save_parse_dump(chunked: ChunkedCorpus, parse: ParseResult, path,
                    config: PipelineConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash: {config.config_hash()}\n")
        for doc in chunked.docs:
            for np in doc.simplexes:
                fh.write(f"{doc.doc_id}\t{np.position}\t{parse.trees[np].render()}\n")


def save_compound_dump(chunked: ChunkedCorpus, trees, np_inventory,
                       substring_inventory, path, config: PipelineConfig) -> None:
    """Tab-separated candidate dump: doc, kind, lemma sequence, attested."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash: {config.config_hash()}\n")
        for doc in chunked.docs:
            for compound in comp.doc_compounds(doc.simplexes, doc.complexes, trees):
                ok = comp.is_attested(compound, np_inventory, substring_inventory)
                fh.write(f"{doc.doc_id}\t{compound.kind}\t{compound.phrase()}"
                         f"\t{str(ok).lower()}\n")


def _read_tsv_hash(path) -> str | None:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("# config_hash: "):
        return first[len("# config_hash: "):].strip()
    return None


# -- CLI-facing stages -----------------------------------------------------------


def stage_chunk(config: PipelineConfig) -> ChunkedCorpus:
    if config.corpus is None:
        raise MissingArtifactError("<corpus> (use --corpus)")
    _require(config.corpus)
    lexicon = {}
    if config.lexicon:
        lexicon = load_lexicon(_require(config.lexicon))
    documents = read_documents(config.corpus)
    chunked = chunk_corpus(documents, lexicon)
    save_chunked(chunked, _out(config, CHUNKED_FILE), config)
    _update_manifest(config, "chunk")
    log.info("chunked %d documents into %d simplex NPs",
             len(chunked.docs), len(chunked.all_simplexes()))
    return chunked


def stage_stats(config: PipelineConfig) -> StatTable:
    chunked = load_chunked(
        os.path.join(config.output_dir, CHUNKED_FILE), config)
    table = StatTable.count(
        ([u.key for u in np.units] for np in chunked.all_simplexes()), phase=0)
    table.save(_out(config, STATS_FILE), config_hash=config.config_hash())
    _update_manifest(config, "stats")
    return table


def stage_atoms(config: PipelineConfig):
    path = os.path.join(config.output_dir, STATS_FILE)
    table, header = StatTable.load(_require(path))
    _check_hash(path, header.get("config_hash"), config)
    found = detect_atoms(table, config)
    with open(_out(config, ATOMS_FILE), "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash: {config.config_hash()}\n")
        for atom in found:
            fh.write(format_atom_line(atom) + "\n")
    _update_manifest(config, "atoms")
    return found


def stage_parse(config: PipelineConfig) -> tuple[ChunkedCorpus, ParseResult]:
    chunked = load_chunked(
        os.path.join(config.output_dir, CHUNKED_FILE), config)
    parse = parse_corpus(chunked.all_simplexes(), config)
    save_trees(chunked, parse, _out(config, TREES_FILE), config)
    save_parse_dump(chunked, parse, _out(config, PARSES_FILE), config)
    with open(_out(config, FINAL_ATOMS_FILE), "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash: {config.config_hash()}\n")
        for atom in parse.atoms:
            fh.write(format_atom_line(atom) + "\n")
    parse.word_table.save(
        _out(config, STATS_FILE), config_hash=config.config_hash())
    _update_manifest(config, "stats")
    _update_manifest(config, "parse")
    return chunked, parse


def stage_compounds(config: PipelineConfig) -> None:
    chunked = load_chunked(
        os.path.join(config.output_dir, CHUNKED_FILE), config)
    trees = load_trees(
        os.path.join(config.output_dir, TREES_FILE), chunked, config)
    inventory = chunked.np_inventory()
    substrings = None
    if config.attest_substrings:
        substrings = comp.build_substring_inventory(chunked.all_simplexes())
    save_compound_dump(
        chunked, trees, inventory, substrings, _out(config, COMPOUNDS_FILE), config)
    _update_manifest(config, "compounds")


def stage_index(config: PipelineConfig) -> InvertedIndex:
    chunked = load_chunked(
        os.path.join(config.output_dir, CHUNKED_FILE), config)
    trees = load_trees(
        os.path.join(config.output_dir, TREES_FILE), chunked, config)
    inventory = chunked.np_inventory()
    substrings = None
    if config.attest_substrings:
        substrings = comp.build_substring_inventory(chunked.all_simplexes())
    doc_terms = {
        doc.doc_id: comp.index_terms(
            doc.simplexes, doc.complexes, trees, inventory, substrings)
        for doc in chunked.docs
    }
    index = InvertedIndex.build(doc_terms)
    index.save(_out(config, INDEX_FILE), config_hash=config.config_hash())
    _update_manifest(config, "index")
    log.info("indexed %d documents, %d terms", index.doc_count, len(index.postings))
    return index


def stage_search(config: PipelineConfig) -> list[RankedList]:
    if config.queries is None:
        raise MissingArtifactError("<queries> (use --queries)")
    queries = retrieval.read_queries(_require(config.queries))
    index_path = os.path.join(config.output_dir, INDEX_FILE)
    index, header = InvertedIndex.load(_require(index_path))
    _check_hash(index_path, header.get("config_hash"), config)
    chunked = load_chunked(
        os.path.join(config.output_dir, CHUNKED_FILE), config)
    stats_path = os.path.join(config.output_dir, STATS_FILE)
    word_table, stats_header = StatTable.load(_require(stats_path))
    _check_hash(stats_path, stats_header.get("config_hash"), config)
    atoms_path = os.path.join(config.output_dir, FINAL_ATOMS_FILE)
    atom_inventory = read_atom_pairs(_require(atoms_path))
    lexicon = load_lexicon(_require(config.lexicon)) if config.lexicon else {}
    runs = search_queries(
        queries, index, lexicon, word_table, atom_inventory,
        chunked.np_inventory(), config)
    retrieval.write_run(runs, _out(config, RUN_FILE), tag=config.run_tag)
    _update_manifest(config, "search")
    return runs


def stage_eval(config: PipelineConfig):
    run_path = os.path.join(config.output_dir, RUN_FILE)
    runs = retrieval.read_run(_require(run_path))
    recorded = _manifest_hash(config, "search")
    if recorded is not None and recorded != config.config_hash():
        raise ArtifactMismatchError(run_path, config.config_hash(), recorded)
    if config.qrels is None:
        raise MissingArtifactError("<qrels> (use --qrels)")
    qrels = retrieval.read_qrels(_require(config.qrels))
    per_query, mean = retrieval.evaluate(runs, qrels)
    with open(_out(config, REPORT_FILE), "w", encoding="utf-8") as fh:
        fh.write(retrieval.format_report(per_query, mean, tag=config.run_tag))
    with open(_out(config, METRICS_FILE), "w", encoding="utf-8") as fh:
        fh.write(retrieval.format_metric_lines(per_query, mean))
    _update_manifest(config, "eval")
    return per_query, mean


def run_all(config: PipelineConfig) -> PipelineArtifacts:
    """Run every stage in order, writing all artifacts.

    Search and evaluation run only when query/qrels paths are configured.
    """
    artifacts = PipelineArtifacts()
    artifacts.chunked = stage_chunk(config)
    stage_stats(config)
    stage_atoms(config)
    artifacts.chunked, artifacts.parse = stage_parse(config)
    stage_compounds(config)
    artifacts.index = stage_index(config)
    if config.queries:
        artifacts.runs = stage_search(config)
        if config.qrels:
            artifacts.per_query, artifacts.mean = stage_eval(config)
    return artifacts

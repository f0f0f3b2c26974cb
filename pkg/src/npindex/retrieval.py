"""Inverted index, cosine ranking, and retrieval evaluation.

Documents are sparse vectors over typed terms (compounds and single words).
Weights are log-scaled term frequency times log inverse document frequency,
with document vectors length-normalized at build time, so a ranking score
is the cosine of the angle between query and document.  With a single
document in the collection every idf is ln(1) = 0 and all scores collapse
to zero; ranking needs at least two documents to discriminate.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .compounds import Term

log = logging.getLogger(__name__)

INDEX_MAGIC = "npindex-index"
INDEX_VERSION = 1

RECALL_LEVELS = tuple(i / 10 for i in range(11))
PRECISION_CUTOFFS = (5, 10, 15, 20, 30, 100, 200, 500, 1000)


class IndexFormatError(ValueError):
    pass


@dataclass
class PostingList:
    term: Term
    entries: list[tuple[str, int]]  # (doc_id, term frequency), sorted by doc_id

    @property
    def document_frequency(self) -> int:
        return len(self.entries)


@dataclass
class RankedList:
    query_id: str
    hits: list[tuple[str, float]]  # (doc_id, score) by descending score


class InvertedIndex:
    def __init__(self):
        self.doc_count = 0
        self.postings: dict[Term, PostingList] = {}
        self.doc_norms: dict[str, float] = {}

    @classmethod
    def build(cls, doc_terms: dict[str, Counter]) -> "InvertedIndex":
        """Index per-document term multisets; an empty collection is valid."""
        index = cls()
        index.doc_count = len(doc_terms)
        by_term: dict[Term, list[tuple[str, int]]] = defaultdict(list)
        for doc_id in sorted(doc_terms):
            for term, tf in doc_terms[doc_id].items():
                by_term[term].append((doc_id, tf))
        for term, entries in by_term.items():
            entries.sort()
            index.postings[term] = PostingList(term=term, entries=entries)
        for doc_id in sorted(doc_terms):
            norm_sq = 0.0
            for term, tf in doc_terms[doc_id].items():
                norm_sq += index.weight(term, tf) ** 2
            index.doc_norms[doc_id] = math.sqrt(norm_sq)
        return index

    def idf(self, term: Term) -> float:
        posting = self.postings.get(term)
        if posting is None or self.doc_count == 0:
            return 0.0
        return math.log(self.doc_count / posting.document_frequency)

    def weight(self, term: Term, tf: int) -> float:
        """Unnormalized weight (1 + ln tf) * ln(N / df); 0 for unseen terms."""
        if tf <= 0:
            return 0.0
        return (1.0 + math.log(tf)) * self.idf(term)

    # -- persistence ---------------------------------------------------------

    def save(self, path, config_hash: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            header = {
                "format": INDEX_MAGIC,
                "version": INDEX_VERSION,
                "doc_count": self.doc_count,
            }
            if config_hash is not None:
                header["config_hash"] = config_hash
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for doc_id in sorted(self.doc_norms):
                fh.write(json.dumps(
                    {"doc": doc_id, "norm": self.doc_norms[doc_id]}) + "\n")
            for term in sorted(self.postings):
                posting = self.postings[term]
                fh.write(json.dumps({
                    "kind": term[0],
                    "words": list(term[1]),
                    "entries": [[d, tf] for d, tf in posting.entries],
                }) + "\n")

    @classmethod
    def load(cls, path) -> tuple["InvertedIndex", dict]:
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != INDEX_MAGIC:
                raise IndexFormatError(f"{path}: not an index file")
            if header.get("version") != INDEX_VERSION:
                raise IndexFormatError(
                    f"{path}: unsupported version {header.get('version')!r}")
            index = cls()
            index.doc_count = header["doc_count"]
            for line in fh:
                rec = json.loads(line)
                if "doc" in rec:
                    index.doc_norms[rec["doc"]] = rec["norm"]
                else:
                    term = (rec["kind"], tuple(rec["words"]))
                    index.postings[term] = PostingList(
                        term=term,
                        entries=[(d, tf) for d, tf in rec["entries"]])
        return index, header


def query_vector(term_counts: Counter, index: InvertedIndex) -> dict[Term, float]:
    """Length-normalized query weights; terms unknown to the index drop out."""
    weights = {}
    for term, tf in term_counts.items():
        w = index.weight(term, tf)
        if w > 0.0:
            weights[term] = w
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {term: w / norm for term, w in weights.items()}


def search(vector: dict[Term, float], index: InvertedIndex,
           limit: int = 1000, query_id: str = "") -> RankedList:
    """Cosine ranking of documents against a normalized query vector."""
    scores: dict[str, float] = defaultdict(float)
    for term, qw in vector.items():
        posting = index.postings.get(term)
        if posting is None:
            continue
        idf = index.idf(term)
        if idf == 0.0:
            continue
        for doc_id, tf in posting.entries:
            scores[doc_id] += qw * (1.0 + math.log(tf)) * idf
    hits = []
    for doc_id, dot in scores.items():
        norm = index.doc_norms.get(doc_id, 0.0)
        if norm > 0.0:
            hits.append((doc_id, dot / norm))
    hits.sort(key=lambda h: (-h[1], h[0]))
    return RankedList(query_id=query_id, hits=hits[:max(limit, 0)])


# -- evaluation ---------------------------------------------------------------


@dataclass
class EvalReport:
    recall: float
    interpolated_precision: list[float]
    precision_at: dict[int, float]
    relevant_retrieved: int = 0
    relevant_total: int = 0


def evaluate_run(run: RankedList, relevant: set[str]) -> EvalReport:
    """Standard binary-relevance metrics over one ranked list.

    Recall over the full list, max-interpolated precision at the 11 recall
    levels, and precision at the fixed document cutoffs (counting the cutoff
    in the denominator even when fewer documents were returned).
    """
    n_relevant = len(relevant)
    rel_so_far = 0
    points = []  # (recall, precision) after each rank
    for rank, (doc_id, _) in enumerate(run.hits, start=1):
        if doc_id in relevant:
            rel_so_far += 1
        points.append((rel_so_far / n_relevant, rel_so_far / rank))
    interpolated = []
    for level in RECALL_LEVELS:
        best = 0.0
        for recall, precision in points:
            if recall >= level and precision > best:
                best = precision
        interpolated.append(best)
    precision_at = {}
    for cutoff in PRECISION_CUTOFFS:
        rel_in_top = sum(1 for doc_id, _ in run.hits[:cutoff] if doc_id in relevant)
        precision_at[cutoff] = rel_in_top / cutoff
    return EvalReport(
        recall=rel_so_far / n_relevant,
        interpolated_precision=interpolated,
        precision_at=precision_at,
        relevant_retrieved=rel_so_far,
        relevant_total=n_relevant,
    )


def evaluate(runs: list[RankedList],
             qrels: dict[str, set[str]]) -> tuple[dict[str, EvalReport], EvalReport]:
    """Per-query reports plus their macro-average.

    Queries with no relevant documents are excluded from the average with a
    warning.
    """
    per_query: dict[str, EvalReport] = {}
    for run in runs:
        relevant = qrels.get(run.query_id, set())
        if not relevant:
            log.warning("query %s has no relevant documents; skipped", run.query_id)
            continue
        per_query[run.query_id] = evaluate_run(run, relevant)
    mean = _mean_report(list(per_query.values()))
    return per_query, mean


def _mean_report(reports: list[EvalReport]) -> EvalReport:
    if not reports:
        return EvalReport(
            recall=0.0,
            interpolated_precision=[0.0] * len(RECALL_LEVELS),
            precision_at={c: 0.0 for c in PRECISION_CUTOFFS},
        )
    n = len(reports)
    return EvalReport(
        recall=sum(r.recall for r in reports) / n,
        interpolated_precision=[
            sum(r.interpolated_precision[i] for r in reports) / n
            for i in range(len(RECALL_LEVELS))],
        precision_at={
            c: sum(r.precision_at[c] for r in reports) / n
            for c in PRECISION_CUTOFFS},
        relevant_retrieved=sum(r.relevant_retrieved for r in reports),
        relevant_total=sum(r.relevant_total for r in reports),
    )


# -- run / qrels / report formats ---------------------------------------------


def write_run(runs: list[RankedList], path, tag: str = "npindex") -> None:
    """Standard run format: query_id Q0 doc_id rank score tag."""
    with open(path, "w", encoding="utf-8") as fh:
        for run in runs:
            for rank, (doc_id, score) in enumerate(run.hits, start=1):
                fh.write(f"{run.query_id} Q0 {doc_id} {rank} {score:.6f} {tag}\n")


def read_run(path) -> list[RankedList]:
    by_query: dict[str, list[tuple[int, str, float]]] = defaultdict(list)
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            query_id, _, doc_id, rank, score = parts[0], parts[1], parts[2], parts[3], parts[4]
            if query_id not in by_query:
                order.append(query_id)
            by_query[query_id].append((int(rank), doc_id, float(score)))
    runs = []
    for query_id in order:
        entries = sorted(by_query[query_id])
        runs.append(RankedList(
            query_id=query_id,
            hits=[(doc_id, score) for _, doc_id, score in entries]))
    return runs


def read_qrels(path) -> dict[str, set[str]]:
    """Binary qrels: one ``query_id<TAB>doc_id`` per line."""
    qrels: dict[str, set[str]] = defaultdict(set)
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            query_id, doc_id = line.split("\t")
            qrels[query_id].add(doc_id)
    return dict(qrels)


def read_queries(path) -> list[tuple[str, str]]:
    """Queries: one ``id<TAB>text`` per line."""
    queries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            query_id, text = line.split("\t", 1)
            queries.append((query_id, text))
    return queries


def format_report(per_query: dict[str, EvalReport], mean: EvalReport,
                  tag: str = "npindex") -> str:
    """Human-readable tables: recall, interpolated precision, cutoffs."""
    lines = []
    lines.append("Recall")
    lines.append(f"{'run':<12}{'Retrieved-Rel':>15}{'Total-Rel':>12}{'Recall':>10}")
    lines.append(f"{tag:<12}{mean.relevant_retrieved:>15}{mean.relevant_total:>12}"
                 f"{mean.recall * 100:>9.1f}%")
    lines.append("")
    lines.append("Interpolated Precision")
    lines.append(f"{'Recall':<10}{tag:>10}")
    for level, value in zip(RECALL_LEVELS, mean.interpolated_precision):
        lines.append(f"{level:<10.2f}{value:>10.4f}")
    lines.append("")
    lines.append("Precision at Document Cutoffs")
    lines.append(f"{'Doc-Level':<12}{tag:>10}")
    for cutoff in PRECISION_CUTOFFS:
        lines.append(f"{f'{cutoff} docs':<12}{mean.precision_at[cutoff]:>10.4f}")
    lines.append("")
    lines.append(f"Queries evaluated: {len(per_query)}")
    return "\n".join(lines) + "\n"


def format_metric_lines(per_query: dict[str, EvalReport], mean: EvalReport) -> str:
    """Machine-readable form: ``metric<TAB>query_id<TAB>value`` lines."""
    lines = []

    def emit(query_id: str, report: EvalReport) -> None:
        lines.append(f"recall\t{query_id}\t{report.recall:.6f}")
        for level, value in zip(RECALL_LEVELS, report.interpolated_precision):
            lines.append(f"iprec_{level:.1f}\t{query_id}\t{value:.6f}")
        for cutoff in PRECISION_CUTOFFS:
            lines.append(f"p_{cutoff}\t{query_id}\t{report.precision_at[cutoff]:.6f}")

    for query_id in sorted(per_query):
        emit(query_id, per_query[query_id])
    emit("all", mean)
    return "\n".join(lines) + "\n"

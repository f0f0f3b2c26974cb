"""Frequency tables over the units of simplex noun phrases.

All counts are restricted to co-occurrence inside a single NP: unigram
counts, adjacent ordered bigram counts, and discontinuous ordered bigram
counts (at least one intervening unit).  Units are keyed by
(lemma, category), so a grouped multiword unit counts exactly like a word.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable

UnitKey = tuple[str, str]
PairKey = tuple[UnitKey, UnitKey]

STATS_MAGIC = "npindex-stats"
STATS_VERSION = 1


class StatTableFormatError(ValueError):
    pass


class StatTable:
    """Immutable-once-finalized unigram/bigram tables for one parse phase.

    ``f1`` counts unit occurrences, ``f2`` adjacent ordered pairs, and
    ``df2`` ordered pairs separated by one or more units.  Every occurrence
    counts, including repeats within one NP.
    """

    def __init__(self, phase: int = 0):
        self.phase = phase
        self.f1: Counter[UnitKey] = Counter()
        self.f2: Counter[PairKey] = Counter()
        self.df2: Counter[PairKey] = Counter()
        # Context indexes, derived from f2/df2 by finalize():
        #   successors/predecessors under adjacent and discontinuous counts.
        self._f2_succ: dict[UnitKey, dict[UnitKey, int]] = {}
        self._f2_pred: dict[UnitKey, dict[UnitKey, int]] = {}
        self._df2_succ: dict[UnitKey, dict[UnitKey, int]] = {}
        self._df2_pred: dict[UnitKey, dict[UnitKey, int]] = {}

    @classmethod
    def count(cls, sequences: Iterable[Iterable[UnitKey]], phase: int = 0) -> "StatTable":
        table = cls(phase)
        for seq in sequences:
            table.add_sequence(seq)
        table.finalize()
        return table

    def add_sequence(self, seq: Iterable[UnitKey]) -> None:
        keys = list(seq)
        self.f1.update(keys)
        n = len(keys)
        for i in range(n - 1):
            self.f2[(keys[i], keys[i + 1])] += 1
        for i in range(n - 2):
            left = keys[i]
            for j in range(i + 2, n):
                self.df2[(left, keys[j])] += 1

    def finalize(self) -> None:
        self._f2_succ, self._f2_pred = _pair_indexes(self.f2)
        self._df2_succ, self._df2_pred = _pair_indexes(self.df2)

    # -- dependent-set statistics ------------------------------------------

    def left_dependents(self, pair: PairKey) -> dict[UnitKey, int]:
        """Context units W with F(W, w1) and DF(W, w2) both nonzero.

        Maps each such W to min(F(W, w1), DF(W, w2)).
        """
        w1, w2 = pair
        return _min_intersection(self._f2_pred.get(w1), self._df2_pred.get(w2))

    def right_dependents(self, pair: PairKey) -> dict[UnitKey, int]:
        """Context units W with DF(w1, W) and F(w2, W) both nonzero."""
        w1, w2 = pair
        return _min_intersection(self._df2_succ.get(w1), self._f2_succ.get(w2))

    def avg_ldf(self, pair: PairKey) -> float:
        """Mean of min(F(W, w1), DF(W, w2)) over left dependents; 0 if none."""
        deps = self.left_dependents(pair)
        if not deps:
            return 0.0
        return sum(deps.values()) / len(deps)

    def avg_rdf(self, pair: PairKey) -> float:
        deps = self.right_dependents(pair)
        if not deps:
            return 0.0
        return sum(deps.values()) / len(deps)

    def max_ldf(self, pair: PairKey) -> int:
        """Max of min(F(W, w1), DF(W, w2)) over context units; 0 if none."""
        deps = self.left_dependents(pair)
        return max(deps.values()) if deps else 0

    def max_rdf(self, pair: PairKey) -> int:
        deps = self.right_dependents(pair)
        return max(deps.values()) if deps else 0

    # -- persistence ---------------------------------------------------------

    def save(self, path, config_hash: str | None = None) -> None:
        """Write a self-describing, deterministic line-per-entry file."""
        with open(path, "w", encoding="utf-8") as fh:
            header = {"format": STATS_MAGIC, "version": STATS_VERSION, "phase": self.phase}
            if config_hash is not None:
                header["config_hash"] = config_hash
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for key in sorted(self.f1):
                fh.write(json.dumps({"f1": list(key), "n": self.f1[key]}) + "\n")
            for name, counter in (("f2", self.f2), ("df2", self.df2)):
                for a, b in sorted(counter):
                    fh.write(json.dumps(
                        {name: [list(a), list(b)], "n": counter[(a, b)]}) + "\n")

    @classmethod
    def load(cls, path) -> tuple["StatTable", dict]:
        """Read a saved table; returns (table, header)."""
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != STATS_MAGIC:
                raise StatTableFormatError(f"{path}: not a stats file")
            if header.get("version") != STATS_VERSION:
                raise StatTableFormatError(
                    f"{path}: unsupported version {header.get('version')!r}")
            table = cls(phase=header.get("phase", 0))
            for line in fh:
                rec = json.loads(line)
                n = rec["n"]
                if "f1" in rec:
                    table.f1[tuple(rec["f1"])] = n
                elif "f2" in rec:
                    a, b = rec["f2"]
                    table.f2[(tuple(a), tuple(b))] = n
                elif "df2" in rec:
                    a, b = rec["df2"]
                    table.df2[(tuple(a), tuple(b))] = n
                else:
                    raise StatTableFormatError(f"{path}: unknown record {rec!r}")
        table.finalize()
        return table, header


def _min_intersection(a: dict | None, b: dict | None) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    return {w: min(a[w], b[w]) for w in a if w in b}


def _pair_indexes(counter: Counter) -> tuple[dict, dict]:
    succ: dict[UnitKey, dict[UnitKey, int]] = {}
    pred: dict[UnitKey, dict[UnitKey, int]] = {}
    for (a, b), n in counter.items():
        succ.setdefault(a, {})[b] = n
        pred.setdefault(b, {})[a] = n
    return succ, pred

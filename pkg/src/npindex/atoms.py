"""Detection of lexical atoms: multiword units that act as single words.

A pair qualifies when it is seen adjacently far more often than separated,
no context word binds either member more strongly, and its category shape
is one that can form a unit concept.  Detection runs once per parse phase,
so atoms of three or more words emerge as earlier atoms are folded into
single units.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ingest import ADJECTIVE, LEXATOM, NOUN
from .stats import PairKey, StatTable

# Admissible (left, right) category shapes for an atom.
ATOM_CATEGORY_PAIRS = frozenset({
    (NOUN, NOUN),
    (NOUN, LEXATOM),
    (LEXATOM, NOUN),
    (ADJECTIVE, NOUN),
    (ADJECTIVE, LEXATOM),
})


@dataclass(frozen=True)
class LexAtom:
    members: PairKey
    phase_found: int
    evidence: tuple[int, int, int, int]  # (f2, df2, max_ldf, max_rdf)

    @property
    def lemma(self) -> str:
        return f"{self.members[0][0]} {self.members[1][0]}"


def detect_atoms(table: StatTable, config) -> list[LexAtom]:
    """Return all pairs in ``table`` passing the four atom conditions.

    Conditions: admissible category shape; adjacent frequency strictly above
    both context maxima (max_ldf, max_rdf); adjacent frequency at least
    ``ratio * max(1, discontinuous frequency)`` where the ratio is
    ``atom_adj_ratio`` for adjective-initial pairs and ``atom_noun_ratio``
    otherwise; and adjacent frequency at least ``atom_min_freq``.
    """
    found = []
    for pair in sorted(table.f2):
        f2 = table.f2[pair]
        if f2 < config.atom_min_freq:
            continue
        (_, cat1), (_, cat2) = pair
        if (cat1, cat2) not in ATOM_CATEGORY_PAIRS:
            continue
        df2 = table.df2.get(pair, 0)
        ratio = config.atom_adj_ratio if cat1 == ADJECTIVE else config.atom_noun_ratio
        if f2 < ratio * max(1, df2):
            continue
        max_ldf = table.max_ldf(pair)
        if not f2 > max_ldf:
            continue
        max_rdf = table.max_rdf(pair)
        if not f2 > max_rdf:
            continue
        found.append(LexAtom(
            members=pair,
            phase_found=table.phase,
            evidence=(f2, df2, max_ldf, max_rdf),
        ))
    return found


def format_atom_line(atom: LexAtom) -> str:
    """One inventory line: phase<TAB>member1<TAB>member2.

    Members are rendered ``lemma/Category`` so inventories round-trip even
    when two lemmas differ only by category.
    """
    (l1, c1), (l2, c2) = atom.members
    return f"{atom.phase_found}\t{l1}/{c1}\t{l2}/{c2}"


def write_atoms(atoms: list[LexAtom], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for atom in atoms:
            fh.write(format_atom_line(atom) + "\n")


def read_atom_pairs(path) -> set[PairKey]:
    """Load an inventory written by :func:`write_atoms` as scoring keys."""
    pairs: set[PairKey] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            _, m1, m2 = line.split("\t")
            lemma1, cat1 = m1.rsplit("/", 1)
            lemma2, cat2 = m2.rsplit("/", 1)
            pairs.add(((lemma1, cat1), (lemma2, cat2)))
    return pairs

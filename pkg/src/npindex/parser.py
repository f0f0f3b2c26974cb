"""Bottom-up association parsing of simplex noun phrases.

Each NP is reduced to a binary tree over multiple corpus-wide phases.  In a
phase, every adjacent unit pair gets an association score (smaller means
stronger) from the current frequency tables, pairs that beat both their
neighbors inside an NP are locally dominant, and a pair's preference score
is the fraction of its adjacent occurrences in which it is dominant.  Pairs
above the preference threshold are folded into single units, the tables are
recounted, and the loop repeats until every NP is one unit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .atoms import LexAtom, detect_atoms
from .ingest import (
    ADJECTIVE,
    ADVERB,
    DETERMINER,
    LEXATOM,
    NOUN,
    OTHER,
    PAST_PARTICIPLE,
    PREPOSITION,
    PROGRESSIVE_VERB,
    SimplexNP,
    TaggedToken,
)
from .stats import PairKey, StatTable, UnitKey

log = logging.getLogger(__name__)

ATOM_ZERO = "AtomZero"
ADVERB_ZERO = "AdverbZero"
IMPOSSIBLE = "Impossible100"
FORMULA = "Formula"

IMPOSSIBLE_SCORE = 100.0

# Category pairs that cannot stand in a modification relation.  Any pair
# ending in an adverb, determiner, preposition, or Other is also impossible.
_IMPOSSIBLE_PAIRS = frozenset({
    (NOUN, ADJECTIVE),
    (NOUN, ADVERB),
    (ADJECTIVE, ADJECTIVE),
    (PAST_PARTICIPLE, ADJECTIVE),
    (PAST_PARTICIPLE, ADVERB),
    (PAST_PARTICIPLE, PAST_PARTICIPLE),
})
_IMPOSSIBLE_SECOND = frozenset({ADVERB, DETERMINER, PREPOSITION, OTHER})


class ParseAbort(RuntimeError):
    """Raised when the phase loop exceeds its configured phase budget."""

    def __init__(self, max_phases: int, unfinished: list[str]):
        self.unfinished = unfinished
        preview = "; ".join(unfinished[:20])
        more = "" if len(unfinished) <= 20 else f" (+{len(unfinished) - 20} more)"
        super().__init__(
            f"parse did not converge within {max_phases} phases; "
            f"unfinished NPs: {preview}{more}")


@dataclass(frozen=True)
class AssocScore:
    """Association strength of an adjacent pair; smaller is stronger."""

    value: float
    kind: str


@dataclass(frozen=True)
class PrefScore:
    ldc: int
    f2: int

    @property
    def ps(self) -> float:
        return self.ldc / self.f2


class ParseNode:
    """Binary constituent over an NP; leaves are the original tokens.

    A node grouped from a detected lexical atom carries ``atom_flag`` and is
    treated as a single opaque word by everything downstream.
    """

    __slots__ = ("token", "left", "right", "atom_flag", "_lemma", "_category")

    def __init__(self, token: TaggedToken | None = None,
                 left: "ParseNode | None" = None,
                 right: "ParseNode | None" = None,
                 atom_flag: bool = False):
        self.token = token
        self.left = left
        self.right = right
        self.atom_flag = atom_flag
        self._lemma: str | None = None
        self._category: str | None = None

    @classmethod
    def leaf(cls, token: TaggedToken) -> "ParseNode":
        return cls(token=token)

    @classmethod
    def group(cls, left: "ParseNode", right: "ParseNode", atom_flag: bool = False) -> "ParseNode":
        return cls(left=left, right=right, atom_flag=atom_flag)

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def lemma(self) -> str:
        if self._lemma is None:
            if self.is_leaf:
                self._lemma = self.token.lemma
            else:
                self._lemma = f"{self.left.lemma} {self.right.lemma}"
        return self._lemma

    @property
    def category(self) -> str:
        if self._category is None:
            if self.is_leaf:
                self._category = self.token.category
            elif self.atom_flag:
                self._category = LEXATOM
            else:
                self._category = self.right.category
        return self._category

    @property
    def key(self) -> UnitKey:
        return (self.lemma, self.category)

    def leaves(self) -> list[TaggedToken]:
        if self.is_leaf:
            return [self.token]
        return self.left.leaves() + self.right.leaves()

    def leaf_lemmas(self) -> tuple[str, ...]:
        return tuple(t.lemma for t in self.leaves())

    def head_unit(self) -> "ParseNode":
        """Rightmost head, stopping at atoms: an atom is its own head."""
        if self.is_leaf or self.atom_flag:
            return self
        return self.right.head_unit()

    def internal_nodes(self) -> list["ParseNode"]:
        """All non-leaf nodes, parents before children."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                continue
            out.append(node)
            stack.append(node.right)
            stack.append(node.left)
        return out

    def render(self) -> str:
        """Bracket form with ``=`` between grouped units, ``@`` on atoms."""
        if self.is_leaf:
            return self.token.lemma
        mark = "@" if self.atom_flag else ""
        return f"[{self.left.render()}={self.right.render()}]{mark}"


def _noun_equiv(category: str) -> str:
    return NOUN if category == LEXATOM else category


def association_formula(f2: float, df2: float, f1_sum: float,
                        avg_ldf: float, avg_rdf: float,
                        lambda1: float, lambda2: float) -> float:
    """The frequency-based score: competing-context pull over co-occurrence
    mass, damped toward 1 when the members rarely appear apart."""
    damping = lambda2 / (f1_sum - 2 * f2 + lambda2)
    return (1.0 + avg_ldf + avg_rdf) / (lambda1 * f2 + df2) * damping


def score_pair(left: UnitKey, right: UnitKey, table: StatTable, config,
               atom_inventory: frozenset[PairKey] | set[PairKey]) -> AssocScore:
    """Score an adjacent pair of units; smaller value = stronger association.

    Rule order: known atoms score 0; an adverb before an adjective, past
    participle, or progressive verb scores 0; syntactically impossible
    category pairs score 100; everything else gets the frequency formula
    (with 100 when the pair never co-occurs at all).
    """
    pair = (left, right)
    if pair in atom_inventory:
        return AssocScore(0.0, ATOM_ZERO)
    cat1 = _noun_equiv(left[1])
    cat2 = _noun_equiv(right[1])
    if cat1 == ADVERB and cat2 in (ADJECTIVE, PAST_PARTICIPLE, PROGRESSIVE_VERB):
        return AssocScore(0.0, ADVERB_ZERO)
    if (cat1, cat2) in _IMPOSSIBLE_PAIRS or cat2 in _IMPOSSIBLE_SECOND:
        return AssocScore(IMPOSSIBLE_SCORE, IMPOSSIBLE)
    f2 = table.f2.get(pair, 0)
    df2 = table.df2.get(pair, 0)
    if f2 == 0 and df2 == 0:
        return AssocScore(IMPOSSIBLE_SCORE, FORMULA)
    value = association_formula(
        f2, df2, table.f1.get(left, 0) + table.f1.get(right, 0),
        table.avg_ldf(pair), table.avg_rdf(pair),
        config.lambda1, config.lambda2)
    return AssocScore(value, FORMULA)


def dominant_positions(values: list[float]) -> list[int]:
    """Indexes of locally dominant pairs among adjacent-pair score values.

    A pair dominates when its value is strictly below its left neighbor's
    and no greater than its right neighbor's (ties go to the leftmost pair;
    a missing neighbor never blocks).  The sole pair of a two-unit NP is
    always dominant.
    """
    out = []
    n = len(values)
    for i, v in enumerate(values):
        if i > 0 and not v < values[i - 1]:
            continue
        if i + 1 < n and not v <= values[i + 1]:
            continue
        out.append(i)
    return out


def local_dominance(units: list[UnitKey], scores: dict[PairKey, AssocScore]) -> set[PairKey]:
    """The set of dominant adjacent pairs in one NP's unit sequence."""
    pairs = [(units[i], units[i + 1]) for i in range(len(units) - 1)]
    values = [scores[p].value for p in pairs]
    return {pairs[i] for i in dominant_positions(values)}


def preference_scores(unit_sequences: list[list[UnitKey]],
                      scores: dict[PairKey, AssocScore],
                      table: StatTable) -> dict[PairKey, PrefScore]:
    """Corpus-wide dominance counts over adjacent frequency, per pair."""
    ldc: dict[PairKey, int] = {}
    for units in unit_sequences:
        if len(units) < 2:
            continue
        pairs = [(units[i], units[i + 1]) for i in range(len(units) - 1)]
        values = [scores[p].value for p in pairs]
        for i in dominant_positions(values):
            ldc[pairs[i]] = ldc.get(pairs[i], 0) + 1
    out = {}
    for units in unit_sequences:
        for i in range(len(units) - 1):
            pair = (units[i], units[i + 1])
            if pair not in out:
                out[pair] = PrefScore(ldc=ldc.get(pair, 0), f2=table.f2[pair])
    return out


@dataclass
class PhaseReport:
    phase: int
    threshold: float
    groupings: int
    forced: int
    atoms_found: int
    unfinished: int


@dataclass
class ParseResult:
    trees: dict[SimplexNP, ParseNode]
    atoms: list[LexAtom]
    atom_inventory: set[PairKey]
    word_table: StatTable
    phases: list[PhaseReport] = field(default_factory=list)

    @property
    def phases_run(self) -> int:
        return len(self.phases)


def _score_phase(states: list[list[ParseNode]], table: StatTable, config,
                 atom_inventory: set[PairKey]) -> dict[PairKey, AssocScore]:
    scores: dict[PairKey, AssocScore] = {}
    for nodes in states:
        for i in range(len(nodes) - 1):
            pair = (nodes[i].key, nodes[i + 1].key)
            if pair not in scores:
                scores[pair] = score_pair(pair[0], pair[1], table, config, atom_inventory)
    return scores


def phase_group(states: list[list[ParseNode]],
                pref: dict[PairKey, PrefScore],
                scores: dict[PairKey, AssocScore],
                threshold: float,
                atom_inventory: set[PairKey]) -> int:
    """Fold qualifying adjacent pairs into single units, one pass per NP.

    Candidates at or above the preference threshold are taken in descending
    preference (ties: smaller association score, then leftmost); a grouped
    pair excludes overlapping candidates within the same phase.  Returns the
    number of groupings made.
    """
    total = 0
    for idx, nodes in enumerate(states):
        if len(nodes) < 2:
            continue
        candidates = []
        for i in range(len(nodes) - 1):
            pair = (nodes[i].key, nodes[i + 1].key)
            ps = pref[pair].ps
            if ps >= threshold:
                candidates.append((-ps, scores[pair].value, i, pair))
        if not candidates:
            continue
        candidates.sort()
        chosen: dict[int, PairKey] = {}
        used: set[int] = set()
        for _, _, i, pair in candidates:
            if i in used or i + 1 in used:
                continue
            chosen[i] = pair
            used.update((i, i + 1))
        states[idx] = _apply_groupings(nodes, chosen, atom_inventory)
        total += len(chosen)
    return total


def _apply_groupings(nodes: list[ParseNode], chosen: dict[int, PairKey],
                     atom_inventory: set[PairKey]) -> list[ParseNode]:
    out = []
    i = 0
    while i < len(nodes):
        if i in chosen:
            atom = chosen[i] in atom_inventory
            out.append(ParseNode.group(nodes[i], nodes[i + 1], atom_flag=atom))
            i += 2
        else:
            out.append(nodes[i])
            i += 1
    return out


def _force_group(states: list[list[ParseNode]],
                 scores: dict[PairKey, AssocScore],
                 atom_inventory: set[PairKey]) -> int:
    """Group the smallest-score adjacent pair in every unfinished NP."""
    total = 0
    for idx, nodes in enumerate(states):
        if len(nodes) < 2:
            continue
        best = min(
            range(len(nodes) - 1),
            key=lambda i: (scores[(nodes[i].key, nodes[i + 1].key)].value, i))
        pair = (nodes[best].key, nodes[best + 1].key)
        states[idx] = _apply_groupings(nodes, {best: pair}, atom_inventory)
        total += 1
    return total


def parse_corpus(nps: list[SimplexNP], config) -> ParseResult:
    """Run the full multi-phase loop until every NP is a single unit.

    Per phase: recount the tables from the current unit sequences, detect
    new lexical atoms, score adjacent pairs, compute dominance and
    preference scores, and group.  A phase with no groupings lowers the
    preference threshold by ``ps_decay`` down to ``ps_floor``; at the floor
    the strongest pair of each unfinished NP is grouped outright.
    """
    states: list[list[ParseNode]] = [
        [ParseNode.leaf(tok) for tok in np.units] for np in nps]
    atom_inventory: set[PairKey] = set()
    atoms: list[LexAtom] = []
    known_atom_pairs: set[PairKey] = set()
    word_table: StatTable | None = None
    reports: list[PhaseReport] = []
    threshold = config.ps_threshold

    phase = 0
    while True:
        unfinished = sum(1 for nodes in states if len(nodes) > 1)
        if unfinished == 0:
            break
        if phase >= config.max_phases:
            raise ParseAbort(config.max_phases, [
                " ".join(n.lemma for n in nodes)
                for nodes in states if len(nodes) > 1])

        table = StatTable.count(
            ([n.key for n in nodes] for nodes in states), phase=phase)
        if word_table is None:
            word_table = table

        new_atoms = [a for a in detect_atoms(table, config)
                     if a.members not in known_atom_pairs]
        for atom in new_atoms:
            known_atom_pairs.add(atom.members)
            atom_inventory.add(atom.members)
            atoms.append(atom)

        scores = _score_phase(states, table, config, atom_inventory)
        pref = preference_scores(
            [[n.key for n in nodes] for nodes in states], scores, table)
        grouped = phase_group(states, pref, scores, threshold, atom_inventory)

        forced = 0
        if grouped == 0:
            if threshold > config.ps_floor:
                threshold = max(config.ps_floor, threshold * config.ps_decay)
            else:
                forced = _force_group(states, scores, atom_inventory)

        remaining = sum(1 for nodes in states if len(nodes) > 1)
        reports.append(PhaseReport(
            phase=phase, threshold=threshold, groupings=grouped,
            forced=forced, atoms_found=len(new_atoms), unfinished=remaining))
        log.info(
            "phase %d: threshold=%.3f groupings=%d forced=%d atoms=%d unfinished=%d",
            phase, threshold, grouped, forced, len(new_atoms), remaining)
        phase += 1

    if word_table is None:
        word_table = StatTable.count(
            ([n.key for n in nodes] for nodes in states), phase=0)

    trees = {np: states[i][0] for i, np in enumerate(nps)}
    return ParseResult(
        trees=trees,
        atoms=atoms,
        atom_inventory=atom_inventory,
        word_table=word_table,
        phases=reports,
    )


def parse_single_np(units: list[TaggedToken], table: StatTable, config,
                    atom_inventory: set[PairKey]) -> ParseNode:
    """Parse one NP against fixed statistics by repeated strongest-pair folds.

    Used for query NPs, which are too short to carry statistics of their
    own: scores come from the supplied corpus table and atom inventory.
    """
    nodes = [ParseNode.leaf(tok) for tok in units]
    while len(nodes) > 1:
        best = min(
            range(len(nodes) - 1),
            key=lambda i: (score_pair(nodes[i].key, nodes[i + 1].key,
                                      table, config, atom_inventory).value, i))
        pair = (nodes[best].key, nodes[best + 1].key)
        nodes = _apply_groupings(nodes, {best: pair}, atom_inventory)
    return nodes[0]

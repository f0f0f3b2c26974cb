"""Generation of small indexable compounds from parsed noun phrases.

Four kinds come out of a parse: lexical atoms, head-modifier pairs,
subcompounds (the word span under any internal tree node), and pairs of
segment heads across prepositions.  Discontinuous kinds (head-modifier and
cross-preposition) are candidates only; they are kept when the same word
sequence occurs somewhere in the corpus as a complete free-standing NP.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable

from .ingest import ComplexNP, SimplexNP
from .parser import ParseNode

LEXICAL_ATOM = "LexicalAtom"
HEAD_MODIFIER = "HeadModifier"
SUBCOMPOUND = "Subcompound"
CROSS_PREPOSITION = "CrossPreposition"
WORD = "Word"

COMPOUND_KINDS = (LEXICAL_ATOM, HEAD_MODIFIER, SUBCOMPOUND, CROSS_PREPOSITION)

# An index term: compound kind (or Word) plus its lemma sequence.
Term = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class Compound:
    kind: str
    words: tuple[str, ...]
    source: tuple[str, int] | None = None  # (doc_id, NP position)
    attested: bool = False

    @property
    def term(self) -> Term:
        return (self.kind, self.words)

    def phrase(self) -> str:
        return " ".join(self.words)


def _source(np: SimplexNP | None) -> tuple[str, int] | None:
    if np is None:
        return None
    return (np.doc_id, np.position)


def gen_subcompounds(tree: ParseNode, np: SimplexNP | None = None) -> set[Compound]:
    """One compound per internal node: its leaf lemma span.

    Nodes grouped as lexical atoms emit kind LexicalAtom; all other internal
    nodes emit Subcompound.  Both are continuous spans of an NP that occurs
    in the corpus, so they are attested by construction.
    """
    src = _source(np)
    out = set()
    for node in tree.internal_nodes():
        kind = LEXICAL_ATOM if node.atom_flag else SUBCOMPOUND
        out.add(Compound(kind=kind, words=node.leaf_lemmas(), source=src, attested=True))
    return out


def _modifier_units(node: ParseNode) -> list[ParseNode]:
    """Atomic units under a node: leaves, with atom nodes kept whole."""
    if node.is_leaf or node.atom_flag:
        return [node]
    return _modifier_units(node.left) + _modifier_units(node.right)


def _unit_words(node: ParseNode) -> tuple[str, ...]:
    return node.leaf_lemmas() if not node.is_leaf else (node.token.lemma,)


def gen_head_modifier(tree: ParseNode, np: SimplexNP | None = None) -> set[Compound]:
    """Modifier-head pairs implied by the tree structure.

    Every internal node pairs each unit of its left constituent with the
    head of its right constituent.  Atom nodes are opaque: they are not
    descended into and they stand as single units on either side.
    """
    src = _source(np)
    out = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf or node.atom_flag:
            continue
        head = node.right.head_unit()
        for unit in _modifier_units(node.left):
            words = _unit_words(unit) + _unit_words(head)
            out.add(Compound(kind=HEAD_MODIFIER, words=words, source=src))
        stack.append(node.left)
        stack.append(node.right)
    return out


def gen_cross_preposition(cnp: ComplexNP,
                          trees: dict[SimplexNP, ParseNode]) -> set[Compound]:
    """Pairs of segment heads, later head first, over all segment pairs."""
    heads = [trees[seg].head_unit() for seg in cnp.segments]
    out = set()
    for i in range(len(heads)):
        for j in range(i + 1, len(heads)):
            words = _unit_words(heads[j]) + _unit_words(heads[i])
            out.add(Compound(
                kind=CROSS_PREPOSITION, words=words,
                source=(cnp.doc_id, cnp.segments[i].position)))
    return out


def build_np_inventory(nps: Iterable[SimplexNP]) -> set[tuple[str, ...]]:
    """Lemma sequences of all free-standing simplex NPs, for attestation."""
    return {np.lemmas() for np in nps}


def build_substring_inventory(nps: Iterable[SimplexNP],
                              max_len: int = 6) -> set[tuple[str, ...]]:
    """All contiguous lemma subsequences of NPs up to ``max_len`` words."""
    out: set[tuple[str, ...]] = set()
    for np in nps:
        lemmas = np.lemmas()
        n = len(lemmas)
        for length in range(2, min(max_len, n) + 1):
            for start in range(n - length + 1):
                out.add(lemmas[start:start + length])
    return out


def is_attested(compound: Compound, np_inventory: set[tuple[str, ...]] | None,
                substring_inventory: set[tuple[str, ...]] | None = None) -> bool:
    if compound.kind in (LEXICAL_ATOM, SUBCOMPOUND):
        return True
    if np_inventory is None:  # attestation disabled
        return True
    if compound.words in np_inventory:
        return True
    return substring_inventory is not None and compound.words in substring_inventory


def attest(candidates: set[Compound], np_inventory: set[tuple[str, ...]],
           substring_inventory: set[tuple[str, ...]] | None = None) -> set[Compound]:
    """Keep continuous kinds plus candidates matching a whole free-standing NP.

    With a substring inventory supplied, a candidate occurring as a
    contiguous run inside a longer NP also passes.
    """
    out = set()
    for c in candidates:
        if is_attested(c, np_inventory, substring_inventory):
            out.add(replace(c, attested=True))
    return out


def non_atom_words(tree: ParseNode) -> list[str]:
    """Lemmas of leaves not covered by any atom node."""
    if tree.atom_flag:
        return []
    if tree.is_leaf:
        return [tree.token.lemma]
    return non_atom_words(tree.left) + non_atom_words(tree.right)


def doc_compounds(simplexes: list[SimplexNP], complexes: list[ComplexNP],
                  trees: dict[SimplexNP, ParseNode]) -> list[Compound]:
    """All candidate compounds of one document, duplicates preserved."""
    out: list[Compound] = []
    for np in simplexes:
        tree = trees[np]
        out.extend(sorted(gen_subcompounds(tree, np), key=lambda c: (c.kind, c.words)))
        out.extend(sorted(gen_head_modifier(tree, np), key=lambda c: c.words))
    for cnp in complexes:
        out.extend(sorted(gen_cross_preposition(cnp, trees), key=lambda c: c.words))
    return out


def index_terms(simplexes: list[SimplexNP], complexes: list[ComplexNP],
                trees: dict[SimplexNP, ParseNode],
                np_inventory: set[tuple[str, ...]] | None,
                substring_inventory: set[tuple[str, ...]] | None = None) -> Counter:
    """Term multiset for one document: attested compounds plus single words.

    Single-word terms cover every NP word not inside a lexical atom;
    unattested discontinuous candidates are dropped.
    """
    terms: Counter[Term] = Counter()
    for compound in doc_compounds(simplexes, complexes, trees):
        if is_attested(compound, np_inventory, substring_inventory):
            terms[compound.term] += 1
    for np in simplexes:
        for lemma in non_atom_words(trees[np]):
            terms[(WORD, (lemma,))] += 1
    return terms

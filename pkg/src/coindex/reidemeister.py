"""Schreier transversals and Reidemeister-Schreier rewriting.

Given a complete coset table for a finite-index subgroup, this module
produces prefix-closed coset representatives, rewrites subgroup words
into the Schreier-generator alphabet, and assembles a presentation of
the subgroup from the conjugated relators of the ambient presentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .toddcoxeter import CosetTable, IncompleteTableError
from .words import Presentation, Word, free_reduce, letter


class NotInSubgroupError(ValueError):
    """The word traces from coset 0 to a different coset."""


@dataclass
class Transversal:
    """Prefix-closed coset representatives from a breadth-first tree.

    ``reps[c]`` traces from coset 0 to c; ``tree_edge[c]`` is the
    (parent coset, letter column) pair that first reached c, with
    (-1, -1) at the root.  ``tree_pairs`` holds the (coset, generator)
    pairs whose Schreier generators are freely trivial.
    """

    reps: list[Word]
    tree_edge: list[tuple[int, int]]
    tree_pairs: set[tuple[int, int]] = field(default_factory=set)
    _pair_cache: tuple[list, dict] | None = field(default=None, repr=False, compare=False)

    @property
    def n_cosets(self) -> int:
        return len(self.reps)


def schreier_transversal(t: CosetTable,
                         letter_order: Sequence[int] | None = None) -> Transversal:
    """Breadth-first minimal-length representatives.

    Ties break by letter column order (generator order, positive before
    inverse); ``letter_order`` overrides that scan order for tests of
    transversal independence.
    """
    if not t.is_complete():
        raise IncompleteTableError("transversal needs a complete table")
    cols = list(letter_order) if letter_order is not None else list(range(t.n_letters))
    n = t.n_cosets
    reps: list[Word | None] = [None] * n
    tree_edge = [(-1, -1)] * n
    reps[0] = Word()
    order = [0]
    head = 0
    while head < len(order):
        c = order[head]
        head += 1
        for col in cols:
            d = t.step(c, col)
            if reps[d] is None:
                gen, sign = col // 2, (1 if col % 2 == 0 else -1)
                reps[d] = reps[c] * letter(gen, sign)
                tree_edge[d] = (c, col)
                order.append(d)
    if any(r is None for r in reps):
        raise IncompleteTableError("table is not transitive from coset 0")

    tv = Transversal(reps=reps, tree_edge=tree_edge)  # type: ignore[arg-type]
    for c in range(1, n):
        parent, col = tv.tree_edge[c]
        gen = col // 2
        # an inverse tree edge parent -> c means c.gen = parent
        tv.tree_pairs.add((parent, gen) if col % 2 == 0 else (c, gen))
    return tv


@dataclass
class RSPresentation:
    """Subgroup presentation on Schreier generators.

    ``labels[i]`` is the (coset, generator) pair of generator i; the
    table and transversal are kept so Schreier letters can be expanded
    back into words over the ambient alphabet.
    """

    presentation: Presentation
    labels: list[tuple[int, int]]
    table: CosetTable
    transversal: Transversal

    def ambient_word(self, w: Word) -> Word:
        """Expand a word over Schreier generators into the ambient alphabet.

        Each Schreier letter (c, g) expands to rep_c * g * rep_{c.g}^-1.
        """
        out = Word()
        for idx, sign in w.letters:
            c, g = self.labels[idx]
            target = self.table.follow(c, g, 1)
            piece = (self.transversal.reps[c] * letter(g)
                     * self.transversal.reps[target].inverse())
            out = out * (piece if sign > 0 else piece.inverse())
        return free_reduce(out)


def _schreier_pairs(t: CosetTable, tv: Transversal) -> tuple[list[tuple[int, int]], dict]:
    if tv._pair_cache is not None:
        return tv._pair_cache
    pairs = []
    index = {}
    for c in range(t.n_cosets):
        for g in range(t.n_gens):
            if (c, g) not in tv.tree_pairs:
                index[(c, g)] = len(pairs)
                pairs.append((c, g))
    tv._pair_cache = (pairs, index)
    return pairs, index


def rs_rewrite(w: Word, t: CosetTable, tv: Transversal) -> Word:
    """Rewrite a subgroup word into the Schreier alphabet.

    Scans ``w`` from coset 0, emitting one Schreier letter per non-tree
    edge crossed.  Raises NotInSubgroupError when the trace does not
    return to coset 0.
    """
    _, index = _schreier_pairs(t, tv)
    return _rewrite_from(w, 0, t, tv, index, check_closure=True)


def _rewrite_from(w: Word, start: int, t: CosetTable, tv: Transversal,
                  pair_index: dict, check_closure: bool) -> Word:
    out: list[tuple[int, int]] = []
    c = start
    for gen, sign in w.letters:
        if sign > 0:
            d = t.follow(c, gen, 1)
            pair = (c, gen)
            if pair in pair_index:
                out.append((pair_index[pair], 1))
        else:
            d = t.follow(c, gen, -1)
            pair = (d, gen)
            if pair in pair_index:
                out.append((pair_index[pair], -1))
        c = d
    if check_closure and c != start:
        raise NotInSubgroupError(f"word traces coset 0 to coset {c}")
    return free_reduce(Word(tuple(out)))


def subgroup_presentation(p: Presentation, t: CosetTable) -> RSPresentation:
    """Presentation of the subgroup whose coset table is ``t``.

    Generators are the non-tree (coset, generator) pairs, named
    ``x{coset}_{name}``; relators are the rewrites of every conjugate
    rep_c * R * rep_c^-1.  Because representatives are tree words, the
    conjugating pieces emit nothing and each relator is the trace of R
    started at coset c.
    """
    if tuple(p.gen_names) != tuple(t.gen_names):
        raise ValueError("presentation and table alphabets differ")
    tv = schreier_transversal(t)
    pairs, index = _schreier_pairs(t, tv)
    gen_names = tuple(f"x{c}_{p.gen_names[g]}" for c, g in pairs)
    relators = []
    for c in range(t.n_cosets):
        for rel in p.relators:
            # a relator must trace every coset back to itself
            w = _rewrite_from(rel, c, t, tv, index, check_closure=True)
            if not w.is_empty():
                relators.append(w)
    pres = Presentation(gen_names, tuple(relators))
    return RSPresentation(presentation=pres, labels=pairs, table=t, transversal=tv)

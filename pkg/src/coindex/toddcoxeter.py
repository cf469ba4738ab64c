"""Bounded Todd-Coxeter coset enumeration (HLT strategy) and coset tables.

The CosetTable type here also serves the congruence module, whose tables
come from Cayley graphs of finite images rather than from enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import get_kernels
from .words import Presentation, Word


class InvalidWordError(ValueError):
    """A word uses symbols outside the presentation's alphabet."""


class DegeneratePresentationError(ValueError):
    """Coincidence processing collapsed every coset."""


class IncompleteTableError(ValueError):
    """An operation needs a complete coset table."""


class CosetTable:
    """Right action of signed generators on cosets.

    ``table[c, 2*g]`` is the coset c.gen_g, ``table[c, 2*g+1]`` is
    c.gen_g^-1; complete tables have no -1 entries and every column a
    permutation.  ``origin`` records how the table was built ("cayley"
    or "todd_coxeter").
    """

    def __init__(self, gen_names: Sequence[str], table: np.ndarray, origin: str):
        table = np.asarray(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[1] != 2 * len(gen_names):
            raise ValueError("table must have two columns per generator")
        self.gen_names = tuple(gen_names)
        self.table = table
        self.origin = origin

    @property
    def n_cosets(self) -> int:
        return self.table.shape[0]

    @property
    def n_gens(self) -> int:
        return len(self.gen_names)

    @property
    def n_letters(self) -> int:
        return 2 * len(self.gen_names)

    def step(self, coset: int, column: int) -> int:
        return int(self.table[coset, column])

    def follow(self, coset: int, gen: int, sign: int) -> int:
        return int(self.table[coset, 2 * gen + (0 if sign > 0 else 1)])

    def trace(self, coset: int, word: Word) -> int:
        c = coset
        for idx, sign in word.letters:
            c = self.follow(c, idx, sign)
            if c < 0:
                raise IncompleteTableError(f"undefined entry along trace at coset {coset}")
        return c

    def is_complete(self) -> bool:
        return bool((self.table >= 0).all())

    def validate(self) -> None:
        """Column permutation and inverse-pair audit; raises on failure."""
        if not self.is_complete():
            raise IncompleteTableError("table has undefined entries")
        n = self.n_cosets
        full = np.arange(n)
        for col in range(self.n_letters):
            if not np.array_equal(np.sort(self.table[:, col]), full):
                raise AssertionError(f"column {col} is not a permutation")
        for g in range(self.n_gens):
            fwd = self.table[:, 2 * g]
            bwd = self.table[:, 2 * g + 1]
            if not np.array_equal(bwd[fwd], full):
                raise AssertionError(f"columns for generator {g} are not inverse")

    def __eq__(self, other) -> bool:
        return (isinstance(other, CosetTable)
                and self.gen_names == other.gen_names
                and np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return (f"CosetTable(n={self.n_cosets}, gens={self.gen_names}, "
                f"origin={self.origin!r})")


@dataclass(frozen=True)
class TCConfig:
    max_cosets: int = 1_000_000
    strategy: str = "relator_first"
    fill_order: str = "row_major"
    audit: bool = False  # re-check table consistency after every merge

    def __post_init__(self):
        if self.max_cosets < 1:
            raise ValueError("max_cosets must be >= 1")
        if self.strategy != "relator_first":
            raise ValueError(f"unsupported strategy {self.strategy!r}")


@dataclass(frozen=True)
class Completed:
    index: int
    table: CosetTable


@dataclass(frozen=True)
class Exceeded:
    cosets_allocated: int
    cosets_alive: int


def _encode_words(words: Sequence[Word], n_gens: int) -> tuple[np.ndarray, np.ndarray]:
    flat: list[int] = []
    off = [0]
    for w in words:
        for idx, sign in w.letters:
            if idx >= n_gens:
                raise InvalidWordError(f"symbol index {idx} outside alphabet of size {n_gens}")
            flat.append(2 * idx + (0 if sign > 0 else 1))
        off.append(len(flat))
    return (np.asarray(flat, dtype=np.int32),
            np.asarray(off, dtype=np.int32))


def _standardize(raw: np.ndarray, parent: np.ndarray, next_id: int,
                 n_letters: int) -> np.ndarray:
    """Resolve union-find references and renumber cosets in BFS order."""

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    new_index = {0: 0}
    order = [0]
    head = 0
    while head < len(order):
        c = order[head]
        head += 1
        for col in range(n_letters):
            d = find(int(raw[c, col]))
            if d not in new_index:
                new_index[d] = len(order)
                order.append(d)
    n = len(order)
    out = np.empty((n, n_letters), dtype=np.int32)
    for new_c, old_c in enumerate(order):
        for col in range(n_letters):
            out[new_c, col] = new_index[find(int(raw[old_c, col]))]
    return out


def coset_enumerate(p: Presentation, subgroup_gens: Sequence[Word],
                    cfg: TCConfig = TCConfig()) -> Completed | Exceeded:
    """Enumerate cosets of <subgroup_gens> in the group presented by ``p``.

    Completed(n, table) certifies index n with a standardized complete
    table; Exceeded means the coset allocation passed cfg.max_cosets
    without the table closing, which says nothing about the index.
    """
    n_gens = p.n_gens
    rel_flat, rel_off = _encode_words(p.relators, n_gens)
    sub_flat, sub_off = _encode_words(subgroup_gens, n_gens)
    kernels = get_kernels()
    status, next_id, raw, parent = kernels.tc_core(
        2 * n_gens, rel_flat, rel_off, sub_flat, sub_off, int(cfg.max_cosets),
        1 if cfg.audit else 0)
    if status == 2:
        raise AssertionError("coincidence processing broke table consistency")
    alive = int(np.count_nonzero(parent[:next_id] == np.arange(next_id, dtype=np.int32)))
    if status == 1:
        return Exceeded(cosets_allocated=int(next_id), cosets_alive=alive)
    if alive == 0:
        raise DegeneratePresentationError("all cosets collapsed")
    table = _standardize(raw, parent, int(next_id), 2 * n_gens)
    result = CosetTable(p.gen_names, table, origin="todd_coxeter")
    if not result.is_complete():
        raise AssertionError("completed enumeration produced an incomplete table")
    return Completed(index=alive, table=result)

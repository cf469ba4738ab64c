"""Finite matrix-group engine over F_q: closures, orders, Cayley coset
tables, orbit-stabilizer with Schreier generators, and congruence index
bounds (single modulus and subdirect products over several moduli).

Breadth-first expansion order is pinned everywhere: generators in their
named order, the positive letter before its inverse.  That fixes element
numbering, Schreier trees, and therefore every downstream table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ._kernels import get_kernels
from .eiszeta import MatZ2
from .ffq import FieldDesc, MatFq2, make_reduction, reduce_matrix
from .toddcoxeter import CosetTable
from .words import Word, free_reduce, letter


class NotASubgroupError(ValueError):
    """The putative subgroup generators do not lie in the ambient group."""


class GroupTooLargeError(RuntimeError):
    """A closure or table build passed its element cap."""


@dataclass(frozen=True)
class FiniteMatGroup:
    """A subgroup of GL2(F_q) given by named generators."""

    field: FieldDesc
    gens: dict[str, MatFq2]

    def __post_init__(self):
        for name, m in self.gens.items():
            if m.field != self.field:
                raise ValueError(f"generator {name} lives over a different field")
            if not m.is_invertible():
                raise ValueError(f"generator {name} is singular")

    def gen_names(self) -> tuple[str, ...]:
        return tuple(self.gens)

    def expansion(self) -> list[MatFq2]:
        """Generators interleaved with inverses, in expansion order."""
        out = []
        for m in self.gens.values():
            out.append(m)
            out.append(m.inverse())
        return out


def reduce_group(gens: Mapping[str, MatZ2], f: FieldDesc) -> FiniteMatGroup:
    return FiniteMatGroup(f, {k: reduce_matrix(m, f) for k, m in gens.items()})


@dataclass
class ElementTable:
    """Closure elements in discovery order with index lookup by key."""

    group: FiniteMatGroup
    elements: list[MatFq2]
    index: dict[int, int]

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, m: MatFq2) -> int:
        return self.index[m.encode()]


def _digit_rows(mats: Sequence[MatFq2], f: FieldDesc) -> np.ndarray:
    nd = 4 if f.degree == 1 else 8
    rows = np.empty((len(mats), nd), dtype=np.int64)
    for i, m in enumerate(mats):
        key = m.encode()
        for d in range(nd - 1, -1, -1):
            rows[i, d] = key % f.p
            key //= f.p
    return rows


def _kernel_packable(f: FieldDesc, cap: int) -> bool:
    nd = 4 if f.degree == 1 else 8
    return f.p ** nd < 2 ** 62 and cap < 2 ** 31


def _next_prime_at_least(n: int) -> int:
    from .ffq import is_prime

    k = max(n, 3) | 1
    while not is_prime(k):
        k += 2
    return k


def closure_order(g: FiniteMatGroup, cap: int) -> int | None:
    """Exact order by breadth-first closure, or None once past ``cap``."""
    if cap <= 0:
        raise ValueError("cap must be positive")
    kernels = get_kernels()
    if kernels.closure_count is not None and _kernel_packable(g.field, cap):
        gen_digits = _digit_rows(g.expansion(), g.field)
        capacity = _next_prime_at_least(2 * cap + 1)
        status, count, _ = kernels.closure_count(
            gen_digits, g.field.p, g.field.degree, cap, capacity)
        return None if status == 1 else int(count)
    count = _generic_closure_count(g.expansion(), MatFq2.identity(g.field),
                                   lambda m: m.encode(), cap)
    return count


def _generic_closure_count(expansion, identity, key_of, cap, mul=None) -> int | None:
    if mul is None:
        mul = lambda a, b: a * b
    seen = {key_of(identity): 0}
    frontier = [identity]
    while frontier:
        nxt = []
        for m in frontier:
            for gmat in expansion:
                prod = mul(m, gmat)
                k = key_of(prod)
                if k not in seen:
                    if len(seen) >= cap:
                        return None
                    seen[k] = len(seen)
                    nxt.append(prod)
        frontier = nxt
    return len(seen)


def build_element_table(g: FiniteMatGroup, cap: int) -> ElementTable:
    """Materialize the closure in discovery order; raises past ``cap``."""
    expansion = g.expansion()
    ident = MatFq2.identity(g.field)
    elements = [ident]
    index = {ident.encode(): 0}
    head = 0
    while head < len(elements):
        m = elements[head]
        head += 1
        for gmat in expansion:
            prod = m * gmat
            k = prod.encode()
            if k not in index:
                if len(elements) >= cap:
                    raise GroupTooLargeError(f"closure passed cap {cap}")
                index[k] = len(elements)
                elements.append(prod)
    return ElementTable(group=g, elements=elements, index=index)


def cayley_coset_table(g: FiniteMatGroup, cap: int = 200_000) -> CosetTable:
    """Coset table of the kernel of reduction, as the image's Cayley graph.

    Rows are image elements in discovery order (row 0 the identity);
    entry (i, 2k) is the row of element_i * gen_k.  Cosets of the kernel
    biject with image elements, so this is exactly the coset table of
    ker(reduction) in the ambient group.
    """
    et = build_element_table(g, cap)
    gens = list(g.gens.values())
    invs = [m.inverse() for m in gens]
    n = len(et)
    table = np.empty((n, 2 * len(gens)), dtype=np.int32)
    for i, m in enumerate(et.elements):
        for k, (gen, inv) in enumerate(zip(gens, invs)):
            table[i, 2 * k] = et.index[(m * gen).encode()]
            table[i, 2 * k + 1] = et.index[(m * inv).encode()]
    return CosetTable(g.gen_names(), table, origin="cayley")


@dataclass
class SchreierOrbit:
    """Orbit of a seed under right multiplication, with Schreier data.

    ``tree[i]`` is (parent_index, gen_index, sign) for point i, with
    (-1, -1, 0) at the root.  ``schreier_gens`` are words over
    ``alphabet``, one per non-tree (point, generator) pair, each fixing
    the seed through the action.
    """

    alphabet: tuple[str, ...]
    points: list[MatFq2]
    tree: list[tuple[int, int, int]]
    schreier_gens: list[Word]

    def rep_word(self, i: int) -> Word:
        letters = []
        while i != 0:
            parent, gen, sign = self.tree[i]
            letters.append((gen, sign))
            i = parent
        return Word(tuple(reversed(letters)))


def orbit_stabilizer_schreier(images: Mapping[str, MatFq2],
                              seed: MatFq2) -> SchreierOrbit:
    """Breadth-first orbit of ``seed`` under right multiplication by the
    named images, plus the Schreier generators of the seed stabilizer.

    Only positive letters are used for expansion (the images generate a
    finite group, so inverses add nothing), which keeps one candidate
    Schreier generator per (point, generator) pair.
    """
    names = tuple(images)
    gens = [images[k] for k in names]
    points = [seed]
    index = {seed.encode(): 0}
    tree: list[tuple[int, int, int]] = [(-1, -1, 0)]
    tree_pairs: set[tuple[int, int]] = set()
    head = 0
    while head < len(points):
        m = points[head]
        for k, gen in enumerate(gens):
            prod = m * gen
            key = prod.encode()
            if key not in index:
                index[key] = len(points)
                tree.append((head, k, 1))
                tree_pairs.add((head, k))
                points.append(prod)
        head += 1

    orbit = SchreierOrbit(alphabet=names, points=points, tree=tree, schreier_gens=[])
    for i in range(len(points)):
        for k, gen in enumerate(gens):
            if (i, k) in tree_pairs:
                continue
            target = index[(points[i] * gen).encode()]
            w = orbit.rep_word(i) * letter(k) * orbit.rep_word(target).inverse()
            orbit.schreier_gens.append(free_reduce(w))
    return orbit


# ---------------------------------------------------------------------------
# Base-and-strong-generating-set order computation (deterministic
# Schreier-Sims over a right action on points)


class _StabilizerChain:
    def __init__(self, identity, mul: Callable, inv: Callable, act: Callable,
                 base_candidates: Sequence):
        self.identity = identity
        self.mul = mul
        self.inv = inv
        self.act = act
        self.candidates = list(base_candidates)
        self.bases: list = []
        self.strong: list[tuple] = []  # (element, depth): fixes bases[:depth]
        self.orbits: list[dict] = []   # per level: point -> (parent_point, gen_pos)

    def level_gens(self, j: int) -> list:
        return [g for g, d in self.strong if d >= j]

    def _rebuild_orbit(self, j: int) -> None:
        base = self.bases[j]
        gens = self.level_gens(j)
        orbit = {base: None}
        queue = [base]
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            for pos, g in enumerate(gens):
                y = self.act(x, g)
                if y not in orbit:
                    orbit[y] = (x, pos)
                    queue.append(y)
        self.orbits[j] = orbit

    def _rep(self, j: int, point):
        """Element u with act(base_j, u) == point, composed along the tree."""
        path = []
        x = point
        while self.orbits[j][x] is not None:
            parent, pos = self.orbits[j][x]
            path.append(pos)
            x = parent
        u = self.identity
        gens = self.level_gens(j)
        for pos in reversed(path):
            u = self.mul(u, gens[pos])
        return u

    def sift(self, g, start: int = 0):
        """Reduce g through levels >= start; returns (residue, depth) or None."""
        for j in range(start, len(self.bases)):
            x = self.act(self.bases[j], g)
            if x == self.bases[j]:
                continue
            if x not in self.orbits[j]:
                return g, j
            g = self.mul(g, self.inv(self._rep(j, x)))
        if g == self.identity:
            return None
        return g, len(self.bases)

    def _add_strong(self, g, depth: int) -> None:
        if depth == len(self.bases):
            for pt in self.candidates:
                if self.act(pt, g) != pt:
                    self.bases.append(pt)
                    self.orbits.append({})
                    break
            else:
                raise AssertionError("non-identity element fixes all candidate points")
        self.strong.append((g, depth))
        for j in range(depth + 1):
            if j < len(self.bases):
                self._rebuild_orbit(j)

    def add_generator(self, g) -> None:
        res = self.sift(g)
        if res is not None:
            self._add_strong(*res)

    def close(self) -> None:
        """Schreier-Sims completion: verify every level bottom-up."""
        i = len(self.bases) - 1
        while i >= 0:
            modified = False
            gens = self.level_gens(i)
            orbit_points = list(self.orbits[i])
            for x in orbit_points:
                u_x = self._rep(i, x)
                for s in gens:
                    y = self.act(x, s)
                    sg = self.mul(self.mul(u_x, s), self.inv(self._rep(i, y)))
                    res = self.sift(sg, i + 1)
                    if res is not None:
                        self._add_strong(*res)
                        i = res[1] if res[1] < len(self.bases) else len(self.bases) - 1
                        modified = True
                        break
                if modified:
                    break
            if not modified:
                i -= 1

    def order(self) -> int:
        n = 1
        for orbit in self.orbits:
            n *= len(orbit)
        return n

    def contains(self, g) -> bool:
        return self.sift(g) is None


def _vec_act(v: tuple, m: MatFq2) -> tuple:
    f = m.field
    (a, b), (c, d) = m.entries
    v0, v1 = v
    return (f.add(f.mul(v0, a), f.mul(v1, c)),
            f.add(f.mul(v0, b), f.mul(v1, d)))


def _matrix_chain(g: FiniteMatGroup) -> _StabilizerChain:
    f = g.field
    e1 = (f.one(), f.zero())
    e2 = (f.zero(), f.one())
    chain = _StabilizerChain(
        identity=MatFq2.identity(f),
        mul=lambda a, b: a * b,
        inv=lambda a: a.inverse(),
        act=_vec_act,
        base_candidates=[e1, e2],
    )
    for m in g.gens.values():
        chain.add_generator(m)
    chain.close()
    return chain


def bsgs_order(g: FiniteMatGroup) -> int:
    """Group order via a stabilizer chain on the action on row vectors.

    Agrees with closure_order whenever both complete, and scales to
    orders far beyond what element enumeration can reach.
    """
    return _matrix_chain(g).order()


def congruence_index_bound(s: FiniteMatGroup, gamma: FiniteMatGroup,
                           s_cap: int = 1_000_000) -> int:
    """|image(gamma)| / |image(s)|: a lower bound for the ambient index.

    The subgroup order comes from closure (small in practice), the
    ambient order from the stabilizer chain.
    """
    if s.field != gamma.field:
        raise ValueError("groups over different fields")
    chain = _matrix_chain(gamma)
    for name, m in s.gens.items():
        if not chain.contains(m):
            raise NotASubgroupError(f"generator {name} lies outside the ambient image")
    order_s = closure_order(s, s_cap)
    if order_s is None:
        raise GroupTooLargeError(f"subgroup closure passed cap {s_cap}")
    order_gamma = chain.order()
    if order_gamma % order_s:
        raise NotASubgroupError("subgroup order does not divide ambient order")
    return order_gamma // order_s


# ---------------------------------------------------------------------------
# Multi-modulus (subdirect product) bounds


@dataclass(frozen=True)
class ModulusReport:
    p: int
    degree: int
    zeta_image: tuple[int, ...]
    order_gamma: int
    order_s: int
    index_bound: int

    def to_json_obj(self) -> dict:
        return {
            "p": self.p,
            "degree": self.degree,
            "zeta_image": list(self.zeta_image),
            "order_gamma": self.order_gamma,
            "order_s": self.order_s,
            "index_bound": self.index_bound,
        }


@dataclass(frozen=True)
class MultiModulusBound:
    bound: int
    order_gamma: int
    order_s: int
    per_modulus: tuple[ModulusReport, ...]


def _tuple_group_order(mats: Sequence[tuple[MatFq2, ...]], fields: Sequence[FieldDesc],
                       cap: int) -> int:
    """Order of the group generated by tuples of matrices (one per modulus)."""
    if not mats:
        return 1
    identity = tuple(MatFq2.identity(f) for f in fields)

    def mul(a, b):
        return tuple(x * y for x, y in zip(a, b))

    def inv(a):
        return tuple(x.inverse() for x in a)

    def key_of(a):
        return tuple(x.encode() for x in a)

    expansion = []
    for m in mats:
        expansion.append(m)
        expansion.append(inv(m))
    count = _generic_closure_count(expansion, identity, key_of, cap, mul=mul)
    if count is not None:
        return count

    # Too big to enumerate: stabilizer chain on the disjoint union of the
    # per-modulus vector actions.
    candidates = []
    for i, f in enumerate(fields):
        candidates.append((i, (f.one(), f.zero())))
        candidates.append((i, (f.zero(), f.one())))

    def act(point, elem):
        i, v = point
        return (i, _vec_act(v, elem[i]))

    chain = _StabilizerChain(identity=identity, mul=mul, inv=inv, act=act,
                             base_candidates=candidates)
    for m in mats:
        chain.add_generator(m)
    chain.close()
    return chain.order()


def multi_modulus_bound(primes: Sequence[int], s_gens: Mapping[str, MatZ2],
                        gamma_gens: Mapping[str, MatZ2],
                        cap: int = 2_000_000) -> MultiModulusBound:
    """Index of the subgroup image inside the subdirect image of the
    ambient group over all the given prime moduli simultaneously.

    Small products are enumerated; larger ones fall back to a stabilizer
    chain on the product action.  Always at least as large as every
    single-modulus bound.
    """
    if len(set(primes)) != len(primes):
        raise ValueError("moduli must be distinct")
    fields = [make_reduction(p) for p in primes]
    reports = []
    for f in fields:
        gamma_f = reduce_group(gamma_gens, f)
        s_f = reduce_group(s_gens, f)
        og = bsgs_order(gamma_f)
        os_ = bsgs_order(s_f)
        reports.append(ModulusReport(
            p=f.p, degree=f.degree, zeta_image=tuple(f.zeta),
            order_gamma=og, order_s=os_, index_bound=og // os_))

    gamma_tuples = [tuple(reduce_matrix(m, f) for f in fields)
                    for m in gamma_gens.values()]
    s_tuples = [tuple(reduce_matrix(m, f) for f in fields)
                for m in s_gens.values()]
    order_gamma = _tuple_group_order(gamma_tuples, fields, cap)
    order_s = _tuple_group_order(s_tuples, fields, cap)
    if order_gamma % order_s:
        raise NotASubgroupError("subgroup order does not divide ambient order")
    return MultiModulusBound(bound=order_gamma // order_s,
                             order_gamma=order_gamma, order_s=order_s,
                             per_modulus=tuple(reports))

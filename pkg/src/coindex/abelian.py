"""Exact integer linear algebra: Smith normal form, rank, abelian
invariants of presentations, and ranks of subgroup images in abelianized
quotients.

The relation matrices produced by Reidemeister-Schreier rewriting are
large (tens of thousands of rows) but overwhelmingly +-1-sparse, so the
workhorse here is a sparse elimination phase that pivots only on +-1
entries, chosen by Markowitz fill-in cost.  A +-1 pivot contributes
divisor 1 and detaches its row and column; whatever survives goes
through a small dense Smith normal form.  Everything is arbitrary
precision; modular ranks serve as fast cross-checks, never as the
answer.
"""

from __future__ import annotations

import heapq
import json
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .words import Presentation, exponent_vector


class DimensionMismatchError(ValueError):
    """Operands do not have compatible shapes."""


class IntMat:
    """Sparse integer matrix: explicit shape plus a (row, col) -> value map."""

    def __init__(self, rows: int, cols: int,
                 entries: Mapping[tuple[int, int], int] | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise DimensionMismatchError(f"entry ({r}, {c}) outside {rows}x{cols}")
                if v:
                    self.entries[(r, c)] = int(v)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "IntMat":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        m = cls(rows, cols)
        for r, row in enumerate(data):
            if len(row) != cols:
                raise DimensionMismatchError("ragged dense input")
            for c, v in enumerate(row):
                if v:
                    m.entries[(r, c)] = int(v)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, int] | Sequence[int]],
                  cols: int) -> "IntMat":
        m = cls(len(rows), cols)
        for r, row in enumerate(rows):
            items = row.items() if isinstance(row, Mapping) else enumerate(row)
            for c, v in items:
                if v:
                    m.entries[(r, c)] = int(v)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntMat":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMat":
        return cls(rows, cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def get(self, r: int, c: int) -> int:
        return self.entries.get((r, c), 0)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def stack(self, other: "IntMat") -> "IntMat":
        if other.cols != self.cols:
            raise DimensionMismatchError("column counts differ")
        m = IntMat(self.rows + other.rows, self.cols, self.entries)
        for (r, c), v in other.entries.items():
            m.entries[(self.rows + r, c)] = v
        return m

    def to_json_obj(self) -> dict:
        triples = sorted((r, c, v) for (r, c), v in self.entries.items())
        return {"rows": self.rows, "cols": self.cols, "triples": triples}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "IntMat":
        m = cls(int(obj["rows"]), int(obj["cols"]))
        for r, c, v in obj["triples"]:
            if v:
                m.entries[(int(r), int(c))] = int(v)
        return m

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh)

    @classmethod
    def load(cls, path: str) -> "IntMat":
        with open(path) as fh:
            return cls.from_json_obj(json.load(fh))

    def __repr__(self) -> str:
        return f"IntMat({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class SnfResult:
    """Divisor chain d1 | d2 | ... | dr (all positive; rank = len)."""

    divisors: tuple[int, ...]
    transform_left: IntMat | None = None
    transform_right: IntMat | None = None

    @property
    def rank(self) -> int:
        return len(self.divisors)


@dataclass(frozen=True)
class AbelianQuotient:
    free_rank: int
    torsion: tuple[int, ...]


# ---------------------------------------------------------------------------
# Sparse unit-pivot elimination


class _SparseElim:
    """Markowitz-ordered elimination on +-1 pivots.

    Active rows are pivot candidates; passive rows receive the same row
    operations but are never pivoted, which reduces them modulo the row
    space of the active part.
    """

    def __init__(self, active: list[dict[int, int]],
                 passive: list[dict[int, int]] | None = None):
        self.rows: dict[int, dict[int, int]] = {
            i: dict(r) for i, r in enumerate(active) if r}
        self.cols: dict[int, set[int]] = {}
        for i, row in self.rows.items():
            for c in row:
                self.cols.setdefault(c, set()).add(i)
        self.passive: dict[int, dict[int, int]] = {
            i: dict(r) for i, r in enumerate(passive or []) if r}
        self.pcols: dict[int, set[int]] = {}
        for i, row in self.passive.items():
            for c in row:
                self.pcols.setdefault(c, set()).add(i)
        self.unit_pivots = 0
        self._heap: list[tuple[int, int, int]] = []
        for i, row in self.rows.items():
            for c, v in row.items():
                if v == 1 or v == -1:
                    self._push(i, c)

    def _cost(self, r: int, c: int) -> int:
        return (len(self.rows[r]) - 1) * (len(self.cols[c]) - 1)

    def _push(self, r: int, c: int) -> None:
        heapq.heappush(self._heap, (self._cost(r, c), r, c))

    def run(self) -> None:
        heap = self._heap
        while heap:
            cost, r, c = heapq.heappop(heap)
            row = self.rows.get(r)
            if row is None:
                continue
            v = row.get(c, 0)
            if v != 1 and v != -1:
                continue
            cur = self._cost(r, c)
            if cur > cost:
                heapq.heappush(heap, (cur, r, c))
                continue
            self._eliminate(r, c, v)

    def _eliminate(self, r: int, c: int, v: int) -> None:
        pivot_row = self.rows.pop(r)
        for cc in pivot_row:
            self.cols[cc].discard(r)

        # clear column c in the remaining active rows
        for rr in sorted(self.cols.get(c, ())):
            target = self.rows[rr]
            f = target[c] * v  # v in {1,-1}: multiplier so target[c] vanishes
            for cc, pv in pivot_row.items():
                new = target.get(cc, 0) - f * pv
                if new:
                    target[cc] = new
                    self.cols.setdefault(cc, set()).add(rr)
                    if new == 1 or new == -1:
                        self._push(rr, cc)
                else:
                    if cc in target:
                        del target[cc]
                        self.cols[cc].discard(rr)
            if not target:
                del self.rows[rr]
        self.cols.pop(c, None)

        # same row operations on passive rows
        for rr in sorted(self.pcols.get(c, ())):
            target = self.passive[rr]
            f = target[c] * v
            for cc, pv in pivot_row.items():
                new = target.get(cc, 0) - f * pv
                if new:
                    target[cc] = new
                    self.pcols.setdefault(cc, set()).add(rr)
                else:
                    if cc in target:
                        del target[cc]
                        self.pcols[cc].discard(rr)
        self.pcols.pop(c, None)
        self.unit_pivots += 1

    def residual_rows(self) -> list[dict[int, int]]:
        return [dict(self.rows[i]) for i in sorted(self.rows)]

    def passive_rows(self) -> list[dict[int, int]]:
        return [dict(self.passive.get(i, {})) for i in sorted(self.passive)]


def _compact_dense(rows: list[dict[int, int]]) -> list[list[int]]:
    """Dense matrix over only the columns that actually occur."""
    cols = sorted({c for row in rows for c in row})
    cmap = {c: i for i, c in enumerate(cols)}
    return [[row.get(c, 0) for c in cols] for row in rows] if cols else []


# ---------------------------------------------------------------------------
# Dense Smith normal form (textbook, with optional transforms)


def _dense_snf(data: list[list[int]], want_transforms: bool):
    """Returns (divisors, U, V) with U*A*V diagonal, chain enforced."""
    D = [list(map(int, row)) for row in data]
    m = len(D)
    n = len(D[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if want_transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if want_transforms else None

    def row_op(i1, i2, a, b, c, d):
        # (row i1, row i2) <- (a*row i1 + b*row i2, c*row i1 + d*row i2)
        for M in (D, U) if want_transforms else (D,):
            Ri1, Ri2 = M[i1], M[i2]
            for k in range(len(Ri1)):
                x, y = Ri1[k], Ri2[k]
                Ri1[k] = a * x + b * y
                Ri2[k] = c * x + d * y

    def row_addmul(i, src, f):
        # row i += f * row src; never touches row src
        for M in (D, U) if want_transforms else (D,):
            Ri, Rs = M[i], M[src]
            for k in range(len(Ri)):
                Ri[k] += f * Rs[k]

    def col_op(j1, j2, a, b, c, d):
        for M in (D, V) if want_transforms else (D,):
            for row in M:
                x, y = row[j1], row[j2]
                row[j1] = a * x + b * y
                row[j2] = c * x + d * y

    def col_addmul(j, src, f):
        # col j += f * col src; never touches col src
        for M in (D, V) if want_transforms else (D,):
            for row in M:
                row[j] += f * row[src]

    def swap_rows(i1, i2):
        D[i1], D[i2] = D[i2], D[i1]
        if want_transforms:
            U[i1], U[i2] = U[i2], U[i1]

    def swap_cols(j1, j2):
        for M in (D, V) if want_transforms else (D,):
            for row in M:
                row[j1], row[j2] = row[j2], row[j1]

    def xgcd(a, b):
        x0, x1, y0, y1 = 1, 0, 0, 1
        while b:
            q, a, b = a // b, b, a % b
            x0, x1 = x1, x0 - q * x1
            y0, y1 = y1, y0 - q * y1
        if a < 0:
            a, x0, y0 = -a, -x0, -y0
        return a, x0, y0

    divisors = []
    k = 0
    while k < min(m, n):
        # smallest nonzero |entry| in the trailing submatrix
        best = None
        for i in range(k, m):
            Di = D[i]
            for j in range(k, n):
                v = Di[j]
                if v and (best is None or abs(v) < abs(D[best[0]][best[1]])):
                    best = (i, j)
                    if abs(v) == 1:
                        break
            if best and abs(D[best[0]][best[1]]) == 1:
                break
        if best is None:
            break
        swap_rows(k, best[0])
        swap_cols(k, best[1])

        while True:
            # clear column k: shear when the pivot divides, otherwise a
            # unimodular rotation that shrinks |pivot| strictly
            for i in range(k + 1, m):
                b = D[i][k]
                if b:
                    a = D[k][k]
                    if b % a == 0:
                        row_addmul(i, k, -(b // a))
                    else:
                        g, x, y = xgcd(a, b)
                        row_op(k, i, x, y, -(b // g), a // g)
            # clear row k; rotations here mix column k and re-dirty it
            dirty = False
            for j in range(k + 1, n):
                b = D[k][j]
                if b:
                    a = D[k][k]
                    if b % a == 0:
                        col_addmul(j, k, -(b // a))
                    else:
                        g, x, y = xgcd(a, b)
                        col_op(k, j, x, y, -(b // g), a // g)
                        dirty = True
            if dirty and any(D[i][k] for i in range(k + 1, m)):
                continue
            # enforce divisibility: pivot must divide the whole tail
            d = D[k][k]
            offender = None
            for i in range(k + 1, m):
                Di = D[i]
                for j in range(k + 1, n):
                    if Di[j] % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(k, offender, 1)  # pull the offending row into row k
        if D[k][k] < 0:
            # sign flip: row scaling with determinant -1
            for M in (D, U) if want_transforms else (D,):
                M[k] = [-x for x in M[k]]
        divisors.append(D[k][k])
        k += 1

    return divisors, U, V


# ---------------------------------------------------------------------------
# Public operations


def snf(a: IntMat, want_transforms: bool = False) -> SnfResult:
    """Smith normal form divisors of ``a``.

    Without transforms the +-1-sparse phase runs first and only the
    residual goes through the dense routine.  With transforms the whole
    matrix is processed densely (intended for small inputs) and
    U * a * V = diag(divisors) with |det U| = |det V| = 1.
    """
    if want_transforms:
        if a.rows == 0 or a.cols == 0:
            return SnfResult((), IntMat.identity(a.rows), IntMat.identity(a.cols))
        divisors, U, V = _dense_snf(a.to_dense(), True)
        divisors = [d for d in divisors if d]
        return SnfResult(tuple(divisors),
                         IntMat.from_dense(U, cols=a.rows),
                         IntMat.from_dense(V, cols=a.cols))
    elim = _SparseElim(a.row_dicts())
    elim.run()
    residual = _compact_dense(elim.residual_rows())
    divisors, _, _ = _dense_snf(residual, False) if residual else ([], None, None)
    divisors = [d for d in divisors if d]
    chain = [1] * elim.unit_pivots + sorted(divisors, key=abs)
    # dense path already chains its divisors; the 1s divide everything
    return SnfResult(tuple(chain))


def int_rank(a: IntMat, check_primes: Sequence[int] = (1_073_741_789,
                                                       1_073_741_783,
                                                       1_073_741_741)) -> int:
    """Exact rank over the rationals.

    Certified by unit-pivot elimination plus a dense exact finish; when
    the matrix is large, modular ranks are computed first and any
    disagreement with the exact result triggers a warning (they lower-
    bound the true rank, so a mismatch would flag an elimination bug).
    """
    mod_ranks = []
    if a.nnz > 20_000 and check_primes:
        mod_ranks = [rank_mod_p(a, p) for p in check_primes]
    elim = _SparseElim(a.row_dicts())
    elim.run()
    residual = _compact_dense(elim.residual_rows())
    divisors, _, _ = _dense_snf(residual, False) if residual else ([], None, None)
    rank = elim.unit_pivots + sum(1 for d in divisors if d)
    for p, rp in zip(check_primes, mod_ranks):
        if rp != rank:
            warnings.warn(f"rank mod {p} = {rp} disagrees with exact rank {rank}")
    return rank


def rank_mod_p(a: IntMat, p: int) -> int:
    """Rank of ``a`` over F_p by sparse elimination (machine integers)."""
    rows: dict[int, dict[int, int]] = {}
    for (r, c), v in a.entries.items():
        vv = v % p
        if vv:
            rows.setdefault(r, {})[c] = vv
    cols: dict[int, set[int]] = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    rank = 0
    while rows:
        # cheapest column, then its shortest row
        c = min(cols, key=lambda cc: (len(cols[cc]), cc))
        r = min(cols[c], key=lambda rr: (len(rows[rr]), rr))
        piv_row = rows.pop(r)
        for cc in piv_row:
            cols[cc].discard(r)
            if not cols[cc]:
                del cols[cc]
        inv = pow(piv_row[c], p - 2, p)
        for rr in sorted(cols.get(c, set())):
            target = rows[rr]
            f = target[c] * inv % p
            for cc, pv in piv_row.items():
                new = (target.get(cc, 0) - f * pv) % p
                if new:
                    target[cc] = new
                    cols.setdefault(cc, set()).add(rr)
                elif cc in target:
                    del target[cc]
                    cols[cc].discard(rr)
                    if not cols[cc]:
                        del cols[cc]
            if not target:
                del rows[rr]
        rank += 1
    return rank


def abelian_invariants(p: Presentation) -> AbelianQuotient:
    """Free rank and torsion of the abelianization of the presented group."""
    mat = relation_matrix(p)
    result = snf(mat)
    torsion = tuple(d for d in result.divisors if d > 1)
    return AbelianQuotient(free_rank=p.n_gens - result.rank, torsion=torsion)


def relation_matrix(p: Presentation) -> IntMat:
    """One row per relator: the exponent vector over the generators."""
    rows = []
    for rel in p.relators:
        ev = exponent_vector(rel, p.n_gens)
        rows.append({i: v for i, v in enumerate(ev) if v})
    return IntMat.from_rows(rows, p.n_gens)


def subgroup_image_rank(relations: IntMat, subgroup_rows: IntMat) -> int:
    """rank(stack(relations, subgroup_rows)) - rank(relations).

    This is the rank of the image of the subgroup rows in the cokernel
    of the relations, torsion ignored; no transforms are needed.  The
    subgroup rows ride along the single elimination of the relations as
    passive rows.
    """
    if relations.cols != subgroup_rows.cols:
        raise DimensionMismatchError(
            f"column counts differ: {relations.cols} vs {subgroup_rows.cols}")
    elim = _SparseElim(relations.row_dicts(), passive=subgroup_rows.row_dicts())
    elim.run()
    residual = elim.residual_rows()
    reduced = [r for r in elim.passive_rows() if r]
    rank_rel_resid = _dense_rank(residual)
    rank_stack_resid = _dense_rank(residual + reduced)
    return rank_stack_resid - rank_rel_resid


def _dense_rank(rows: list[dict[int, int]]) -> int:
    dense = _compact_dense([r for r in rows if r])
    if not dense:
        return 0
    divisors, _, _ = _dense_snf(dense, False)
    return sum(1 for d in divisors if d)

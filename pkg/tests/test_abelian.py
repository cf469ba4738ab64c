import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coindex.abelian import (
    AbelianQuotient,
    DimensionMismatchError,
    IntMat,
    abelian_invariants,
    int_rank,
    rank_mod_p,
    relation_matrix,
    snf,
    subgroup_image_rank,
)
from coindex.words import Presentation


class TestIntMat:
    def test_construction(self):
        m = IntMat.from_dense([[1, 0], [0, 2]])
        assert m.nnz == 2
        assert m.get(1, 1) == 2
        assert m.get(0, 1) == 0

    def test_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            IntMat(1, 1, {(2, 0): 1})

    def test_stack(self):
        a = IntMat.from_dense([[1, 2]])
        b = IntMat.from_dense([[3, 4]])
        s = a.stack(b)
        assert s.to_dense() == [[1, 2], [3, 4]]
        with pytest.raises(DimensionMismatchError):
            a.stack(IntMat.from_dense([[1]]))

    def test_json_roundtrip(self, tmp_path):
        m = IntMat.from_dense([[0, -3], [7, 0]])
        path = tmp_path / "m.json"
        m.save(str(path))
        back = IntMat.load(str(path))
        assert back.to_dense() == m.to_dense()


class TestSnfExamples:
    def test_diag_2_3(self):
        assert snf(IntMat.from_dense([[2, 0], [0, 3]])).divisors == (1, 6)

    def test_zero_matrix(self):
        r = snf(IntMat.zeros(3, 4))
        assert r.divisors == ()
        assert r.rank == 0

    def test_rank_one(self):
        assert snf(IntMat.from_dense([[2, 4], [4, 8]])).divisors == (2,)

    def test_identity(self):
        assert snf(IntMat.identity(4)).divisors == (1, 1, 1, 1)

    def test_transforms(self):
        a = IntMat.from_dense([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        r = snf(a, want_transforms=True)
        U = r.transform_left.to_dense()
        V = r.transform_right.to_dense()
        A = a.to_dense()
        prod = _matmul(_matmul(U, A), V)
        for i in range(3):
            for j in range(3):
                expected = r.divisors[i] if (i == j and i < len(r.divisors)) else 0
                assert prod[i][j] == expected
        assert abs(_det3(U)) == 1
        assert abs(_det3(V)) == 1


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def _det3(m):
    ((a, b, c), (d, e, f), (g, h, i)) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _brute_minor_gcd(dense, k):
    rows = range(len(dense))
    cols = range(len(dense[0]))
    g = 0
    for rsel in itertools.combinations(rows, k):
        for csel in itertools.combinations(cols, k):
            sub = [[dense[r][c] for c in csel] for r in rsel]
            g = math.gcd(g, _det(sub))
    return g


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total


@st.composite
def small_mats(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    return [[draw(st.integers(-9, 9)) for _ in range(m)] for _ in range(n)]


@given(small_mats())
@settings(max_examples=300, deadline=None)
def test_snf_gcd_of_minors(rows):
    m = IntMat.from_dense(rows)
    divisors = snf(m).divisors
    # divisibility chain
    for a, b in zip(divisors, divisors[1:]):
        assert b % a == 0
    # d1...dk equals the gcd of all k x k minors
    prod = 1
    for k, d in enumerate(divisors, start=1):
        prod *= d
        assert prod == _brute_minor_gcd(rows, k)
    if len(divisors) < min(len(rows), len(rows[0])):
        assert _brute_minor_gcd(rows, len(divisors) + 1) == 0


@given(small_mats())
@settings(max_examples=200, deadline=None)
def test_transforms_unimodular_and_diagonal(rows):
    m = IntMat.from_dense(rows)
    r = snf(m, want_transforms=True)
    U = r.transform_left.to_dense()
    V = r.transform_right.to_dense()
    prod = _matmul(_matmul(U, m.to_dense()), V)
    for i in range(len(prod)):
        for j in range(len(prod[0])):
            expected = r.divisors[i] if (i == j and i < len(r.divisors)) else 0
            assert prod[i][j] == expected
    assert abs(_det(U)) == 1
    assert abs(_det(V)) == 1
    assert r.divisors == snf(m).divisors


class TestRank:
    def test_identity(self):
        assert int_rank(IntMat.identity(5)) == 5

    def test_dependent_rows(self):
        assert int_rank(IntMat.from_dense([[2, 4], [4, 8]])) == 1

    def test_zero(self):
        assert int_rank(IntMat.zeros(2, 2)) == 0

    @given(small_mats())
    @settings(max_examples=200, deadline=None)
    def test_rank_mod_p_lower_bounds(self, rows):
        m = IntMat.from_dense(rows)
        exact = int_rank(m)
        for p in (2, 3, 1_073_741_789):
            assert rank_mod_p(m, p) <= exact
        assert rank_mod_p(m, 1_073_741_789) == exact  # huge prime: no collapse here


class TestAbelianInvariants:
    def test_single_relator(self):
        p = Presentation.from_strings(("x", "y"), ["x^2*y^3"])
        assert abelian_invariants(p) == AbelianQuotient(1, ())

    def test_free(self):
        p = Presentation.from_strings(("x",), [])
        assert abelian_invariants(p) == AbelianQuotient(1, ())

    def test_torsion(self):
        p = Presentation.from_strings(("x", "y"), ["x^2", "y^6"])
        assert abelian_invariants(p) == AbelianQuotient(0, (2, 6))

    def test_relation_matrix(self):
        p = Presentation.from_strings(("x", "y"), ["x*y*x^-1*y^-1", "x^3"])
        m = relation_matrix(p)
        # commutator has zero exponent vector and cyclic reduction may
        # drop it entirely; the surviving row is (3, 0)
        assert m.cols == 2
        dense = [row for row in m.to_dense() if any(row)]
        assert dense == [[3, 0]]


class TestSubgroupImageRank:
    def test_full_image(self):
        rel = IntMat.zeros(1, 8)
        sub = IntMat.identity(8)
        assert subgroup_image_rank(rel, sub) == 8

    def test_contained_in_row_space(self):
        rel = IntMat.from_dense([[1, 0, 0], [0, 1, 0]])
        sub = IntMat.from_dense([[3, 5, 0]])
        assert subgroup_image_rank(rel, sub) == 0

    def test_partial(self):
        rel = IntMat.from_dense([[2, 0, 0]])
        sub = IntMat.from_dense([[1, 0, 0], [0, 1, 0]])
        # first subgroup row is rationally dependent on the relation row
        assert subgroup_image_rank(rel, sub) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            subgroup_image_rank(IntMat.zeros(1, 3), IntMat.zeros(1, 4))

    @given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3),
                    min_size=1, max_size=4),
           st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3),
                    min_size=1, max_size=4),
           st.randoms(use_true_random=False))
    @settings(max_examples=150, deadline=None)
    def test_invariance_under_shuffles_and_relation_rows(self, rel_rows, sub_rows, rng):
        rel = IntMat.from_dense(rel_rows)
        sub = IntMat.from_dense(sub_rows)
        base = subgroup_image_rank(rel, sub)

        shuffled_rel = list(rel_rows)
        rng.shuffle(shuffled_rel)
        shuffled_sub = list(sub_rows)
        rng.shuffle(shuffled_sub)
        assert subgroup_image_rank(IntMat.from_dense(shuffled_rel),
                                   IntMat.from_dense(shuffled_sub)) == base

        # adding relation rows to the subgroup rows changes nothing
        augmented = IntMat.from_dense(sub_rows + rel_rows)
        assert subgroup_image_rank(rel, augmented) == base

    def test_oracle_against_dense_ranks(self):
        # rank(stack) - rank(rel) computed independently with fractions
        import fractions

        rel_rows = [[2, 4, 0], [0, 3, 3]]
        sub_rows = [[1, 2, 0], [0, 0, 5], [2, 7, 3]]
        rel = IntMat.from_dense(rel_rows)
        sub = IntMat.from_dense(sub_rows)
        got = subgroup_image_rank(rel, sub)
        assert got == _q_rank(rel_rows + sub_rows) - _q_rank(rel_rows)


def _q_rank(rows):
    from fractions import Fraction

    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    col = 0
    n_rows, n_cols = len(m), len(m[0])
    while rank < n_rows and col < n_cols:
        piv = next((i for i in range(rank, n_rows) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for i in range(n_rows):
            if i != rank and m[i][col]:
                f = m[i][col] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


class TestKernelStage:
    def test_free_rank_eight(self, kernel_presentation):
        inv = abelian_invariants(kernel_presentation.presentation)
        assert inv.free_rank == 8
        assert inv.torsion == ()

    def test_relation_rank(self, kernel_presentation):
        m = relation_matrix(kernel_presentation.presentation)
        assert m.cols == 4033
        assert rank_mod_p(m, 1_073_741_789) == 4025

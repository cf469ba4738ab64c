"""Acceptance suite.

One test per acceptance criterion, each asserting the exact integers and
the stated runtime budget, and printing a PASS line (visible with -v -s
or in the captured output).  Property criteria run 1000+ cases each
under hypothesis.
"""

import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coindex.abelian import (
    IntMat,
    abelian_invariants,
    relation_matrix,
    snf,
    subgroup_image_rank,
)
from coindex.congruence import (
    FiniteMatGroup,
    cayley_coset_table,
    closure_order,
    congruence_index_bound,
    multi_modulus_bound,
    orbit_stabilizer_schreier,
    reduce_group,
)
from coindex.eiszeta import EisensteinInt, builtin_dataset, evaluate_matrix_word
from coindex.ffq import MatFq2, make_reduction, reduce_matrix
from coindex.pipeline import CertifyConfig, certify_infinite_index
from coindex.reidemeister import rs_rewrite, schreier_transversal, subgroup_presentation
from coindex.toddcoxeter import Completed, Exceeded, TCConfig, coset_enumerate
from coindex.words import Presentation, Word, free_reduce, substitute


def _report(criterion, elapsed, detail):
    print(f"ACCEPTANCE {criterion}: PASS ({elapsed:.2f}s) {detail}")


def test_criterion_1_dataset_verification():
    t0 = time.perf_counter()
    ds = builtin_dataset()
    ds.verify()
    reduced = ds.reduced_presentation()
    elapsed = time.perf_counter() - t0
    assert len(ds.swan_presentation.relators) == 19
    assert len(ds.m_words) == 6
    assert reduced.gen_names == ("t", "a", "w")
    assert elapsed < 1.0
    _report(1, elapsed, "6 words match matrices, 19 relators vanish")


def test_criterion_2_mod2_stage(dataset):
    t0 = time.perf_counter()
    f = make_reduction(2)
    s = reduce_group(dataset.s_gens, f)
    gamma = reduce_group(dataset.gamma_gens, f)
    order_s = closure_order(s, 10_000)
    order_gamma = closure_order(gamma, 10_000)
    bound = congruence_index_bound(s, gamma)
    elapsed = time.perf_counter() - t0
    assert order_s == 12
    assert order_gamma == 180
    assert bound == 15
    assert elapsed < 1.0
    _report(2, elapsed, "|phi(S)|=12 |phi(Gamma)|=180 bound=15")


def test_criterion_3_mod7_stage(dataset):
    t0 = time.perf_counter()
    f = make_reduction(7)
    s = reduce_group(dataset.s_gens, f)
    gamma = reduce_group(dataset.gamma_gens, f)
    order_gamma = closure_order(gamma, 10_000)
    order_s = closure_order(s, 10_000)
    orbit = orbit_stabilizer_schreier(s.gens, MatFq2.identity(f))
    elapsed = time.perf_counter() - t0
    assert order_gamma == 2016
    assert order_s == 24
    assert len(orbit.points) == 24
    assert len(orbit.schreier_gens) == 121
    assert elapsed < 5.0
    _report(3, elapsed, "|phi(Gamma)|=2016 |phi(S)|=24 orbit=24 schreier=121")


def test_criterion_4_kernel_presentation(dataset, reduced_presentation):
    t0 = time.perf_counter()
    f = make_reduction(7)
    gamma = FiniteMatGroup(
        f, {k: reduce_matrix(dataset.gamma_gens[k], f)
            for k in reduced_presentation.gen_names})
    table = cayley_coset_table(gamma, cap=10_000)
    rs = subgroup_presentation(reduced_presentation, table)
    assert rs.presentation.n_gens == 4033  # 3*2016 - 2015

    rng = random.Random(2016)
    sample = rng.sample(range(len(rs.presentation.relators)), 100)
    for k in sample:
        word = rs.ambient_word(rs.presentation.relators[k])
        m = evaluate_matrix_word(word, dataset.gamma_gens,
                                 reduced_presentation.gen_names)
        assert m.is_identity()
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report(4, elapsed, "4033 schreier generators, 100 sampled relators sound")


def test_criterion_5_abelianization(kernel_presentation):
    t0 = time.perf_counter()
    inv = abelian_invariants(kernel_presentation.presentation)
    elapsed = time.perf_counter() - t0
    assert inv.free_rank == 8
    assert inv.torsion == ()  # reported; none expected
    assert elapsed < 600.0
    _report(5, elapsed, f"free rank 8, torsion {list(inv.torsion)}")


def test_criterion_6_subgroup_rank_and_verdict(dataset, mod7, kernel_presentation):
    t0 = time.perf_counter()
    f = mod7["field"]
    orbit = orbit_stabilizer_schreier(mod7["s"].gens, MatFq2.identity(f))
    m_images = {i: dataset.m_words[k] for i, k in enumerate(orbit.alphabet)}
    rows = []
    n_gens = kernel_presentation.presentation.n_gens
    for w in orbit.schreier_gens:
        rewritten = rs_rewrite(substitute(w, m_images), mod7["table"],
                               kernel_presentation.transversal)
        ev = {}
        for idx, sign in rewritten.letters:
            ev[idx] = ev.get(idx, 0) + sign
        rows.append({k: v for k, v in ev.items() if v})
    sub = IntMat.from_rows(rows, n_gens)
    relmat = relation_matrix(kernel_presentation.presentation)
    rank = subgroup_image_rank(relmat, sub)
    assert rank == 3

    report = certify_infinite_index(CertifyConfig(), dataset)
    elapsed = time.perf_counter() - t0
    assert report.verdict == "infinite"
    assert report.stages["abelian"]["subgroup_rank"] == 3
    assert report.stages["abelian"]["free_rank"] == 8
    _report(6, elapsed, "subgroup image rank 3 < free rank 8 -> infinite")


def test_criterion_7_todd_coxeter(dataset, reduced_presentation):
    t0 = time.perf_counter()
    subgens = [dataset.m_words[k] for k in dataset.m_words]
    result = coset_enumerate(reduced_presentation, subgens,
                             TCConfig(max_cosets=1_000_000))
    assert isinstance(result, Exceeded)
    assert result.cosets_allocated == 1_000_000

    p5 = Presentation.from_strings(("x",), ["x^5"])
    small = coset_enumerate(p5, [], TCConfig(max_cosets=100))
    elapsed = time.perf_counter() - t0
    assert isinstance(small, Completed)
    assert small.index == 5
    _report(7, elapsed, "Gamma/S exceeded at 1e6; <x|x^5> completed(5)")


# ---------------------------------------------------------------------------
# Criterion 8: property suites, >= 1000 cases each


eis = st.builds(EisensteinInt, st.integers(-10_000, 10_000),
                st.integers(-10_000, 10_000))


@given(eis, eis)
@settings(max_examples=1000, deadline=None)
def test_criterion_8a_norm_multiplicativity(x, y):
    assert (x * y).norm() == x.norm() * y.norm()


_DS8 = builtin_dataset()
_ALPHA8 = _DS8.swan_presentation.gen_names
_POOL8 = None


def _pool8():
    global _POOL8
    if _POOL8 is None:
        rng = random.Random(8)
        mats = list(_DS8.gamma_gens.values()) + list(_DS8.s_gens.values())
        pool = []
        for _ in range(64):
            m = mats[rng.randrange(len(mats))]
            for _ in range(rng.randrange(4)):
                m = m * mats[rng.randrange(len(mats))]
            pool.append(m)
        _POOL8 = pool
    return _POOL8


@given(st.integers(0, 63), st.integers(0, 63), st.sampled_from((2, 3, 5, 7, 13)))
@settings(max_examples=1000, deadline=None)
def test_criterion_8b_reduction_homomorphism(i, j, p):
    pool = _pool8()
    f = make_reduction(p)
    x, y = pool[i], pool[j]
    assert reduce_matrix(x * y, f) == reduce_matrix(x, f) * reduce_matrix(y, f)


@given(st.sampled_from((2, 3)),
       st.sets(st.sampled_from(("m1", "m2", "mi", "mj", "mt", "t", "a", "w")),
               min_size=1, max_size=3),
       st.integers(0, 63))
@settings(max_examples=1000, deadline=None)
def test_criterion_8c_lagrange_orbit_divisibility(p, names, seed_i):
    f = make_reduction(p)
    pool = {**_DS8.s_gens, **_DS8.gamma_gens}
    g = reduce_group({k: pool[k] for k in sorted(names)}, f)
    order = closure_order(g, 10_000)
    seed = reduce_matrix(_pool8()[seed_i], f)
    orbit = orbit_stabilizer_schreier(g.gens, seed)
    assert order % len(orbit.points) == 0


@st.composite
def _mats4(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    return [[draw(st.integers(-9, 9)) for _ in range(m)] for _ in range(n)]


def _brute_minor_gcd(dense, k):
    import itertools
    import math

    def det(mm):
        if len(mm) == 1:
            return mm[0][0]
        return sum((-1) ** j * mm[0][j]
                   * det([row[:j] + row[j + 1:] for row in mm[1:]])
                   for j in range(len(mm)))

    g = 0
    for rsel in itertools.combinations(range(len(dense)), k):
        for csel in itertools.combinations(range(len(dense[0])), k):
            g = math.gcd(g, det([[dense[r][c] for c in csel] for r in rsel]))
    return g


@given(_mats4())
@settings(max_examples=1000, deadline=None)
def test_criterion_8d_snf_divisor_chain_and_minors(rows):
    divisors = snf(IntMat.from_dense(rows)).divisors
    for a, b in zip(divisors, divisors[1:]):
        assert b % a == 0
    prod = 1
    for k, d in enumerate(divisors, start=1):
        prod *= d
        assert prod == _brute_minor_gcd(rows, k)


@given(st.integers(1, 24), st.integers(0, 23))
@settings(max_examples=1000, deadline=None)
def test_criterion_8e_coset_table_column_audit(n, k):
    p = Presentation.from_strings(("x",), [f"x^{n}"])
    sub = [p.parse(f"x^{k % n}")] if k % n else []
    result = coset_enumerate(p, sub, TCConfig(max_cosets=200))
    assert isinstance(result, Completed)
    result.table.validate()


_KERNEL8 = None


def _kernel8():
    global _KERNEL8
    if _KERNEL8 is None:
        red = _DS8.reduced_presentation()
        f = make_reduction(7)
        gamma = FiniteMatGroup(
            f, {k: reduce_matrix(_DS8.gamma_gens[k], f) for k in red.gen_names})
        table = cayley_coset_table(gamma, cap=10_000)
        tv = schreier_transversal(table)
        _KERNEL8 = (table, tv, red.n_gens)
    return _KERNEL8


@given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from((1, -1))), max_size=10),
       st.lists(st.tuples(st.integers(0, 2), st.sampled_from((1, -1))), max_size=10))
@settings(max_examples=1000, deadline=None)
def test_criterion_8f_rs_rewrite_homomorphism(lu, lv):
    table, tv, n_gens = _kernel8()
    u = _close_into_kernel(Word(tuple(lu)), table, tv)
    v = _close_into_kernel(Word(tuple(lv)), table, tv)
    lhs = rs_rewrite(u * v, table, tv)
    rhs = free_reduce(rs_rewrite(u, table, tv) * rs_rewrite(v, table, tv))
    assert lhs == rhs


def _close_into_kernel(w, table, tv):
    c = table.trace(0, w)
    return free_reduce(w * tv.reps[c].inverse())


def test_criterion_8_reported():
    _report(8, 0.0, "six property suites at 1000 cases (see preceding tests)")


def test_criterion_9_multi_modulus(dataset):
    t0 = time.perf_counter()
    r2 = multi_modulus_bound([2], dataset.s_gens, dataset.gamma_gens)
    r37 = multi_modulus_bound([3, 7], dataset.s_gens, dataset.gamma_gens)
    elapsed = time.perf_counter() - t0
    assert r2.bound == 15
    assert r37.bound >= 84
    assert r37.bound == 1008  # frozen from the first tuple-closure computation
    for m in r37.per_modulus:
        assert r37.bound >= m.index_bound
    _report(9, elapsed, f"bound({{2}})=15, bound({{3,7}})={r37.bound} >= 84")

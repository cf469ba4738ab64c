import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coindex.eiszeta import evaluate_matrix_word
from coindex.ffq import (
    FqElt,
    MatFq2,
    NotPrimeError,
    is_prime,
    make_reduction,
    reduce_matrix,
)
from coindex.words import Word


class TestMakeReduction:
    def test_mod7_degree1_smallest_root(self):
        f = make_reduction(7)
        assert (f.degree, f.zeta) == (1, FqElt(2, 0))

    def test_mod2_quadratic_extension(self):
        f = make_reduction(2)
        assert (f.degree, f.size, f.zeta) == (2, 4, FqElt(0, 1))

    def test_mod3_ramified(self):
        f = make_reduction(3)
        assert (f.degree, f.zeta) == (1, FqElt(1, 0))
        assert f.ramified

    def test_split_vs_inert(self):
        assert make_reduction(13).degree == 1
        assert make_reduction(31).degree == 1
        assert make_reduction(5).degree == 2
        assert make_reduction(11).degree == 2

    def test_rejects_nonprimes(self):
        for n in (1, 4, 169, 361, 1000):
            with pytest.raises(NotPrimeError):
                make_reduction(n)

    def test_zeta_cubes_to_one(self):
        for p in (2, 3, 5, 7, 13, 31, 97, 607):
            f = make_reduction(p)
            assert f.pow(f.zeta, 3) == f.one()
            if p != 3:
                # z^2 + z + 1 = 0
                acc = f.add(f.add(f.mul(f.zeta, f.zeta), f.zeta), f.one())
                assert acc == f.zero()
            else:
                z1 = f.sub(f.zeta, f.one())
                assert f.mul(z1, z1) == f.zero()


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 97, 607, 1_073_741_789}
    for n in primes:
        assert is_prime(n)
    for n in (0, 1, 9, 15, 169, 361, 1_073_741_789 * 3):
        assert not is_prime(n)


class TestFieldArithmetic:
    def test_inverse_all_nonzero(self):
        for p in (2, 3, 7):
            f = make_reduction(p)
            for x in f.elements():
                if x == f.zero():
                    with pytest.raises(ZeroDivisionError):
                        f.inv(x)
                else:
                    assert f.mul(x, f.inv(x)) == f.one()

    def test_field_size(self):
        assert sum(1 for _ in make_reduction(2).elements()) == 4
        assert sum(1 for _ in make_reduction(7).elements()) == 7

    def test_json_form(self):
        assert FqElt(3, 0).to_json_obj() == [3]
        assert FqElt(0, 1).to_json_obj() == [0, 1]


class TestReduceMatrix:
    def test_t_mod7(self, dataset):
        f = make_reduction(7)
        got = reduce_matrix(dataset.gamma_gens["t"], f)
        assert got == MatFq2.of(f, f.from_int(1), f.from_int(1),
                                f.from_int(0), f.from_int(1))

    def test_mt_mod7_is_2I(self, dataset):
        f = make_reduction(7)
        got = reduce_matrix(dataset.s_gens["mt"], f)
        assert got == MatFq2.of(f, f.from_int(2), f.zero(), f.zero(), f.from_int(2))

    def test_w_mod2(self, dataset):
        f = make_reduction(2)
        got = reduce_matrix(dataset.gamma_gens["w"], f)
        assert got == MatFq2.of(f, FqElt(0, 1), f.zero(), f.zero(), f.one())

    def test_unit_det_never_degenerates(self, dataset):
        for p in (2, 3, 5, 7, 13, 31):
            f = make_reduction(p)
            for m in {**dataset.s_gens, **dataset.gamma_gens}.values():
                assert reduce_matrix(m, f).is_invertible()


word_strategy = st.lists(st.tuples(st.integers(0, 5), st.sampled_from((1, -1))),
                         max_size=8).map(lambda ls: Word(tuple(ls)))


@given(word_strategy, word_strategy, st.sampled_from((2, 3, 7, 13)))
@settings(max_examples=300, deadline=None)
def test_reduction_is_multiplicative(u, v, p):
    from coindex.eiszeta import builtin_dataset

    ds = builtin_dataset()
    alpha = ds.swan_presentation.gen_names
    f = make_reduction(p)
    x = evaluate_matrix_word(u, ds.gamma_gens, alpha)
    y = evaluate_matrix_word(v, ds.gamma_gens, alpha)
    assert reduce_matrix(x * y, f) == reduce_matrix(x, f) * reduce_matrix(y, f)


class TestMatFq2:
    def test_encode_decode_roundtrip(self, dataset):
        for p in (2, 7, 31):
            f = make_reduction(p)
            for m in dataset.gamma_gens.values():
                red = reduce_matrix(m, f)
                assert MatFq2.decode(f, red.encode()) == red

    def test_encode_injective_small(self):
        f = make_reduction(2)
        mats = set()
        keys = set()
        for a in f.elements():
            for b in f.elements():
                m = MatFq2.of(f, a, b, f.one(), f.zero())
                mats.add(m)
                keys.add(m.encode())
        assert len(keys) == len(mats)

    def test_inverse(self, dataset):
        f = make_reduction(7)
        for m in dataset.s_gens.values():
            red = reduce_matrix(m, f)
            assert red * red.inverse() == MatFq2.identity(f)

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fglab import (
    PrimeConfig,
    TruncatedSeries,
    comp_inverse,
    compose,
    cyclotomic_ring,
    derivative,
    embed,
    eval_at,
    identity,
    iterate,
    reciprocal,
    restrict,
    weierstrass_degree,
    weierstrass_prep,
)
from fglab.errors import (
    DenominatorCapExceeded,
    DivergentEvaluation,
    InfiniteHeightAtCap,
    InnerConstantTermNonzero,
    NonUnitDerivative,
)

from conftest import dict_residues, residues
from oracles import dcompose, dmul, oracle_comp_inverse, random_poly_dict


def series(cfg, d, dct, deg=None, prec=None):
    return TruncatedSeries.from_terms(cfg, d, dct, deg, prec)


def test_catalan_inverse():
    # X - X^2 is inverted by the Catalan generating function
    cfg = PrimeConfig(5, 10, 8)
    g = comp_inverse(series(cfg, 1, {1: 1, 2: -1}))
    assert [g[k].to_int() for k in range(1, 9)] == [1, 1, 2, 5, 14, 42, 132, 429]


@pytest.mark.parametrize("seed", range(4))
def test_comp_inverse_against_oracle(seed):
    rng = random.Random(seed)
    p = [2, 3, 5, 7][seed]
    cfg = PrimeConfig(p, 12, 7)
    h = {(1,): 1 + p * rng.randint(0, 5)}
    h.update({(k,): rng.randint(-9, 9) for k in range(2, 8)})
    ref = oracle_comp_inverse({e: Fraction(c) for e, c in h.items()}, 7)
    got = comp_inverse(series(cfg, 1, h))
    assert residues(got, 12) == dict_residues(ref, p, 12)


def test_comp_inverse_errors():
    cfg = PrimeConfig(3, 6, 5)
    with pytest.raises(NonUnitDerivative):
        comp_inverse(series(cfg, 1, {1: 3, 2: 1}))
    with pytest.raises(InnerConstantTermNonzero):
        comp_inverse(series(cfg, 1, {0: 1, 1: 1}))


def test_compose_against_naive_substitution(backend):
    rng = random.Random(7)
    cfg = PrimeConfig(3, 15, 6)
    for d_out, d_in in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)]:
        outer = random_poly_dict(rng, d_out, 6)
        inners = [random_poly_dict(rng, d_in, 6, const=False) for _ in range(d_out)]
        ref = dcompose(outer, inners, 6)
        got = compose(series(cfg, d_out, outer), [series(cfg, d_in, q) for q in inners])
        assert residues(got, 15) == dict_residues(ref, 3, 15)


def test_compose_rejects_constant_inner():
    cfg = PrimeConfig(2, 8, 4)
    X = TruncatedSeries.variable(cfg)
    with pytest.raises(InnerConstantTermNonzero):
        compose(X * X, [X + 1])


def test_identity_and_iterate():
    cfg = PrimeConfig(2, 10, 8)
    h = series(cfg, 1, {1: 3, 2: 1})
    assert compose(h, [identity(cfg)]) == h
    h3 = iterate(h, 3)
    assert h3.equal_at(compose(h, [compose(h, [h])]))


def test_mul_matches_dict(backend):
    rng = random.Random(11)
    cfg = PrimeConfig(5, 12, 7)
    for d in (1, 2, 3):
        a, b = random_poly_dict(rng, d, 7), random_poly_dict(rng, d, 7)
        got = series(cfg, d, a) * series(cfg, d, b)
        assert residues(got, 12) == dict_residues(dmul(a, b, 7), 5, 12)


def test_precision_of_product():
    cfg = PrimeConfig(3, 10, 4)
    a = series(cfg, 1, {1: 9}, prec=6)       # valuation 2, known mod 3^6
    b = series(cfg, 1, {1: 1, 2: 1}, prec=8)
    assert (a * b).prec == 6   # min(6 + v(b), 8 + v(a)) with v(a) = 2, v(b) = 0


def test_fractional_coefficients_and_cap():
    cfg = PrimeConfig(2, 10, 4, D=2)
    s = series(cfg, 1, {1: Fraction(1, 4)})
    assert s.shift == -2
    with pytest.raises(DenominatorCapExceeded):
        series(cfg, 1, {1: Fraction(1, 8)})
    with pytest.raises(ValueError):
        series(cfg, 1, {1: Fraction(1, 3)})


def test_embed_restrict_derivative():
    cfg = PrimeConfig(3, 8, 5)
    h = series(cfg, 1, {1: 1, 3: 2})
    e = embed(h, 2, 1)
    assert e[(0, 3)].to_int() == 2 and e[(3, 0)].to_int() == 0
    assert restrict(e, 1) == h
    F = series(cfg, 2, {(1, 0): 1, (0, 1): 1, (2, 1): 4})
    dY = derivative(F, 1)
    assert dY[(0, 0)].to_int() == 1 and dY[(2, 0)].to_int() == 4


def test_reciprocal():
    cfg = PrimeConfig(2, 10, 8)
    u = series(cfg, 1, {0: 1, 1: 1})
    r = reciprocal(u)
    assert [r[k].to_int() % 2**10 for k in range(4)] == [1, 2**10 - 1, 1, 2**10 - 1]


class TestWeierstrass:
    def test_degree_two_example(self):
        cfg = PrimeConfig(2, 12, 8)
        h = series(cfg, 1, {1: 6, 2: 5, 3: 1})
        unit, dist, n = weierstrass_prep(h)
        assert n == 2 == weierstrass_degree(h)
        assert dist.poly_degree() == 2 and dist[2].to_int() == 1
        assert all(dist[k].to_int() % 2 == 0 for k in range(2))
        back = (unit * dist).truncate(h.deg - n)
        assert back.equal_at(h.truncate(h.deg - n))

    def test_multiplication_by_p_height(self):
        cfg = PrimeConfig(3, 10, 12)
        X = TruncatedSeries.variable(cfg)
        assert weierstrass_degree((1 + X) ** 3 - 1) == 3

    def test_infinite_height(self):
        cfg = PrimeConfig(3, 10, 6)
        h = series(cfg, 1, {1: 3, 4: 9})
        assert weierstrass_degree(h) is None
        with pytest.raises(InfiniteHeightAtCap):
            weierstrass_prep(h)


class TestEval:
    def test_polynomial_at_torsion_point(self):
        cfg = PrimeConfig(3, 10, 12)
        R = cyclotomic_ring(cfg, 1)
        X = TruncatedSeries.variable(cfg)
        val, g = eval_at((1 + X) ** 3 - 1, R.gen)
        assert val.is_zero() and g == R.cap

    def test_integral_tail_limits_guarantee(self):
        cfg = PrimeConfig(2, 10, 6)
        R = cyclotomic_ring(cfg, 2)  # e = 2
        h = series(cfg, 1, {1: 1}, prec=10)
        _, g = eval_at(h, R.gen)
        assert g == 7   # first omitted term X^7 has valuation 7 in T-units

    def test_outside_disc(self):
        cfg = PrimeConfig(2, 10, 6)
        R = cyclotomic_ring(cfg, 1)
        h = series(cfg, 1, {1: 1}, prec=10)
        with pytest.raises(DivergentEvaluation):
            eval_at(h, R.one())
        with pytest.raises(DivergentEvaluation):
            eval_at(h.with_tail("unknown"), R.gen)


def test_first_difference_graded_order():
    cfg = PrimeConfig(3, 8, 4)
    a = series(cfg, 2, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    b = series(cfg, 2, {(1, 0): 1, (0, 1): 1, (2, 0): 1, (0, 2): 5})
    assert a.first_difference(b) == (2, 0)
    assert a.first_difference(a) is None


@given(st.integers(0, 2**20), st.integers(0, 2**20), st.integers(0, 2**20))
def test_composition_associative(a, b, c):
    cfg = PrimeConfig(2, 12, 6)
    f = series(cfg, 1, {1: 1 + 2 * (a % 7), 2: a % 5, 3: b % 11})
    g = series(cfg, 1, {1: 3, 2: b % 9, 4: c % 13})
    h = series(cfg, 1, {1: c % 17, 2: 1})
    assert compose(f, [compose(g, [h])]).equal_at(compose(compose(f, [g]), [h]))


@given(st.lists(st.integers(-50, 50), min_size=6, max_size=6))
def test_comp_inverse_round_trip(cs):
    cfg = PrimeConfig(3, 10, 6)
    h = series(cfg, 1, {k + 1: c for k, c in enumerate(cs)} | {1: 3 * cs[0] + 1})
    g = comp_inverse(h)
    assert compose(h, [g]).equal_at(identity(cfg, 6))
    assert compose(g, [h]).equal_at(identity(cfg, 6))

import math
from fractions import Fraction

import numpy as np
import pytest

from polycorr.correlator import CorrelatorSpec, TimeGrid, correlator
from polycorr.errors import DegreeCapError, DomainError
from polycorr.generator import PolyModel
from polycorr.pricing import (
    AsianSpec,
    asian_price_poly,
    average_power_expansion,
    exp_integrated_moment,
    exp_integrated_terms,
)

from .conftest import REF_OU, REF_Y, monomial_polys


def test_expansion_examples():
    terms = average_power_expansion(1, 2)
    assert [(t.exponents, t.alpha) for t in terms] == [((2, 0), 0.25), ((1, 1), 0.5), ((0, 2), 0.25)]
    [t0] = average_power_expansion(3, 0)
    assert t0.exponents == (0, 0, 0, 0) and t0.alpha == 1.0
    t1 = average_power_expansion(3, 1)
    assert len(t1) == 4 and all(t.alpha == 0.25 for t in t1)


@pytest.mark.parametrize("m", range(0, 4))
@pytest.mark.parametrize("k", range(0, 7))
def test_expansion_weights_sum_to_one(m, k):
    terms = average_power_expansion(m, k)
    assert all(sum(t.exponents) == k for t in terms)
    assert len(terms) == math.comb(k + m, m)
    total = sum(Fraction(t.alpha).limit_denominator(10 ** 12) for t in terms)
    assert total == 1


def test_expansion_reproduces_power_of_average(rng):
    y = rng.normal(size=3)
    lhs = y.mean() ** 4
    rhs = sum(t.alpha * np.prod(y ** np.array(t.exponents)) for t in average_power_expansion(2, 4))
    assert math.isclose(lhs, rhs, rel_tol=1e-13)


def spec(payoff, m=1, r=0.05, y=REF_Y, model=REF_OU):
    return AsianSpec(model, r, TimeGrid(0, [1 + 0.5 * j for j in range(m + 1)]), payoff, y)


def test_constant_payoff():
    s = spec([2.0], m=2)
    assert math.isclose(asian_price_poly(s), 2.0 * math.exp(-0.05 * 2.0))


def test_linear_payoff_stationary_ou():
    s = spec([0, 1], m=2)
    assert math.isclose(asian_price_poly(s), 0.15 * math.exp(-0.05 * 2.0), rel_tol=1e-12)


def test_quadratic_payoff_by_hand():
    s = spec([0, 0, 1], m=1, y=0.4)
    grid = s.grid
    c = lambda pw: correlator(CorrelatorSpec(REF_OU, monomial_polys(pw), grid, 0.4))
    expected = math.exp(-0.05 * 1.5) * (0.25 * c((2, 0)) + 0.5 * c((1, 1)) + 0.25 * c((0, 2)))
    assert math.isclose(asian_price_poly(s), expected, rel_tol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_power_payoff_matches_manual_combination(m, k):
    model = PolyModel(0.3, -1.0, 0.2, 0.1, 0.05)
    s = spec([0] * k + [1], m=m, r=0.02, y=0.7, model=model)
    total = 0.0
    for term in average_power_expansion(m, k):
        total += term.alpha * correlator(
            CorrelatorSpec(model, monomial_polys(term.exponents), s.grid, 0.7))
    expected = math.exp(-0.02 * s.maturity) * total
    assert math.isclose(asian_price_poly(s), expected, rel_tol=1e-12)


def test_degree_cap():
    s = spec([0, 0, 0, 0, 1], m=3)
    with pytest.raises(DegreeCapError) as err:
        asian_price_poly(s)
    assert err.value.required == 16 and "16" in str(err.value)
    assert asian_price_poly(s, degree_cap=16) > 0


def test_asian_from_dict():
    d = {"model": {"b0": 0.75, "b1": -5.0, "sigma0": 0.01}, "r": 0.0, "t": 0,
         "s": [1.0, 1.5], "payoff": [0, 1], "y": 0.15}
    assert math.isclose(asian_price_poly(AsianSpec.from_dict(d)), 0.15, rel_tol=1e-12)


def test_exp_moment_trivial_cases():
    assert exp_integrated_moment(REF_OU, 0.0, 0, 1, 4, y=REF_Y) == 1.0
    v = exp_integrated_moment(REF_OU, -0.4, 0, 2, 1, y=REF_Y)
    assert math.isclose(v, 1 - 0.4 * 0.15 * 2, rel_tol=1e-12)
    with pytest.raises(DomainError):
        exp_integrated_moment(REF_OU, 0.1, 0, 1, 2, y=REF_Y)


def test_exp_moment_deterministic_model():
    b0, b1, y, lam = 1.0, -2.0, 2.0, -0.8
    integral = -b0 / b1 + (y + b0 / b1) * (1 - math.exp(b1)) / (-b1)
    exact = math.exp(lam * integral)
    v = exp_integrated_moment(PolyModel(b0, b1), lam, 0, 1, 5, 6, y=y)
    # the first omitted term bounds the truncation error
    assert abs(v - exact) <= 2 * abs(lam * integral) ** 6 / math.factorial(6)


def test_exp_moment_ou_second_term():
    # ordered integral of E[Y(u) Y(v)] = mu^2 + Var(u) e^{b1 (v - u)} over u < v,
    # by nested one-dimensional quadrature (the integrand is smooth on the triangle)
    b1, s0, T = -5.0, 0.01, 1.0
    xs, ws = np.polynomial.legendre.leggauss(30)
    second = 0.0
    for xv, wv in zip(xs, ws):
        v = 0.5 * (xv + 1) * T
        u = 0.5 * (xs + 1) * v
        inner = np.sum(0.5 * ws * v * (0.15 ** 2 + s0 * (1 - np.exp(2 * b1 * u)) / (-2 * b1)
                                       * np.exp(b1 * (v - u))))
        second += 0.5 * wv * T * inner
    terms = exp_integrated_terms(REF_OU, -1.0, 0, T, 2, 12, y=REF_Y)
    assert math.isclose(terms[2], second, rel_tol=1e-10)


def test_exp_moment_monotone_in_lambda():
    vals = [exp_integrated_moment(REF_OU, lam, 0, 1, 4, 5, y=REF_Y)
            for lam in (0.0, -0.5, -1.0, -2.0, -4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))

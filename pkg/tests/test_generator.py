import math

import mpmath
import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from polycorr.errors import DomainError, ExpmConditionError, ShapeError
from polycorr.generator import (
    BasisChange,
    PolyModel,
    change_of_basis,
    expm_conditions,
    expm_dense,
    generator_diagonal,
    generator_expm,
    generator_expm_recursive,
    generator_matrix,
    hermite_basis_matrix,
    jump_moments_from_sde,
    recursion_amplification,
    validate_polynomial,
)

from .conftest import REF_OU

x = sympy.Symbol("x")


def sympy_generator_rows(model, n):
    """Apply the generator to each monomial symbolically and read off coefficients."""
    drift = model.b0 + model.b1 * x
    diff = model.sigma0 + model.sigma1 * x + model.sigma2 * x ** 2
    xi = dict(model.xi)
    G = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        f = x ** k
        out = drift * sympy.diff(f, x) + sympy.Rational(1, 2) * diff * sympy.diff(f, x, 2)
        for (m, i), v in xi.items():
            out += sympy.diff(f, x, m) / sympy.factorial(m) * v * x ** i
        poly = sympy.Poly(sympy.expand(out), x)
        for (deg,), c in poly.terms():
            G[k, deg] = float(c)
    return G


def mp_expm(G, t):
    mpmath.mp.dps = 50
    return np.array(mpmath.expm(mpmath.matrix(G.tolist()) * t).tolist(), dtype=float)


def test_generator_matrix_ou_by_hand():
    G = generator_matrix(REF_OU, 2)
    expected = [[0, 0, 0], [0.75, -5, 0], [0.01, 1.5, -10]]
    assert np.allclose(G, expected, rtol=0, atol=1e-15)


def test_generator_matrix_is_lower_triangular_with_zero_first_row(rng):
    G = generator_matrix(PolyModel(*rng.normal(size=5)), 6)
    assert np.array_equal(G, np.tril(G))
    assert not G[0].any()


@pytest.mark.parametrize("seed", range(5))
def test_generator_matches_symbolic_action(seed):
    r = np.random.default_rng(seed)
    xi = {(2, 0): r.normal(), (2, 2): r.normal(), (3, 1): r.normal(), (4, 4): r.normal()}
    model = PolyModel(*r.normal(size=5), xi=xi)
    assert np.allclose(generator_matrix(model, 4), sympy_generator_rows(model, 4),
                       rtol=1e-13, atol=1e-13)


def test_jump_table_order_must_cover_degree():
    model = PolyModel(0.0, -1.0, xi={(2, 0): 1.0})
    generator_matrix(model, 2)
    with pytest.raises(DomainError):
        generator_matrix(model, 3)


def test_bad_jump_index_rejected():
    with pytest.raises(DomainError):
        PolyModel(0.0, 1.0, xi={(1, 0): 1.0})
    with pytest.raises(DomainError):
        PolyModel(0.0, 1.0, xi={(2, 3): 1.0})


def test_model_is_hashable_and_roundtrips():
    model = PolyModel(1, 2, 3, 4, 5, xi={(2, 1): 0.5})
    assert PolyModel.from_dict(model.to_dict()) == model
    assert hash(model) == hash(PolyModel.from_dict(model.to_dict()))
    assert model.max_jump_order == 2 and model.has_jumps


def test_validate_polynomial():
    rep = validate_polynomial(PolyModel(0, 1, xi={(3, 0): 1.0}))
    assert rep.max_jump_order == 3 and rep.has_jumps
    with pytest.raises(DomainError):
        validate_polynomial(PolyModel(float("nan"), 1.0))


def test_jump_moments_from_sde():
    mm = {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 3.0}
    assert jump_moments_from_sde(mm, 2) == {(2, 0): 1.0, (2, 1): 4.0, (2, 2): 3.0}
    with pytest.raises(DomainError):
        jump_moments_from_sde(mm, 3)


def test_generator_diagonal():
    assert generator_diagonal(REF_OU, 3).tolist() == [-5.0, -10.0, -15.0]


def test_expm_conditions():
    assert expm_conditions(REF_OU, 10)
    v = expm_conditions(PolyModel(1.0, 0.0, 1.0, 0.0, 0.0), 3)
    assert not v and "vanishes" in v.reason
    # c_j = j b1 + j(j-1)/2 s2 coincide for b1 = -s2, c_1 = c_2? -1 vs -2+1=-1
    v = expm_conditions(PolyModel(0.0, -1.0, 0.0, 0.0, 1.0), 3)
    assert not v


def test_recursive_raises_when_conditions_fail():
    with pytest.raises(ExpmConditionError):
        generator_expm_recursive(PolyModel(1.0, 0.0, 1.0), 2, 1.0)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 16])
@pytest.mark.parametrize("t", [0.1, 0.5, 2.0])
def test_recursive_matches_pade_on_reference_model(n, t):
    R = generator_expm_recursive(REF_OU, n, t)
    P = expm_dense(generator_matrix(REF_OU, n), t)
    assert np.abs(R - P).max() <= 1e-12 * np.abs(P).max()


def test_expm_dense_against_scipy_and_mpmath(rng):
    for scale in (1e-3, 0.3, 3.0, 40.0):
        A = rng.normal(size=(6, 6)) * scale
        ref = mp_expm(A, 1.0)
        assert np.allclose(expm_dense(A), scipy.linalg.expm(A), rtol=1e-11, atol=0)
        assert np.abs(expm_dense(A) - ref).max() <= 1e-11 * np.abs(ref).max()


def test_expm_dense_rejects_non_square():
    with pytest.raises(ShapeError):
        expm_dense(np.zeros((2, 3)))


def test_expm_zero_time_is_identity():
    assert np.array_equal(generator_expm(REF_OU, 4, 0.0), np.eye(5))


def test_generator_expm_first_row_and_negative_time():
    E = generator_expm(REF_OU, 3, 0.7)
    assert np.array_equal(E[0], [1, 0, 0, 0])
    with pytest.raises(DomainError):
        generator_expm(REF_OU, 3, -1.0)
    with pytest.raises(ValueError):
        generator_expm(REF_OU, 3, 1.0, method="taylor")


def test_generator_expm_cache_is_read_only():
    E = generator_expm(REF_OU, 3, 0.25)
    with pytest.raises(ValueError):
        E[0, 0] = 2.0


def test_amplification_bounds_the_recursion_error(rng):
    for _ in range(30):
        model = PolyModel(*rng.uniform(-1, 1, 5))
        for n, t in ((4, 0.5), (8, 2.0)):
            if not expm_conditions(model, n):
                continue
            ref = mp_expm(generator_matrix(model, n), t)
            err = np.abs(generator_expm_recursive(model, n, t) - ref).max() / np.abs(ref).max()
            assert err <= recursion_amplification(model, n, t) * np.finfo(float).eps


def test_auto_is_accurate_for_clustered_models(rng):
    for _ in range(20):
        model = PolyModel(*rng.uniform(-1, 1, 5))
        ref = mp_expm(generator_matrix(model, 10), 2.0)
        got = generator_expm(model, 10, 2.0, "auto")
        assert np.abs(got - ref).max() <= 1e-12 * np.abs(ref).max()


def test_checked_refuses_ill_conditioned_recursion():
    # c_j nearly coincide: b1 = -4.5 s2 makes c_4 close to c_5 for small perturbations
    model = PolyModel(0.3, -4.5 + 1e-7, 0.2, 0.1, 1.0)
    with pytest.raises(ExpmConditionError):
        generator_expm(model, 10, 2.0, "checked")
    assert np.all(np.isfinite(generator_expm(model, 10, 2.0, "auto")))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, -0.1), st.floats(0, 2), st.floats(0.01, 2))
def test_semigroup_property(b0, b1, s0, t):
    model = PolyModel(b0, b1, s0)
    A = generator_expm(model, 4, t)
    B = generator_expm(model, 4, 2 * t)
    assert np.allclose(A @ A, B, rtol=1e-10, atol=1e-12)


def test_hermite_basis_matrix():
    basis = hermite_basis_matrix(4)
    M = basis.M
    assert M.tolist() == [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [-1, 0, 1, 0, 0],
                          [0, -3, 0, 1, 0], [3, 0, -6, 0, 1]]
    assert basis.M_inv.tolist() == [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [1, 0, 1, 0, 0],
                                    [0, 3, 0, 1, 0], [3, 0, 6, 0, 1]]
    assert np.array_equal(M @ basis.M_inv, np.eye(5))
    assert basis.n == 4


def test_change_of_basis_exponential_commutes(rng):
    model = PolyModel(*rng.uniform(-1, 1, 5))
    basis = hermite_basis_matrix(5)
    J = change_of_basis(generator_matrix(model, 5), basis)
    lhs = expm_dense(J, 0.8)
    rhs = change_of_basis(generator_expm(model, 5, 0.8), basis)
    assert np.allclose(lhs, rhs, rtol=1e-11, atol=1e-12)
    with pytest.raises(ShapeError):
        change_of_basis(np.eye(3), basis)


def test_basis_change_from_matrix():
    b = BasisChange.from_matrix([[1, 0], [2, 1]])
    assert np.allclose(b.M_inv, [[1, 0], [-2, 1]])


def test_generator_acts_on_hermite_basis():
    # J Q(x) = G-action on Q(x), checked symbolically at n = 3
    model = PolyModel(0.4, -1.3, 0.7, 0.2, 0.5)
    basis = hermite_basis_matrix(3)
    J = change_of_basis(generator_matrix(model, 3), basis)
    xv = 0.37
    H = np.array([xv ** k for k in range(4)])
    G = generator_matrix(model, 3)
    assert np.allclose(J @ (basis.M @ H), basis.M @ (G @ H), rtol=1e-13)
    assert math.isclose(J[0, 0], 0.0, abs_tol=1e-15)

"""Prices and expectations built from correlators.

Discretely monitored Asian options with a polynomial payoff of the average
reduce to a weighted sum of correlators of monomials. Exponential moments of
the integrated process expand into time-ordered integrals of correlators.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .correlator import CorrelatorSpec, TimeGrid, correlator
from .errors import DegreeCapError, DomainError
from .generator import PolyModel

__all__ = [
    "AsianSpec",
    "MultiIndexTerm",
    "average_power_expansion",
    "asian_price_poly",
    "exp_integrated_terms",
    "exp_integrated_moment",
]

DEFAULT_DEGREE_CAP = 12


@dataclass(frozen=True)
class AsianSpec:
    """Asian option on the discrete average of ``Y`` over ``grid.s``; maturity ``T = s_m``."""

    model: PolyModel
    r: float
    grid: TimeGrid
    payoff: np.ndarray
    y: float

    def __post_init__(self):
        payoff = np.atleast_1d(np.asarray(self.payoff, dtype=float))
        if payoff.ndim != 1 or payoff.size == 0:
            raise DomainError("payoff must be a non-empty coefficient vector")
        if not np.all(np.isfinite(payoff)) or not np.isfinite(self.r) or not np.isfinite(self.y):
            raise DomainError("payoff, rate and initial state must be finite")
        payoff.setflags(write=False)
        object.__setattr__(self, "payoff", payoff)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "y", float(self.y))

    @property
    def maturity(self):
        return self.grid.s[-1]

    @classmethod
    def from_dict(cls, d):
        return cls(model=PolyModel.from_dict(d["model"]), r=d["r"],
                   grid=TimeGrid(d["t"], d["s"]), payoff=d["payoff"], y=d["y"])


@dataclass(frozen=True)
class MultiIndexTerm:
    """One term ``alpha * prod_j Y(s_j)**k_j`` of the expanded average power."""

    exponents: tuple
    alpha: float


def _compositions(k, parts):
    """All tuples of ``parts`` non-negative integers summing to ``k``, first entry descending."""
    if parts == 1:
        yield (k,)
        return
    for head in range(k, -1, -1):
        for tail in _compositions(k - head, parts - 1):
            yield (head,) + tail


def average_power_expansion(m, k):
    """Multinomial expansion of ``((Y(s_0) + ... + Y(s_m)) / (m + 1))**k``.

    >>> [(t.exponents, t.alpha) for t in average_power_expansion(1, 2)]
    [((2, 0), 0.25), ((1, 1), 0.5), ((0, 2), 0.25)]
    """
    if m < 0 or k < 0:
        raise ValueError("need m >= 0 and k >= 0")
    scale = (m + 1) ** k
    out = []
    for exps in _compositions(k, m + 1):
        coeff = math.factorial(k)
        for e in exps:
            coeff //= math.factorial(e)
        out.append(MultiIndexTerm(exps, coeff / scale))
    return out


def _monomial_correlator(model, grid, y, exponents, expm):
    """``E[prod_j Y(s_j)**k_j | Y(t) = y]``."""
    m = len(exponents) - 1
    deg = max(max(exponents), 1)
    polys = np.zeros((m + 1, deg + 1))
    for j, e in enumerate(exponents):
        # polys[k] belongs to time s[m - k]
        polys[m - j, e] = 1.0
    return correlator(CorrelatorSpec(model, polys, grid, y), sparse=True, expm=expm)


def asian_price_poly(spec, degree_cap=DEFAULT_DEGREE_CAP, expm="pade"):
    """Discounted ``E[payoff(average)]`` for a polynomial payoff.

    Each power ``k`` of the payoff contributes correlators of total degree up
    to ``k (m + 1)``; a :class:`DegreeCapError` is raised when the payoff
    degree times ``m + 1`` exceeds ``degree_cap``.
    """
    m = spec.grid.m
    payoff = np.trim_zeros(spec.payoff, "b")
    deg = payoff.size - 1
    required = max(deg, 0) * (m + 1)
    if required > degree_cap:
        raise DegreeCapError(required, degree_cap)
    total = 0.0
    for k, c in enumerate(payoff):
        if c == 0.0:
            continue
        if k == 0:
            total += c
            continue
        acc = 0.0
        for term in average_power_expansion(m, k):
            acc += term.alpha * _monomial_correlator(
                spec.model, spec.grid, spec.y, term.exponents, expm)
        total += c * acc
    return math.exp(-spec.r * (spec.maturity - spec.grid.t)) * total


def _simplex_rule(k, nodes, a, b):
    """Gauss-Legendre rule on ``a < s_1 < ... < s_k < b`` from the unit cube.

    With ``v_j = u_j u_{j+1} ... u_k`` the cube maps onto the ordered unit
    simplex with Jacobian ``prod_j u_j**(j-1)``.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    U = np.array(list(itertools.product(x, repeat=k)))
    W = np.prod(np.array(list(itertools.product(w, repeat=k))), axis=1)
    V = np.cumprod(U[:, ::-1], axis=1)[:, ::-1]
    W = W * np.prod(U ** np.arange(k), axis=1)
    return a + (b - a) * V, W * (b - a) ** k


def exp_integrated_terms(model, lam, t, T, kbar, nodes_per_dim=8, *, y, expm="pade"):
    """Terms ``lam**k * ∫_{t<s_1<...<s_k<T} E[Y(s_1)...Y(s_k)] ds`` for ``k = 0..kbar``.

    Their sum is the truncated series of ``E[exp(lam ∫_t^T Y(s) ds) | Y(t) = y]``;
    the size of the last term indicates the truncation error.
    """
    if lam > 0:
        raise DomainError(f"lambda must be <= 0, got {lam}")
    if kbar < 0 or nodes_per_dim < 2:
        raise ValueError("need kbar >= 0 and nodes_per_dim >= 2")
    if not t < T:
        raise DomainError(f"need t < T, got t={t}, T={T}")
    terms = np.zeros(kbar + 1)
    terms[0] = 1.0
    for k in range(1, kbar + 1):
        if lam == 0.0:
            break
        S, W = _simplex_rule(k, nodes_per_dim, t, T)
        polys = np.tile([0.0, 1.0], (k, 1))
        integral = 0.0
        for s, w in zip(S, W):
            spec = CorrelatorSpec(model, polys, TimeGrid(t, s), y)
            integral += w * correlator(spec, sparse=True, expm=expm)
        terms[k] = lam ** k * integral
    return terms


def exp_integrated_moment(model, lam, t, T, kbar, nodes_per_dim=8, *, y, expm="pade"):
    """Truncated series for ``E[exp(lam ∫_t^T Y(s) ds) | Y(t) = y]``, ``lam <= 0``.

    The ``k``-th term is ``lam**k / k!`` times ``E[(∫Y)**k]``, and the latter
    is ``k!`` times the time-ordered integral of the ``k``-point correlator.
    The ordered integrals use tensor Gauss-Legendre with ``nodes_per_dim``
    points per axis. See :func:`exp_integrated_terms` for the individual terms.
    """
    return float(np.sum(exp_integrated_terms(model, lam, t, T, kbar, nodes_per_dim,
                                             y=y, expm=expm)))

"""Moments and multi-time correlators of polynomial jump-diffusions.

A correlator is ``E[p_m(Y(s_0)) p_{m-1}(Y(s_1)) ... p_0(Y(s_m)) | Y(t) = y]``.
Note the ordering: ``polys[k]`` is evaluated at ``s[m - k]``, so the last
polynomial in the list belongs to the earliest time.

Two evaluation strategies are provided. :func:`correlator` lifts the problem
to Kronecker powers of the monomial basis and only ever exponentiates the
generator of the total degree ``n (m + 1)``. :func:`correlator_iterated` walks
backwards in time, turning each conditional expectation into a polynomial and
multiplying it into the next one. Both give the same number up to rounding.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .elimdup import (
    duplicating_matrix_order,
    duplication_indices,
    eliminating_matrix_order,
    elimination_indices,
)
from .errors import DomainError, ShapeError
from .generator import PolyModel, generator_expm, generator_matrix
from .linalg import monomial_basis, vec, x_matrix

__all__ = [
    "TimeGrid",
    "CorrelatorSpec",
    "moment",
    "tilde_g",
    "tilde_g_expm",
    "correlator2",
    "correlator",
    "correlator_iterated",
    "correlator_condition",
]


@dataclass(frozen=True)
class TimeGrid:
    """Start time ``t`` and observation times ``t < s_0 < ... < s_m``."""

    t: float
    s: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in np.atleast_1d(self.s))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "s", s)
        if not s:
            raise DomainError("time grid needs at least one observation time")
        if not np.all(np.isfinite((self.t,) + s)):
            raise DomainError("time grid contains non-finite values")
        if not self.t < s[0]:
            raise DomainError(f"time grid must have t < s_0, got t={self.t}, s_0={s[0]}")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise DomainError(f"time grid must be strictly increasing, got s={list(s)}")

    @property
    def m(self):
        return len(self.s) - 1

    def steps(self):
        """``(s_0 - t, s_1 - s_0, ..., s_m - s_{m-1})``."""
        return np.diff((self.t,) + self.s)


def _pad_polys(polys, n=None):
    arrs = [np.atleast_1d(np.asarray(p, dtype=float)) for p in polys]
    if any(a.ndim != 1 for a in arrs):
        raise ShapeError("each polynomial must be a 1-D coefficient vector")
    deg = max(max(a.size for a in arrs) - 1, 1)
    if n is not None:
        if n < deg:
            raise ShapeError(f"cannot pad degree-{deg} polynomials to degree {n}")
        deg = n
    out = np.zeros((len(arrs), deg + 1))
    for k, a in enumerate(arrs):
        out[k, :a.size] = a
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CorrelatorSpec:
    """Everything needed to evaluate one correlator.

    ``polys`` is zero-padded on construction to a common degree ``n >= 1``
    and stored as an ``(m + 1, n + 1)`` read-only array; row ``k`` holds the
    coefficients of ``p_k`` in increasing powers.
    """

    model: PolyModel
    polys: np.ndarray
    grid: TimeGrid
    y: float

    def __post_init__(self):
        object.__setattr__(self, "polys", _pad_polys(self.polys))
        object.__setattr__(self, "y", float(self.y))
        if not np.isfinite(self.y) or not np.all(np.isfinite(self.polys)):
            raise DomainError("initial state and coefficients must be finite")
        if len(self.polys) != len(self.grid.s):
            raise ShapeError(f"got {len(self.polys)} polynomials for "
                             f"{len(self.grid.s)} observation times")

    @property
    def m(self):
        return self.grid.m

    @property
    def n(self):
        return self.polys.shape[1] - 1

    @classmethod
    def from_dict(cls, d):
        return cls(model=PolyModel.from_dict(d["model"]), polys=d["polys"],
                   grid=TimeGrid(d["t"], d["s"]), y=d["y"])

    def to_dict(self):
        return {"model": self.model.to_dict(), "polys": self.polys.tolist(),
                "t": self.grid.t, "s": list(self.grid.s), "y": self.y}


def moment(model, p, t, T, y, expm="pade"):
    """``E[p(Y(T)) | Y(t) = y]`` from the moment formula."""
    if T < t:
        raise DomainError(f"need t <= T, got t={t}, T={T}")
    p = np.atleast_1d(np.asarray(p, dtype=float))
    n = p.size - 1
    if n == 0:
        return float(p[0])
    return float(p @ generator_expm(model, n, T - t, expm) @ monomial_basis(y, n))


def tilde_g(model, n, r):
    """Lifted generator ``D^(r) G_{n(r+1)} E^(r)`` acting on ``vec(x_matrix(x, n, r))``.

    Dense, of size ``(n+1)**(r+1)``. Only useful for inspection and tests; the
    correlator never builds it.
    """
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    G = generator_matrix(model, n * (r + 1))
    if r == 0:
        return G
    D = duplicating_matrix_order(n, r)
    E = eliminating_matrix_order(n, r)
    return (D @ sp.csr_matrix(G) @ E).toarray()


def tilde_g_expm(model, n, r, dt, expm="pade"):
    """``D^(r) exp(G_{n(r+1)} dt) E^(r)``, the exponential of :func:`tilde_g` on Hankel blocks."""
    if dt < 0:
        raise DomainError(f"time step must be non-negative, got {dt}")
    P = generator_expm(model, n * (r + 1), dt, expm)
    if r == 0:
        return np.array(P)
    D = duplicating_matrix_order(n, r)
    E = eliminating_matrix_order(n, r)
    return (D @ sp.csr_matrix(P) @ E).toarray()


@lru_cache(maxsize=None)
def _dense_ops(n, r):
    E = eliminating_matrix_order(n, r).toarray().astype(float)
    D = duplicating_matrix_order(n, r).toarray().astype(float)
    E.setflags(write=False)
    D.setflags(write=False)
    return E, D


def _apply(kind, n, r, v, sparse):
    """Apply ``E^(r)`` or ``D^(r)`` to ``v`` as a gather or a dense product."""
    if sparse:
        idx = elimination_indices(n, r) if kind == "E" else duplication_indices(n, r)
        return v[idx]
    E, D = _dense_ops(n, r)
    return (E if kind == "E" else D) @ v


def _formula(model, polys, grid, base, expm, sparse, slot=None):
    """Row-vector evaluation of the lifted correlator formula.

    ``base`` is ``E^(m) vec(X)`` for the state vector ``X`` (the monomials or
    their derivative). When ``slot`` is an index ``j``, the ``j``-th
    exponential ``exp(G dt_j)`` is replaced by ``G exp(G dt_j)``, which is its
    derivative with respect to ``dt_j``.
    """
    m = grid.m
    n = polys.shape[1] - 1
    N = n + 1
    steps = grid.steps()

    def prop(deg, j, v):
        P = generator_expm(model, deg, steps[j], expm)
        if slot == j:
            P = generator_matrix(model, deg) @ P
        return P @ v

    z = prop(n * (m + 1), 0, base)
    z = _apply("D", n, m, z, sparse)
    r = polys[m] @ z.reshape((N, N ** m), order="F")
    for k in range(1, m + 1):
        q = m - k
        # r <- r E^T exp(G^T dt) D^T, i.e. D exp(G dt) E applied to r
        u = _apply("E", n, q, r, sparse)
        u = prop(n * (q + 1), k, u)
        r = _apply("D", n, q, u, sparse)
        r = r.reshape(N ** q, N) @ polys[q]
    return float(r[0]) if np.ndim(r) else float(r)


def _check_spec(spec):
    if not isinstance(spec, CorrelatorSpec):
        raise TypeError("expected a CorrelatorSpec")
    return spec


def correlator(spec, sparse=False, expm="pade"):
    """Evaluate the correlator through the lifted (Kronecker) formula.

    ``sparse=True`` applies the 0/1 eliminating and duplicating matrices as
    index gathers; otherwise they are used as dense matrices. ``expm`` selects
    the exponential method of :func:`polycorr.generator.generator_expm`.
    """
    spec = _check_spec(spec)
    n, m = spec.n, spec.m
    base = monomial_basis(spec.y, n * (m + 1))
    if not sparse:
        # E^(m) vec(X_n^(m)(y)) equals H_{n(m+1)}(y); the dense path forms it
        # explicitly as a representation check
        E, _ = _dense_ops(n, m)
        base = E @ vec(x_matrix(spec.y, n, m))
    return _formula(spec.model, spec.polys, spec.grid, base, expm, sparse)


def correlator2(model, p0, p1, grid, y, expm="pade"):
    """Two-point correlator ``E[p1(Y(s_0)) p0(Y(s_1)) | Y(t) = y]``.

    Written out with explicit matrices:
    ``p1^T vec^{-1}(D exp(G_{2n} (s_0 - t)) E vec(X_n(y))) exp(G_n^T (s_1 - s_0)) p0``.
    """
    if grid.m != 1:
        raise ShapeError("correlator2 needs exactly two observation times")
    polys = _pad_polys([p0, p1])
    n = polys.shape[1] - 1
    N = n + 1
    dt0, dt1 = grid.steps()
    E, D = _dense_ops(n, 1)
    lifted = D @ generator_expm(model, 2 * n, dt0, expm) @ E @ vec(x_matrix(y, n, 1))
    Z = lifted.reshape((N, N), order="F")
    return float(polys[1] @ Z @ generator_expm(model, n, dt1, expm).T @ polys[0])


def _propagate(model, q, dt, expm, sparse):
    """Coefficients of ``x -> E[q(Y(s + dt)) | Y(s) = x]``."""
    d = q.size - 1
    if d == 0:
        return q.copy()
    if sparse:
        G = sp.csr_matrix(generator_matrix(model, d).T)
        return expm_multiply(G * dt, q)
    return generator_expm(model, d, dt, expm).T @ q


def correlator_iterated(spec, sparse=False, expm="pade"):
    """Evaluate the correlator by backward induction over the observation times.

    Starting from ``p_0`` at the last time, each step conditions on the
    previous time, which maps the current polynomial to a polynomial of the
    same degree, and multiplies the result by the next ``p``. The degree grows
    to at most ``n (m + 1)``. ``sparse=True`` propagates with a sparse
    generator and ``scipy.sparse.linalg.expm_multiply``.
    """
    spec = _check_spec(spec)
    m = spec.m
    steps = spec.grid.steps()
    q = np.array(spec.polys[0])
    for k in range(m, 0, -1):
        q = _propagate(spec.model, q, steps[k], expm, sparse)
        q = np.convolve(spec.polys[m - k + 1], q)
    q = _propagate(spec.model, q, steps[0], expm, sparse)
    return float(q @ monomial_basis(spec.y, q.size - 1))


def correlator_condition(spec, expm="pade"):
    """Relative condition number of the correlator as a sum of products.

    Re-runs the backward induction with every coefficient, exponential entry
    and monomial replaced by its absolute value and divides by ``|value|``.
    Rounding errors of size ``eps`` in the data can move the result by about
    ``condition * eps`` relative, whichever evaluation order is used.
    """
    spec = _check_spec(spec)
    m = spec.m
    steps = spec.grid.steps()
    q = np.abs(spec.polys[0])
    for k in range(m, 0, -1):
        q = np.abs(generator_expm(spec.model, q.size - 1, steps[k], expm)).T @ q
        q = np.convolve(np.abs(spec.polys[m - k + 1]), q)
    q = np.abs(generator_expm(spec.model, q.size - 1, steps[0], expm)).T @ q
    bound = float(q @ np.abs(monomial_basis(spec.y, q.size - 1)))
    value = abs(correlator_iterated(spec, expm=expm))
    return bound / value if value > 0 else np.inf

"""Polynomial jump-diffusion models and their generator matrices.

A model is the drift ``b0 + b1 x``, the squared diffusion
``sigma0 + sigma1 x + sigma2 x**2`` and a table of jump moments ``xi[m, i]``
with ``∫ z**m l(x, dz) = sum_i xi[m, i] x**i`` for ``m >= 2``. The generator
matrix ``G_n`` represents the generator on the monomials ``(1, x, ..., x**n)``.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve, solve_triangular

from .errors import DomainError, ExpmConditionError, ShapeError

__all__ = [
    "PolyModel",
    "PolyReport",
    "ExpmVerdict",
    "BasisChange",
    "validate_polynomial",
    "jump_moments_from_sde",
    "generator_matrix",
    "generator_diagonal",
    "expm_conditions",
    "generator_expm_recursive",
    "recursion_amplification",
    "expm_dense",
    "generator_expm",
    "hermite_basis_matrix",
    "change_of_basis",
]


@dataclass(frozen=True)
class PolyModel:
    """Coefficients of a polynomial jump-diffusion.

    ``xi`` maps ``(m, i)`` to the coefficient of ``x**i`` in the ``m``-th jump
    moment. It may be given as a dict; it is stored as a sorted tuple of
    ``((m, i), value)`` pairs so the model is hashable. An empty table means
    no jumps.
    """

    b0: float
    b1: float
    sigma0: float = 0.0
    sigma1: float = 0.0
    sigma2: float = 0.0
    xi: tuple = field(default=())

    def __post_init__(self):
        for name in ("b0", "b1", "sigma0", "sigma1", "sigma2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        items = self.xi.items() if isinstance(self.xi, dict) else self.xi
        table = {}
        for (m, i), value in items:
            m, i = int(m), int(i)
            if m < 2 or not 0 <= i <= m:
                raise DomainError(f"jump moment index (m={m}, i={i}) needs m >= 2 and 0 <= i <= m")
            table[(m, i)] = float(value)
        object.__setattr__(self, "xi", tuple(sorted(table.items())))

    @property
    def has_jumps(self):
        return len(self.xi) > 0

    @property
    def max_jump_order(self):
        """Largest ``m`` present in the jump table (0 without jumps)."""
        return max((m for (m, _), _ in self.xi), default=0)

    def xi_value(self, m, i):
        return dict(self.xi).get((m, i), 0.0)

    @classmethod
    def from_dict(cls, d):
        xi = {(int(m), int(i)): v for m, i, v in d.get("xi", [])}
        return cls(b0=d["b0"], b1=d["b1"], sigma0=d.get("sigma0", 0.0),
                   sigma1=d.get("sigma1", 0.0), sigma2=d.get("sigma2", 0.0), xi=xi)

    def to_dict(self):
        d = {"b0": self.b0, "b1": self.b1, "sigma0": self.sigma0,
             "sigma1": self.sigma1, "sigma2": self.sigma2}
        if self.xi:
            d["xi"] = [[m, i, v] for (m, i), v in self.xi]
        return d


@dataclass(frozen=True)
class PolyReport:
    max_jump_order: int
    has_jumps: bool


def validate_polynomial(model):
    """Check that a model is usable and report its jump structure.

    The parametric form already makes the operator polynomial, so the only
    failure is a non-finite coefficient. Jump moments can only be checked up
    to the order present in the table.
    """
    coeffs = [model.b0, model.b1, model.sigma0, model.sigma1, model.sigma2]
    coeffs += [v for _, v in model.xi]
    if not all(math.isfinite(c) for c in coeffs):
        raise DomainError("model coefficients must be finite")
    return PolyReport(max_jump_order=model.max_jump_order, has_jumps=model.has_jumps)


def jump_moments_from_sde(mm, M_max):
    """Jump table for jumps of size ``delta0(z) + delta1(z) x``.

    ``mm[(a, b)]`` is ``∫ delta0**a delta1**b dnu``; the result is
    ``xi[m, i] = C(m, i) * mm[(m-i, i)]`` for ``2 <= m <= M_max``.
    """
    xi = {}
    for m in range(2, M_max + 1):
        for i in range(m + 1):
            try:
                mu = mm[(m - i, i)]
            except KeyError:
                raise DomainError(f"missing mixed jump moment ({m - i}, {i})") from None
            xi[(m, i)] = math.comb(m, i) * float(mu)
    return xi


def _check_jump_order(model, n):
    if model.has_jumps and model.max_jump_order < n:
        raise DomainError(f"jump table stops at order {model.max_jump_order}, "
                          f"degree {n} needs moments up to order {n}")


def _row_coefficients(model, k):
    """Generator of ``x**k`` as coefficients of ``(1, x, ..., x**k)``."""
    row = np.zeros(k + 1)
    if k == 0:
        return row
    half = 0.5 * k * (k - 1)
    row[k] += k * model.b1 + half * model.sigma2
    row[k - 1] += k * model.b0 + half * model.sigma1
    if k >= 2:
        row[k - 2] += half * model.sigma0
    for (m, i), value in model.xi:
        if m <= k:
            # C(k, m) x**(k-m) * xi[m, i] x**i
            row[k - m + i] += math.comb(k, m) * value
    return row


def generator_matrix(model, n):
    """Lower-triangular generator matrix ``G_n`` of shape ``(n+1, n+1)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_jump_order(model, n)
    G = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        G[k, : k + 1] = _row_coefficients(model, k)
    return G


def generator_diagonal(model, n):
    """``(c_1, ..., c_n)`` with ``c_1 = b1``: the nonzero diagonal of ``G_n``."""
    _check_jump_order(model, n)
    return np.array([_row_coefficients(model, k)[k] for k in range(1, n + 1)])


@dataclass(frozen=True)
class ExpmVerdict:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def expm_conditions(model, n, rtol=1e-12):
    """Check that the exponential recursion applies at degree ``n``.

    Needs ``c_j != 0`` for ``2 <= j <= n`` and all of ``c_1..c_n`` pairwise
    distinct. Values closer than ``rtol`` (relative) count as equal.
    """
    if n <= 1:
        return ExpmVerdict(True)
    c = generator_diagonal(model, n)
    scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
    for j in range(2, n + 1):
        if abs(c[j - 1]) <= rtol * scale:
            return ExpmVerdict(False, f"c_{j} = {float(c[j - 1])!r} vanishes")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(c[i] - c[j]) <= rtol * max(abs(c[i]), abs(c[j])):
                return ExpmVerdict(False, f"c_{i + 1} = c_{j + 1} = {float(c[i])!r}")
    return ExpmVerdict(True)


def _expm_rows(model, n, t):
    """Run the recursion; also return a bound on its rounding amplification.

    Row ``k`` is ``w_k (e^{c_k t} I - E_{k-1})``, so its absolute error is
    about ``|w_k|_1`` times the error already in rows ``< k`` plus the rounding
    in that product. The bound is propagated row by row and returned relative
    to the largest entry, in units of machine epsilon. It is large when some
    ``c_j`` cluster on the scale ``1/t``.
    """
    G = generator_matrix(model, n)
    out = np.zeros((n + 1, n + 1))
    out[0, 0] = 1.0
    b0, b1 = model.b0, model.b1
    if b1 != 0.0:
        out[1, 0] = b0 / b1 * math.expm1(b1 * t)
        out[1, 1] = math.exp(b1 * t)
    else:
        out[1, 0] = b0 * t
        out[1, 1] = 1.0
    bound = np.ones(n + 1)
    for k in range(2, n + 1):
        c = G[k, k]
        a = G[k, :k]
        lam = c * np.eye(k) - G[:k, :k]
        # a^T Lambda^{-1} via a triangular solve with Lambda^T
        w = solve_triangular(lam, a, trans="T", lower=True)
        ect = math.exp(c * t)
        rhs = ect * np.eye(k) - out[:k, :k]
        out[k, :k] = w @ rhs
        out[k, k] = ect
        wn = np.abs(w).sum()
        bound[k] = wn * (bound[:k].max() + np.abs(rhs).max()) + ect
    return out, bound.max() / np.abs(out).max()


def generator_expm_recursive(model, n, t):
    """``exp(G_n t)`` assembled row by row from the closed-form recursion.

    Raises :class:`ExpmConditionError` when :func:`expm_conditions` fails.
    The recursion is exact in real arithmetic but loses accuracy in floating
    point when the ``c_j`` are close together relative to ``1/t``; see
    :func:`recursion_amplification`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    verdict = expm_conditions(model, n)
    if not verdict:
        raise ExpmConditionError(f"exponential recursion invalid: {verdict.reason}")
    return _expm_rows(model, n, t)[0]


def recursion_amplification(model, n, t):
    """Rounding amplification of :func:`generator_expm_recursive`.

    Multiplying by machine epsilon gives a rough bound on the max-norm relative
    error. Returns ``inf`` when the recursion does not apply.
    """
    if n < 1 or not expm_conditions(model, n):
        return math.inf
    return _expm_rows(model, n, t)[1]


_EPS = np.finfo(float).eps
AUTO_RECURSION_TOL = 1e-12
CHECKED_RECURSION_TOL = 1e-8

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068e0}
_THETA13 = 5.371920351148152e0


def expm_dense(M, t=1.0):
    """``exp(M t)`` by scaling and squaring with a diagonal Padé approximant.

    Degrees 3..13 are selected on the 1-norm of ``M t`` following Higham
    (2005); for the degree-13 approximant the matrix is first scaled by a
    power of two so its norm falls below theta_13.
    """
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"expm needs a square matrix, got shape {A.shape}")
    A = A * t
    d = A.shape[0]
    ident = np.eye(d)
    norm = np.linalg.norm(A, 1)
    A2 = A @ A
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            b = _PADE[m]
            U = b[1] * ident
            V = b[0] * ident
            P = ident
            for k in range(1, m // 2 + 1):
                P = P @ A2
                U = U + b[2 * k + 1] * P
                V = V + b[2 * k] * P
            U = A @ U
            return solve(V - U, V + U)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    A = A / 2.0 ** s
    b = _PADE[13]
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    R = solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


@lru_cache(maxsize=4096)
def _generator_expm_cached(model, n, t, method):
    if method == "recursive":
        out = generator_expm_recursive(model, n, t)
    elif method == "pade":
        out = expm_dense(generator_matrix(model, n), t)
    elif method == "checked":
        if n >= 1:
            verdict = expm_conditions(model, n)
            if not verdict:
                raise ExpmConditionError(f"exponential recursion invalid: {verdict.reason}")
        out, amp = _expm_rows(model, n, t) if n >= 1 else (np.ones((1, 1)), 0.0)
        if amp * _EPS > CHECKED_RECURSION_TOL:
            raise ExpmConditionError(
                f"exponential recursion ill-conditioned at n={n}, t={t} "
                f"(error bound {amp * _EPS:.1e})")
    elif method == "auto":
        out = None
        if n >= 1 and expm_conditions(model, n):
            rec, amp = _expm_rows(model, n, t)
            if amp * _EPS <= AUTO_RECURSION_TOL:
                out = rec
        if out is None:
            out = expm_dense(generator_matrix(model, n), t)
    else:
        raise ValueError(f"unknown exponential method {method!r}")
    # constants are invariant: the first row is exactly e_0 whatever the method
    out = np.array(out)
    out[0] = 0.0
    out[0, 0] = 1.0
    out.setflags(write=False)
    return out


def generator_expm(model, n, t, method="pade"):
    """``exp(G_n t)``, memoised on ``(model, n, t, method)``.

    Methods:

    ``"pade"``
        dense scaling and squaring;
    ``"recursive"``
        closed-form recursion, raising :class:`ExpmConditionError` when it
        does not apply;
    ``"checked"``
        as ``"recursive"``, but also raising when the propagated error bound
        exceeds ``CHECKED_RECURSION_TOL``;
    ``"auto"``
        the recursion when it applies and is well conditioned, Padé otherwise.

    The returned array is read-only and shared between callers.
    """
    if t < 0:
        raise DomainError(f"time step must be non-negative, got {t}")
    return _generator_expm_cached(model, int(n), float(t), method)


@dataclass(frozen=True)
class BasisChange:
    """Invertible ``M`` with ``M H_n(x) = Q_n(x)`` for a new polynomial basis ``Q_n``."""

    M: np.ndarray
    M_inv: np.ndarray

    @property
    def n(self):
        return self.M.shape[0] - 1

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M, dtype=float)
        return cls(M, np.linalg.inv(M))


def hermite_basis_matrix(n):
    """Monomial to probabilists' Hermite change of basis (``He_2 = x**2 - 1``).

    Row ``k`` of ``M`` holds the monomial coefficients of ``He_k``, built from
    ``He_{k+1} = x He_k - k He_{k-1}``. The inverse uses the explicit
    expansion ``x**k = sum_j k! / (2**j j! (k-2j)!) He_{k-2j}``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    M = np.zeros((n + 1, n + 1), dtype=np.int64)
    M[0, 0] = 1
    if n >= 1:
        M[1, 1] = 1
    for k in range(1, n):
        M[k + 1, 1:] += M[k, :-1]
        M[k + 1] -= k * M[k - 1]
    M_inv = np.zeros_like(M)
    for k in range(n + 1):
        for j in range(k // 2 + 1):
            M_inv[k, k - 2 * j] = math.factorial(k) // (2 ** j * math.factorial(j) * math.factorial(k - 2 * j))
    return BasisChange(M.astype(float), M_inv.astype(float))


def change_of_basis(G, basis):
    """Transport a generator matrix (or its exponential) to another basis: ``M G M^{-1}``."""
    G = np.asarray(G, dtype=float)
    if G.shape != basis.M.shape:
        raise ShapeError(f"matrix of shape {G.shape} does not match basis of size {basis.M.shape}")
    return basis.M @ G @ basis.M_inv

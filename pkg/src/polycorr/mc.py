"""Ornstein-Uhlenbeck simulation and an exact Gaussian reference.

The OU process ``dY = (b0 + b1 Y) dt + sqrt(sigma0) dB`` has Gaussian
transitions, so paths on a grid are sampled exactly, with no time stepping.
The same Gaussian structure gives closed-form correlators through Isserlis'
theorem, which serves as an oracle independent of the generator machinery.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegreeCapError, DomainError
from .generator import PolyModel

__all__ = [
    "OUParams",
    "MCResult",
    "ou_step_moments",
    "simulate_ou_path",
    "simulate_ou_paths",
    "mc_correlator",
    "gaussian_ou_oracle",
    "ORACLE_DEGREE_CAP",
]

ORACLE_DEGREE_CAP = 12


@dataclass(frozen=True)
class OUParams:
    """Drift ``b0 + b1 y``, variance rate ``sigma0`` and starting value ``y0``."""

    b0: float
    b1: float
    sigma0: float
    y0: float

    def __post_init__(self):
        for name in ("b0", "b1", "sigma0", "y0"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.sigma0 < 0:
            raise DomainError(f"sigma0 must be non-negative, got {self.sigma0}")

    @classmethod
    def from_model(cls, model, y0):
        """OU parameters of a :class:`PolyModel` with ``sigma1 = sigma2 = 0`` and no jumps."""
        if model.sigma1 != 0.0 or model.sigma2 != 0.0 or model.has_jumps:
            raise DomainError("model is not an Ornstein-Uhlenbeck process")
        return cls(model.b0, model.b1, model.sigma0, y0)

    def to_model(self):
        return PolyModel(self.b0, self.b1, self.sigma0)


@dataclass
class MCResult:
    """Outcome of repeated Monte Carlo estimation against a reference value."""

    estimate: float
    stderr: float
    repetitions: np.ndarray = field(repr=False)
    worst_rel_err: float
    worst_value: float
    failures: int
    reference: float
    tol: float


def ou_step_moments(p, y_prev, dt):
    """Mean and variance of ``Y(s + dt)`` given ``Y(s) = y_prev``."""
    if dt <= 0:
        raise DomainError(f"time step must be positive, got {dt}")
    b0, b1, s0 = p.b0, p.b1, p.sigma0
    if b1 == 0.0:
        return y_prev + b0 * dt, s0 * dt
    g = math.expm1(b1 * dt)
    mean = y_prev * (1.0 + g) + b0 / b1 * g
    var = s0 * math.expm1(2.0 * b1 * dt) / (2.0 * b1)
    return mean, var


def simulate_ou_paths(p, grid, size, rng_seed=None):
    """``size`` independent draws of ``(Y(s_0), ..., Y(s_m))``, shape ``(size, m + 1)``."""
    rng = np.random.default_rng(rng_seed)
    out = np.empty((size, grid.m + 1))
    y = np.full(size, p.y0)
    prev = grid.t
    for j, s in enumerate(grid.s):
        dt = s - prev
        # the transition is affine in y_prev, so the scalar helper vectorises
        mean, var = ou_step_moments(p, y, dt)
        y = mean + math.sqrt(var) * rng.standard_normal(size) if var > 0 else mean
        out[:, j] = y
        prev = s
    return out


def simulate_ou_path(p, grid, rng_seed=None):
    """One draw of ``(Y(s_0), ..., Y(s_m))``."""
    return simulate_ou_paths(p, grid, 1, rng_seed)[0]


def mc_correlator(p, powers, grid, N, reps, reference, tol=1e-3, seed=None):
    """Monte Carlo estimate of ``E[prod_j Y(s_j)**powers[j]]``.

    Runs ``reps`` independent batches of ``N`` paths. Batch ``i`` draws from
    the ``i``-th child of ``numpy.random.SeedSequence(seed)``, so results are
    reproducible and do not depend on evaluation order. A batch fails when its
    relative error against ``reference`` exceeds ``tol``.
    """
    if N < 1 or reps < 1:
        raise ValueError("need N >= 1 and reps >= 1")
    if reference == 0:
        raise DomainError("relative tolerance needs a non-zero reference")
    powers = np.asarray(powers, dtype=int)
    if powers.shape != (grid.m + 1,) or np.any(powers < 0):
        raise DomainError("need one non-negative power per observation time")
    children = np.random.SeedSequence(seed).spawn(reps)
    ests = np.empty(reps)
    within = 0.0
    for i, child in enumerate(children):
        Y = simulate_ou_paths(p, grid, N, child)
        vals = np.prod(Y ** powers, axis=1)
        ests[i] = vals.mean()
        within += np.sum((vals - ests[i]) ** 2)
    count = N * reps
    # pooled sample variance of all paths from per-batch squared deviations
    between = N * np.sum((ests - ests.mean()) ** 2)
    var = (within + between) / (count - 1) if count > 1 else 0.0
    rel = np.abs(ests - reference) / abs(reference)
    worst = int(np.argmax(rel))
    return MCResult(
        estimate=float(ests.mean()),
        stderr=math.sqrt(var / count),
        repetitions=ests,
        worst_rel_err=float(rel[worst]),
        worst_value=float(ests[worst]),
        failures=int(np.sum(rel > tol)),
        reference=float(reference),
        tol=float(tol),
    )


def _ou_var(p, tau):
    if tau <= 0:
        return 0.0
    return ou_step_moments(p, 0.0, tau)[1]


def gaussian_ou_oracle(p, powers, grid, t=None):
    """Exact ``E[prod_j Y(s_j)**powers[j] | Y(t) = p.y0]`` for an OU process.

    The observations are jointly Gaussian with conditional means ``mu_j`` and
    covariances ``Var(min(s_i, s_j) - t) * exp(b1 |s_i - s_j|)``. The mixed
    moment follows from the Gaussian integration-by-parts recursion
    ``E[X_a F] = mu_a E[F] + sum_b C_ab E[dF/dX_b]``.
    """
    t = grid.t if t is None else float(t)
    if not t < grid.s[0]:
        raise DomainError("need t < s_0")
    powers = tuple(int(k) for k in powers)
    if len(powers) != grid.m + 1 or any(k < 0 for k in powers):
        raise DomainError("need one non-negative power per observation time")
    if sum(powers) > ORACLE_DEGREE_CAP:
        raise DegreeCapError(sum(powers), ORACLE_DEGREE_CAP)
    s = np.array(grid.s)
    mu = np.array([ou_step_moments(p, p.y0, sj - t)[0] for sj in s])
    C = np.empty((s.size, s.size))
    for i in range(s.size):
        for j in range(s.size):
            C[i, j] = _ou_var(p, min(s[i], s[j]) - t) * math.exp(p.b1 * abs(s[i] - s[j]))

    @lru_cache(maxsize=None)
    def moment(pw):
        if not any(pw):
            return 1.0
        a = next(i for i, k in enumerate(pw) if k)
        rest = list(pw)
        rest[a] -= 1
        out = mu[a] * moment(tuple(rest))
        for b, k in enumerate(rest):
            if k:
                lower = list(rest)
                lower[b] -= 1
                out += C[a, b] * k * moment(tuple(lower))
        return out

    return float(moment(powers))

"""Sensitivities of a correlator to the initial state and the observation times.

Delta differentiates the lifted formula through the monomial state matrix.
Theta differentiates it through the time steps: ``s_j`` enters the step
ending at ``s_j`` with a plus sign and the step starting there with a minus
sign, and the derivative of ``exp(G dt)`` is ``G exp(G dt)``.
"""

from dataclasses import dataclass

import numpy as np

from .correlator import CorrelatorSpec, _formula
from .elimdup import eliminating_matrix_order
from .linalg import monomial_basis, monomial_basis_derivative, vec

__all__ = ["GreekReport", "dX_dy", "delta", "theta", "greeks"]


@dataclass(frozen=True)
class GreekReport:
    """Delta and the thetas ``Θ_0..Θ_m`` (one per observation time)."""

    delta: float
    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(v) for v in self.thetas))
        if not np.isfinite(self.delta) or not np.all(np.isfinite(self.thetas)):
            raise ArithmeticError("greeks are not finite")

    def as_lines(self, fmt="{:.12e}"):
        lines = [f"delta={fmt.format(self.delta)}"]
        lines += [f"theta_{j}={fmt.format(v)}" for j, v in enumerate(self.thetas)]
        return lines


def dX_dy(y, n, m):
    """Derivative in ``y`` of :func:`polycorr.linalg.x_matrix` ``(y, n, m)``.

    Uses the product rule on ``X^(m) = H^T ⊗ X^(m-1)``, starting from
    ``dH/dy = (0, 1, 2y, ..., n y**(n-1))``.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    h = monomial_basis(y, n)
    dh = monomial_basis_derivative(y, n)
    X = h.reshape(-1, 1)
    dX = dh.reshape(-1, 1)
    for _ in range(m):
        X, dX = (np.kron(h.reshape(1, -1), X),
                 np.kron(dh.reshape(1, -1), X) + np.kron(h.reshape(1, -1), dX))
    return dX


def _check(spec):
    if not isinstance(spec, CorrelatorSpec):
        raise TypeError("expected a CorrelatorSpec")


def delta(spec, expm="pade", sparse=False):
    """``∂/∂y`` of the correlator: the formula with ``vec(X)`` replaced by ``vec(dX_dy)``."""
    _check(spec)
    n, m = spec.n, spec.m
    if sparse:
        base = monomial_basis_derivative(spec.y, n * (m + 1))
    else:
        base = eliminating_matrix_order(n, m) @ vec(dX_dy(spec.y, n, m))
    return _formula(spec.model, spec.polys, spec.grid, base, expm, sparse)


def _slot(spec, j, expm, sparse):
    base = monomial_basis(spec.y, spec.n * (spec.m + 1))
    return _formula(spec.model, spec.polys, spec.grid, base, expm, sparse, slot=j)


def theta(spec, j, expm="pade", sparse=False):
    """``∂/∂s_j`` of the correlator, ``0 <= j <= m``."""
    _check(spec)
    m = spec.m
    if not 0 <= j <= m:
        raise IndexError(f"theta index {j} outside 0..{m}")
    out = _slot(spec, j, expm, sparse)
    if j < m:
        out -= _slot(spec, j + 1, expm, sparse)
    return out


def greeks(spec, expm="pade", sparse=False):
    """Delta and every theta of one correlator."""
    _check(spec)
    slots = [_slot(spec, j, expm, sparse) for j in range(spec.m + 1)]
    thetas = [slots[j] - (slots[j + 1] if j < spec.m else 0.0) for j in range(spec.m + 1)]
    return GreekReport(delta(spec, expm, sparse), thetas)

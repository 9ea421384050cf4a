"""Exponential moments of an integrated rate, as a series of time-ordered integrals.

For a short rate ``Y`` the zero-coupon bond price is ``E[exp(-∫Y ds)]``. The
series in ``lambda`` has one term per correlator order; printing the terms
shows how fast it converges. The OU case has a closed form to compare with.

Usage:
    python demos/integrated_exponential.py
"""

import math

import numpy as np

from polycorr import PolyModel
from polycorr.pricing import exp_integrated_terms

B0, B1, S0, Y0, T = 0.06, -1.5, 0.0004, 0.03, 1.0


def vasicek_bond(lam):
    """``E[exp(lam ∫_0^T Y ds)]`` for the Gaussian OU process."""
    k = -B1
    theta = B0 / k
    b = (1 - math.exp(-k * T)) / k
    mean = theta * T + (Y0 - theta) * b
    var = S0 / k ** 2 * (T - 2 * b + (1 - math.exp(-2 * k * T)) / (2 * k))
    return math.exp(lam * mean + 0.5 * lam ** 2 * var)


def main():
    model = PolyModel(B0, B1, S0)
    lam = -1.0
    terms = exp_integrated_terms(model, lam, 0.0, T, kbar=5, nodes_per_dim=6, y=Y0)
    for k, term in enumerate(terms):
        print(f"k={k}: {term:+.3e}   partial sum {np.sum(terms[:k + 1]):.12f}")
    print(f"closed form      {vasicek_bond(lam):.12f}")


if __name__ == "__main__":
    main()

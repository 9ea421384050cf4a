"""Pricing a discretely monitored Asian option on a rate with a polynomial payoff.

The payoff is a quadratic in the average of three fixings. Expanding the
square turns the price into six correlators of monomials. Delta and theta
of one of those correlators show the sensitivity machinery, and a finite
difference confirms them.

Usage:
    python demos/asian_and_greeks.py
"""

import dataclasses

from polycorr import AsianSpec, CorrelatorSpec, PolyModel, TimeGrid, asian_price_poly, correlator
from polycorr.greeks import greeks
from polycorr.pricing import average_power_expansion

# a CIR-type rate: squared diffusion proportional to the level
MODEL = PolyModel(b0=0.08, b1=-1.6, sigma0=0.0, sigma1=0.04, sigma2=0.0)
GRID = TimeGrid(0.0, [0.25, 0.5, 0.75])
Y0 = 0.03


def main():
    # payoff 1 + 10 A + 50 A^2 of the average A
    spec = AsianSpec(MODEL, r=0.02, grid=GRID, payoff=[1.0, 10.0, 50.0], y=Y0)
    print(f"price: {asian_price_poly(spec):.10f}")

    print("\nterms of the squared average:")
    for term in average_power_expansion(2, 2):
        print(f"  alpha = {term.alpha:.4f}  exponents = {term.exponents}")

    # E[Y(s_0) Y(s_1) Y(s_2)] and its sensitivities
    cspec = CorrelatorSpec(MODEL, [[0, 1]] * 3, GRID, Y0)
    g = greeks(cspec)
    h = 1e-6
    fd = (correlator(dataclasses.replace(cspec, y=Y0 + h))
          - correlator(dataclasses.replace(cspec, y=Y0 - h))) / (2 * h)
    print(f"\ncorrelator  {correlator(cspec):.10e}")
    print(f"delta       {g.delta:.10e}   (finite difference {fd:.10e})")
    for j, th in enumerate(g.thetas):
        print(f"theta_{j}     {th:.10e}")


if __name__ == "__main__":
    main()

"""How to exponentiate a generator matrix, and when not to trust the shortcut.

Because the generator matrix is lower triangular with diagonal ``c_j``,
``exp(G t)`` can be built one row at a time from a closed-form recursion.
The recursion is exact in real arithmetic but cancels badly when the ``c_j``
sit close together. ``recursion_amplification`` bounds the damage, and the
``"auto"`` method uses it to decide between the recursion and Padé.

Usage:
    python demos/exponential_methods.py
"""

import mpmath
import numpy as np

from polycorr import PolyModel, expm_conditions, generator_expm, generator_matrix
from polycorr.generator import generator_expm_recursive, recursion_amplification

EPS = np.finfo(float).eps


def reference(model, n, t):
    mpmath.mp.dps = 60
    G = mpmath.matrix(generator_matrix(model, n).tolist())
    return np.array(mpmath.expm(G * t).tolist(), dtype=float)


def report(name, model, n=10, t=2.0):
    c = np.diag(generator_matrix(model, n))[1:]
    print(f"\n{name}: c_j = {np.array2string(c, precision=2, max_line_width=120)}")
    if not expm_conditions(model, n):
        print("  recursion not applicable:", expm_conditions(model, n).reason)
        return
    ref = reference(model, n, t)
    scale = np.abs(ref).max()
    rec = generator_expm_recursive(model, n, t)
    print(f"  recursion error      {np.abs(rec - ref).max() / scale:.1e}")
    print(f"  predicted bound      {recursion_amplification(model, n, t) * EPS:.1e}")
    print(f"  pade error           {np.abs(generator_expm(model, n, t) - ref).max() / scale:.1e}")
    print(f"  auto error           {np.abs(generator_expm(model, n, t, 'auto') - ref).max() / scale:.1e}")


def main():
    report("well separated (OU)", PolyModel(0.75, -5.0, 0.01))
    # c_j = j b1 + j(j-1)/2 s2 turns near j = 5 but stays well separated
    report("mildly curved", PolyModel(0.3, -2.2, 0.4, 0.1, 0.9))
    # small b1 and s2 pack the c_j into a narrow band; the recursion loses most of its digits while the bound, a worst case, is far more pessimistic
    report("clustered", PolyModel(-0.94, -0.05, 0.82, 0.04, 0.04))
    report("degenerate (b1 = s2 = 0)", PolyModel(0.3, 0.0, 0.5, 0.2, 0.0))


if __name__ == "__main__":
    main()

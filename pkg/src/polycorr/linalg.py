"""Vectorization calculus and monomial-basis matrices.

Matrices are plain numpy arrays. ``vec`` stacks columns (Fortran order), so
for a Fortran-contiguous array it is a view rather than a copy.
"""

import numpy as np

from .errors import ShapeError

__all__ = [
    "vec",
    "vec_inverse",
    "vecL",
    "kron",
    "d_kron",
    "monomial_basis",
    "monomial_basis_derivative",
    "x_matrix",
    "hankel",
    "is_hankel",
]


def _as_matrix(A):
    A = np.asarray(A)
    if A.ndim == 0:
        return A.reshape(1, 1)
    if A.ndim == 1:
        return A.reshape(-1, 1)
    if A.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of ndim {A.ndim}")
    return A


def vec(A):
    """Stack the columns of ``A`` top to bottom into a 1-D array."""
    return _as_matrix(A).ravel(order="F")


def vec_inverse(v, rows, cols):
    """Inverse of :func:`vec`: ``B[i, j] = v[rows*j + i]`` (0-based)."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != rows * cols:
        raise ShapeError(f"cannot reshape vector of length {v.size} into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def vecL(A):
    """L-vectorization: the first column followed by the last row minus its first entry.

    >>> vecL(np.array([[1, 3], [2, 4]]))
    array([1, 2, 4])
    """
    A = _as_matrix(A)
    return np.concatenate([A[:, 0], A[-1, 1:]])


def kron(A, B):
    """Kronecker product with blocks ``a_ij * B``."""
    return np.kron(np.asarray(A), np.asarray(B))


def d_kron(A, B, d):
    """d-Kronecker product ``A ⊗ ... ⊗ A ⊗ B`` (``d`` copies of ``A``); ``B`` when ``d == 0``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    out = None
    A = np.asarray(A)
    for _ in range(d):
        out = A if out is None else np.kron(out, A)
    B = np.asarray(B)
    return B if out is None else np.kron(out, B)


def monomial_basis(x, n):
    """Return ``(1, x, x**2, ..., x**n)``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    h = np.empty(n + 1, dtype=np.result_type(x, float))
    h[0] = 1.0
    for k in range(1, n + 1):
        h[k] = h[k - 1] * x
    return h


def monomial_basis_derivative(x, n):
    """Return ``d/dx (1, x, ..., x**n) = (0, 1, 2x, ..., n x**(n-1))``."""
    out = np.zeros(n + 1, dtype=np.result_type(x, float))
    if n >= 1:
        out[1:] = np.arange(1, n + 1) * monomial_basis(x, n - 1)
    return out


def x_matrix(x, n, r):
    """Matrix of monomials ``H_n(x)^T ⊗^r H_n(x)`` of shape ``(n+1, (n+1)**r)``.

    For ``r = 0`` this is the column ``H_n(x)``; for ``r = 1`` it is the Hankel
    matrix ``H_n(x) H_n(x)^T``. Column-stacking the result gives the
    ``(r+1)``-fold Kronecker power of ``H_n(x)``.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    h = monomial_basis(x, n)
    return d_kron(h.reshape(1, -1), h.reshape(-1, 1), r)


def hankel(values, rows, cols):
    """Rectangular Hankel matrix with ``A[i, j] = values[i + j]`` (0-based)."""
    values = np.asarray(values)
    if values.size != rows + cols - 1:
        raise ShapeError(f"need {rows + cols - 1} skew-diagonal values, got {values.size}")
    i, j = np.indices((rows, cols))
    return values[i + j]


def is_hankel(A):
    """True when every skew-diagonal of ``A`` is constant (exact comparison)."""
    A = _as_matrix(A)
    return bool(np.array_equal(A, hankel(vecL(A), *A.shape)))

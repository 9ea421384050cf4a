"""L-eliminating and L-duplicating matrices.

``E_{n,m}`` picks the "L" (first column, last row) out of ``vec(A)`` for an
``n x m`` matrix; ``D_{n,m}`` rebuilds ``vec(A)`` from that L when ``A`` is
Hankel. The order-``m`` versions do the same for the block matrices returned
by :func:`polycorr.linalg.x_matrix`.

All matrices are ``scipy.sparse.csr_matrix`` with ``int64`` entries equal to
one, so products among them are exact.
"""

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "eliminating_matrix",
    "duplicating_matrix",
    "eliminating_matrix_order",
    "duplicating_matrix_order",
    "elimination_indices",
    "duplication_indices",
    "block_exponent",
    "block_cardinality",
    "dup_column_counts",
]


def _check_dims(n, m):
    if n < 1 or m < 1:
        raise ValueError(f"dimensions must be >= 1, got ({n}, {m})")


def _selector(rows, cols, col_of_row):
    """0/1 matrix with exactly one unit entry per row."""
    col_of_row = np.asarray(col_of_row, dtype=np.int64)
    data = np.ones(rows, dtype=np.int64)
    indptr = np.arange(rows + 1, dtype=np.int64)
    return sp.csr_matrix((data, col_of_row, indptr), shape=(rows, cols))


def eliminating_matrix(n, m):
    """L-eliminating matrix ``E_{n,m}`` of shape ``(n+m-1, n*m)``.

    Row ``i < n`` picks ``A[i, 0]``; row ``n-1+j`` picks ``A[n-1, j]``.
    """
    _check_dims(n, m)
    first_col = np.arange(n)
    last_row = (n - 1) + n * np.arange(1, m)
    return _selector(n + m - 1, n * m, np.concatenate([first_col, last_row]))


def duplicating_matrix(n, m):
    """L-duplicating matrix ``D_{n,m}`` of shape ``(n*m, n+m-1)``.

    Row ``i + n*j`` (the position of ``A[i, j]`` in ``vec(A)``) has its unit
    entry in column ``i + j``, the skew-diagonal of that entry.
    """
    _check_dims(n, m)
    i, j = np.indices((n, m))
    col = (i + j).ravel(order="F")
    return _selector(n * m, n + m - 1, col)


@lru_cache(maxsize=None)
def _elim_order(n, m):
    N = n + 1
    if m == 0:
        return sp.identity(N, dtype=np.int64, format="csr")
    E = eliminating_matrix(N, N)
    for k in range(2, m + 1):
        E = eliminating_matrix(n * k + 1, N) @ sp.kron(sp.identity(N, dtype=np.int64), E)
        E = E.tocsr()
    return E


@lru_cache(maxsize=None)
def _dup_order(n, m):
    N = n + 1
    if m == 0:
        return sp.identity(N, dtype=np.int64, format="csr")
    D = duplicating_matrix(N, N)
    for k in range(2, m + 1):
        D = sp.kron(sp.identity(N, dtype=np.int64), D) @ duplicating_matrix(n * k + 1, N)
        D = D.tocsr()
    return D


def eliminating_matrix_order(n, m):
    """Order-``m`` L-eliminating matrix for degree-``n`` monomials.

    Shape ``(n*(m+1)+1, (n+1)**(m+1))``; maps ``vec(x_matrix(x, n, m))`` to
    ``monomial_basis(x, n*(m+1))``. Built from
    ``E^(m) = E_{nm+1,n+1} (I_{n+1} ⊗ E^(m-1))`` with ``E^(1) = E_{n+1,n+1}``.
    ``m = 0`` gives the identity.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    return _elim_order(n, m).copy()


def duplicating_matrix_order(n, m):
    """Order-``m`` L-duplicating matrix, the right inverse of :func:`eliminating_matrix_order`.

    Built from ``D^(m) = (I_{n+1} ⊗ D^(m-1)) D_{nm+1,n+1}``.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    return _dup_order(n, m).copy()


@lru_cache(maxsize=None)
def _indices(kind, n, m):
    M = _elim_order(n, m) if kind == "E" else _dup_order(n, m)
    idx = M.indices.copy()
    idx.setflags(write=False)
    return idx


def elimination_indices(n, m):
    """Column picked by each row of ``E^(m)``; applying ``E^(m)`` is ``v[idx]``."""
    return _indices("E", n, m)


def duplication_indices(n, m):
    """Column hit by each row of ``D^(m)``; applying ``D^(m)`` is ``w[idx]``."""
    return _indices("D", n, m)


def block_exponent(n, r, k):
    """Exponent ``j`` such that block ``k`` (1-based) of ``x_matrix(x, n, r)`` is ``x**j * X_n(x)``.

    Equals the sum of the base-``(n+1)`` digits of ``k - 1``.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    N = n + 1
    if not 1 <= k <= N ** (r - 1):
        raise ValueError(f"block index k={k} outside 1..{N ** (r - 1)}")
    return sum(((k - 1) % N ** (r - j)) // N ** (r - 1 - j) for j in range(r))


def block_cardinality(n, r):
    """Multiplicity of each block exponent ``j = 0..(r-1)n``.

    These are the coefficients of ``(1 + x + ... + x**n)**(r-1)``.
    """
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    coeffs = np.array([1], dtype=np.int64)
    ones = np.ones(n + 1, dtype=np.int64)
    for _ in range(r - 1):
        coeffs = np.convolve(coeffs, ones)
    return coeffs


def dup_column_counts(n, m):
    """Number of ones in each column of ``D_{n,m}`` (skew-diagonal lengths)."""
    _check_dims(n, m)
    lo, hi = min(n, m), max(n, m)
    counts = []
    for k in range(1, n + m):
        if n == m:
            counts.append(k if k <= n - 1 else 2 * n - k)
        elif k <= lo - 1:
            counts.append(k)
        elif k <= hi - 1:
            counts.append(lo)
        else:
            counts.append(n + m - k)
    return np.array(counts, dtype=np.int64)

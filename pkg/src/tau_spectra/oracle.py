"""Reference eigensolver for symmetric tridiagonal matrices.

Eigenvalues come from Sturm-sequence bisection, written without any use of
the secular equations so it can serve as an independent check on
:mod:`tau_spectra.spectral_solver`. Eigenvectors, when requested, come from
LAPACK via :func:`scipy.linalg.eigh_tridiagonal`.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidDimensionError
from .tau_core import SymmetricTridiagonal

__all__ = ["sturm_count", "oracle_eigs"]

_PIVOT_FLOOR = np.finfo(float).tiny ** 0.5


def sturm_count(diag, offdiag, x):
    """Number of eigenvalues strictly less than each entry of ``x``.

    Uses the LDL^T pivot recurrence ``q_i = d_i - x - e_{i-1}^2 / q_{i-1}``;
    pivots smaller in modulus than a safe minimum are replaced by its negative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e2 = np.asarray(offdiag, dtype=float) ** 2
    q = diag[0] - x
    q = np.where(np.abs(q) < _PIVOT_FLOOR, -_PIVOT_FLOOR, q)
    count = (q < 0).astype(int)
    for i in range(1, len(diag)):
        q = diag[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < _PIVOT_FLOOR, -_PIVOT_FLOOR, q)
        count += q < 0
    return count


def _bisect_all(diag, offdiag):
    n = len(diag)
    # Gershgorin interval contains every eigenvalue.
    radius = np.zeros(n)
    radius[:-1] += np.abs(offdiag)
    radius[1:] += np.abs(offdiag)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    scale = max(abs(lo), abs(hi), 1.0)
    pad = 2 * np.finfo(float).eps * scale
    lo -= pad
    hi += pad
    # k-th smallest eigenvalue lies in (a_k, b_k]; bisect all n in lockstep.
    k = np.arange(n)
    a = np.full(n, lo)
    b = np.full(n, hi)
    for _ in range(200):
        m = 0.5 * (a + b)
        active = (m > a) & (m < b)
        if not active.any():
            break
        below = sturm_count(diag, offdiag, m) > k
        b = np.where(active & below, m, b)
        a = np.where(active & ~below, m, a)
    return 0.5 * (a + b)


def oracle_eigs(matrix: SymmetricTridiagonal, vectors: bool = False):
    """Eigenvalues of ``matrix`` sorted in descending order.

    With ``vectors=True`` also returns an ``(n, n)`` array whose columns are
    unit eigenvectors in the same order.
    """
    if matrix.n < 1:
        raise InvalidDimensionError("matrix dimension must be >= 1")
    diag = matrix.diag
    offdiag = matrix.offdiag
    if matrix.n == 1:
        vals = diag.copy()
    else:
        vals = _bisect_all(diag, offdiag)[::-1]
    if not vectors:
        return vals
    _, vecs = eigh_tridiagonal(diag, offdiag)
    return vals, vecs[:, ::-1]

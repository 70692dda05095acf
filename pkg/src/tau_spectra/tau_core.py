"""The tau(eps, phi) tridiagonal family and its structural identities.

``T(n, eps, phi)`` is the n x n symmetric tridiagonal matrix with zero
interior diagonal, unit off-diagonals, ``eps`` in the top-left corner and
``phi`` in the bottom-right corner.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, InvalidDimensionError

__all__ = [
    "TauParams",
    "SymmetricTridiagonal",
    "OutlierBudget",
    "build_dense",
    "flip_conjugate",
    "flip_vector",
    "quasi_eigenpair_residual",
    "outlier_budget",
]


@dataclass(frozen=True)
class TauParams:
    n: int
    eps: float
    phi: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidDimensionError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "eps", float(self.eps))
        object.__setattr__(self, "phi", float(self.phi))

    def negated(self) -> "TauParams":
        """Parameters of ``-S T S`` with ``S = diag((-1)^i)``, i.e. ``(n, -eps, -phi)``."""
        return TauParams(self.n, -self.eps, -self.phi)


@dataclass(frozen=True, eq=False)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix stored by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        e = np.array(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise InvalidDimensionError("empty matrix")
        if e.size != d.size - 1:
            raise InvalidDimensionError(
                f"offdiag must have length {d.size - 1}, got {e.size}"
            )
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        return y


@dataclass(frozen=True)
class OutlierBudget:
    max_outliers: int
    pm2_excluded: bool


def build_dense(params: TauParams) -> SymmetricTridiagonal:
    n = params.n
    diag = np.zeros(n)
    diag[0] = params.eps
    diag[-1] = params.phi
    return SymmetricTridiagonal(diag, np.ones(n - 1))


def flip_conjugate(params: TauParams) -> TauParams:
    """Parameters of ``E T E`` where ``E`` reverses the index order."""
    return TauParams(params.n, params.phi, params.eps)


def flip_vector(v):
    """Apply the flip matrix: an eigenvector of T(eps, phi) becomes one of T(phi, eps)."""
    return np.asarray(v)[::-1].copy()


def quasi_eigenpair_residual(params: TauParams, side: Literal["left", "right"]):
    """Return ``(value, vector, residual_norm)`` for the geometric quasi-eigenvector.

    ``side="left"`` uses ``v_i = eps^(1-i)`` with value ``eps + 1/eps``;
    ``side="right"`` uses ``w_i = phi^(i-n)`` with value ``phi + 1/phi``.
    The residual ``T v - value v`` is supported on a single corner entry and
    its norm is ``|x|^(-n) |eps*phi - 1|`` for the anchoring parameter ``x``.
    """
    n, eps, phi = params.n, params.eps, params.phi
    if side == "left":
        x = eps
        exponents = -np.arange(n, dtype=float)
    elif side == "right":
        x = phi
        exponents = np.arange(n, dtype=float) - (n - 1)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if x == 0.0:
        raise DomainError(f"quasi-eigenpair on the {side} side needs a nonzero corner entry")
    value = x + 1.0 / x
    vector = np.sign(x) ** np.abs(exponents) * np.abs(x) ** exponents
    residual_norm = abs(x) ** (-n) * abs(eps * phi - 1.0)
    return value, vector, residual_norm


def outlier_budget(params: TauParams) -> OutlierBudget:
    big_eps = abs(params.eps) > 1.0
    big_phi = abs(params.phi) > 1.0
    return OutlierBudget(
        max_outliers=int(big_eps) + int(big_phi),
        pm2_excluded=abs(params.eps) < 1.0 or abs(params.phi) < 1.0,
    )


def count_outliers(eigenvalues) -> int:
    """Number of eigenvalues strictly outside [-2, 2] (no tolerance band)."""
    return int(np.count_nonzero(np.abs(np.asarray(eigenvalues)) > 2.0))

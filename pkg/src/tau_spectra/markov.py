"""Birth-death queues, lattice random walks and their tensor products.

The transposed queue generator is similar to a shifted, scaled tau matrix:
``Q^T = D X D^-1`` with ``D = diag(tau^(i-1))``, ``tau = sqrt(lam/mu)`` and
``X = -(lam+mu) I + sqrt(lam mu) T(n, 1/tau, tau)``. Since the corner product
is one, ``X`` has a closed-form orthonormal eigenbasis ``U`` and every
expansion here works in those symmetric coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidDimensionError,
    NormalizationError,
    NotSymmetrizableError,
    ResourceLimitError,
)
from .spectral_solver import reciprocal_family
from .tau_core import SymmetricTridiagonal

__all__ = [
    "BirthDeathParams",
    "RandomWalkParams",
    "MultiIndexSpace",
    "AxisFactor",
    "SpectrumReport",
    "queue_generator",
    "walk_matrix",
    "symmetrize",
    "geometric_steady_state",
    "queue_spectrum",
    "walk_spectrum",
    "lex_linearize",
    "lex_delinearize",
    "kron_spectrum",
    "expand",
    "reconstruct",
    "transient_evolve",
    "apply_axis",
]

RHO_ONE_TOL = 1e-12
SUM_TOL = 1e-9
DENSE_LIMIT = 4096


def _check_n(n):
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"n must be an integer >= 2, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class BirthDeathParams:
    """Queue with ``n`` states, birth rate ``lam`` and death rate ``mu``."""

    n: int
    lam: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "n", _check_n(self.n))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))
        if not self.lam * self.mu > 0:
            raise DomainError(f"need lam*mu > 0, got lam={self.lam}, mu={self.mu}")

    @property
    def tau(self) -> float:
        return math.sqrt(self.lam / self.mu)

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    @property
    def positive(self) -> bool:
        return self.lam > 0

    def symmetrizer(self) -> np.ndarray:
        return self.tau ** np.arange(self.n, dtype=float)


@dataclass(frozen=True)
class RandomWalkParams:
    """Reflected walk on ``n`` sites: step up with ``p``, down with ``q``."""

    n: int
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "n", _check_n(self.n))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if not (self.p > 0 and self.q > 0):
            raise DomainError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.p + self.q > 1.0 + 1e-15:
            raise DomainError(f"p + q must not exceed 1, got {self.p + self.q}")

    def as_birth_death(self) -> BirthDeathParams:
        return BirthDeathParams(self.n, self.p, self.q)


@dataclass(frozen=True)
class MultiIndexSpace:
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise InvalidDimensionError(f"dims must be a non-empty list of positive sizes, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def ndim(self) -> int:
        return len(self.dims)


# ---------------------------------------------------------------------------
# one-dimensional models


def queue_generator(params: BirthDeathParams) -> np.ndarray:
    n, lam, mu = params.n, params.lam, params.mu
    Q = np.zeros((n, n))
    idx = np.arange(n - 1)
    Q[idx, idx + 1] = lam
    Q[idx + 1, idx] = mu
    Q[np.arange(n), np.arange(n)] = -Q.sum(axis=1)
    return Q


def walk_matrix(params: RandomWalkParams) -> np.ndarray:
    return np.eye(params.n) + queue_generator(params.as_birth_death())


def symmetrize(T):
    """Diagonal similarity ``T = D X D^-1`` making a sign-consistent tridiagonal symmetric.

    Returns ``(d, X)`` with ``d`` the diagonal of ``D`` (``d[0] = 1``).
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InvalidDimensionError("symmetrize needs a square matrix")
    n = T.shape[0]
    if np.any(np.triu(T, 2)) or np.any(np.tril(T, -2)):
        raise NotSymmetrizableError("matrix is not tridiagonal")
    b = np.diag(T, 1)
    c = np.diag(T, -1)
    if np.any(b * c <= 0):
        raise NotSymmetrizableError("paired off-diagonal products must be positive")
    ratio = np.sqrt(c / b)
    d = np.concatenate([[1.0], np.cumprod(ratio)]) if n > 1 else np.ones(1)
    X = SymmetricTridiagonal(np.diag(T).copy(), np.sign(b) * np.sqrt(b * c))
    return d, X


def geometric_steady_state(n: int, rho: float) -> np.ndarray:
    """``(1-rho)/(1-rho^n) [1, rho, ..., rho^(n-1)]`` evaluated in log space."""
    if abs(rho - 1.0) <= RHO_ONE_TOL:
        return np.full(n, 1.0 / n)
    logw = np.arange(n) * math.log(rho)
    w = np.exp(logw - logw.max())
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class AxisFactor:
    """Spectral data of one axis.

    ``values`` are eigenvalues of the transposed matrix (descending),
    ``U`` holds the orthonormal eigenvectors of the symmetrized matrix as
    columns and ``d`` is the symmetrizer, so eigenvectors are ``d[:, None] * U``.
    """

    values: np.ndarray
    U: np.ndarray
    d: np.ndarray
    steady: Optional[np.ndarray]

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def vectors(self) -> np.ndarray:
        return self.d[:, None] * self.U


def _queue_factor(params: BirthDeathParams, shift: float = 0.0) -> AxisFactor:
    lam, mu = params.lam, params.mu
    s = math.sqrt(lam * mu) * (1.0 if lam > 0 else -1.0)
    dec = reciprocal_family(params.n, 1.0 / params.tau)
    values = -(lam + mu) + s * dec.eigenvalues
    values[0] = 0.0  # the top mode of T is the stationary one
    order = np.argsort(-values, kind="stable")
    U = dec.vectors[:, order]
    steady = geometric_steady_state(params.n, params.rho) if params.positive else None
    return AxisFactor(values[order] + shift, U, params.symmetrizer(), steady)


def _second_largest(values) -> float:
    v = np.sort(np.asarray(values).ravel())[::-1]
    return float(v[1])


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Spectrum of a transposed generator (``kind="generator"``) or transition matrix (``"chain"``).

    ``eigenvalues`` is indexed by the per-axis mode multi-index in
    lexicographic order; ``steady_state`` has the lattice shape, or is
    ``None`` when the rates are not a probability model.
    """

    kind: str
    factors: tuple
    eigenvalues: np.ndarray
    steady_state: Optional[np.ndarray]
    gap: float
    probabilistic: bool = field(default=True)

    @property
    def dims(self) -> tuple:
        return tuple(f.n for f in self.factors)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def eigenvector(self, k) -> np.ndarray:
        """Eigenvector for the 0-based mode multi-index ``k`` (flattened, lexicographic)."""
        k = np.atleast_1d(k)
        vec = np.ones(1)
        for f, kk in zip(self.factors, k):
            vec = np.kron(vec, f.vectors[:, int(kk)])
        return vec

    def eigenvectors(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        """Dense eigenvector matrix (columns in the order of ``eigenvalues.ravel()``)."""
        if self.size > limit:
            raise ResourceLimitError(
                f"refusing to materialize {self.size}x{self.size} eigenvectors (limit {limit})"
            )
        M = np.ones((1, 1))
        for f in self.factors:
            M = np.kron(M, f.vectors)
        return M


def queue_spectrum(params: BirthDeathParams) -> SpectrumReport:
    f = _queue_factor(params)
    return SpectrumReport(
        kind="generator",
        factors=(f,),
        eigenvalues=f.values.copy(),
        steady_state=f.steady,
        gap=float(f.values[1]),
        probabilistic=params.positive,
    )


def walk_spectrum(params: RandomWalkParams) -> SpectrumReport:
    f = _queue_factor(params.as_birth_death(), shift=1.0)
    return SpectrumReport(
        kind="chain",
        factors=(f,),
        eigenvalues=f.values.copy(),
        steady_state=f.steady,
        gap=float(f.values[1]),
    )


# ---------------------------------------------------------------------------
# multi-index bookkeeping


def lex_linearize(space: MultiIndexSpace, idx) -> int:
    """0-based position of the 1-based multi-index ``idx``; the last axis varies fastest."""
    idx = tuple(int(i) for i in idx)
    if len(idx) != space.ndim:
        raise InvalidDimensionError(f"index has {len(idx)} components, space has {space.ndim}")
    for i, d in zip(idx, space.dims):
        if not 1 <= i <= d:
            raise InvalidDimensionError(f"index {idx} out of range for dims {space.dims}")
    return int(np.ravel_multi_index(tuple(i - 1 for i in idx), space.dims))


def lex_delinearize(space: MultiIndexSpace, pos: int) -> tuple:
    if not 0 <= pos < space.size:
        raise InvalidDimensionError(f"position {pos} out of range for {space.size} states")
    return tuple(int(i) + 1 for i in np.unravel_index(int(pos), space.dims))


# ---------------------------------------------------------------------------
# tensor products


def _combine(values: Sequence[np.ndarray], kind: str) -> np.ndarray:
    op = np.multiply if kind == "chain" else np.add
    out = values[0]
    for v in values[1:]:
        out = op.outer(out, v)
    return np.asarray(out)


def kron_spectrum(space: MultiIndexSpace, axis_params, kind: str) -> SpectrumReport:
    """Spectrum of a tensor-product chain (``kind="chain"``) or Kronecker-sum generator."""
    if kind not in ("chain", "generator"):
        raise ValueError(f"kind must be 'chain' or 'generator', got {kind!r}")
    axis_params = list(axis_params)
    if len(axis_params) != space.ndim:
        raise InvalidDimensionError(
            f"{len(axis_params)} axis parameter sets for a {space.ndim}-dimensional space"
        )
    factors = []
    for p, n in zip(axis_params, space.dims):
        if p.n != n:
            raise InvalidDimensionError(f"axis size {p.n} does not match space dimension {n}")
        if kind == "chain":
            if not isinstance(p, RandomWalkParams):
                raise DomainError("chain products need RandomWalkParams on every axis")
            factors.append(_queue_factor(p.as_birth_death(), shift=1.0))
        else:
            bd = p.as_birth_death() if isinstance(p, RandomWalkParams) else p
            factors.append(_queue_factor(bd))
    eig = _combine([f.values for f in factors], kind)
    probabilistic = all(f.steady is not None for f in factors)
    steady = None
    if probabilistic:
        steady = _combine([f.steady for f in factors], "chain")
    if kind == "generator":
        gap = max(float(f.values[1]) for f in factors)
    else:
        gap = _second_largest(eig)
    return SpectrumReport(kind, tuple(factors), eig, steady, gap, probabilistic)


def apply_axis(x: np.ndarray, M: np.ndarray, axis: int) -> np.ndarray:
    """Multiply tensor ``x`` by matrix ``M`` along ``axis``."""
    return np.moveaxis(np.tensordot(M, x, axes=([1], [axis])), 0, axis)


def _as_tensor(report: SpectrumReport, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != report.dims:
        if x.size != report.size:
            raise InvalidDimensionError(
                f"tensor of shape {x.shape} does not fit lattice {report.dims}"
            )
        x = x.reshape(report.dims)
    return x


def expand(report: SpectrumReport, p) -> np.ndarray:
    """Coefficients ``c`` with ``p = sum_k c_k w_k`` (tensor indexed like ``eigenvalues``)."""
    c = _as_tensor(report, p)
    for ax, f in enumerate(report.factors):
        c = apply_axis(c, f.U.T / f.d[None, :], ax)
    return c


def reconstruct(report: SpectrumReport, c) -> np.ndarray:
    x = _as_tensor(report, c)
    for ax, f in enumerate(report.factors):
        x = apply_axis(x, f.vectors, ax)
    return x


def _check_probability(p, what="p0"):
    s = float(p.sum())
    if not np.all(np.isfinite(p)) or abs(s - 1.0) > SUM_TOL:
        raise NormalizationError(f"{what} must sum to 1 (got {s!r})")


def transient_evolve(report: SpectrumReport, p0, t: float, kind: Optional[str] = None):
    """Distribution after time ``t`` (generator) or ``t`` steps (chain).

    ``kind`` may be given as ``"generator-time"`` or ``"chain-step"`` and
    must then agree with the report. The result is returned with the
    lattice shape and is never renormalized.
    """
    expected = "chain-step" if report.kind == "chain" else "generator-time"
    if kind is not None and kind != expected:
        raise DomainError(f"report of kind {report.kind!r} cannot be evolved as {kind!r}")
    p0 = _as_tensor(report, p0)
    _check_probability(p0)
    if not t >= 0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if report.kind == "chain" and int(t) != t:
        raise DomainError(f"chain evolution needs an integer number of steps, got {t!r}")
    if t == 0:
        return p0.copy()
    c = expand(report, p0)
    if report.kind == "chain":
        weights = report.eigenvalues ** int(t)
    else:
        weights = np.exp(report.eigenvalues * t)
    out = reconstruct(report, c * weights)
    _check_probability(out, "evolved distribution")
    return out

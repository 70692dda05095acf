"""Upwind finite-difference discretization of reflected Brownian motion on [0, 1]^d."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DomainError,
    IllPosedDiscretizationError,
    InvalidDimensionError,
    ResourceLimitError,
    TauSpectraError,
)
from .markov import (
    BirthDeathParams,
    MultiIndexSpace,
    SpectrumReport,
    apply_axis,
    geometric_steady_state,
    kron_spectrum,
    queue_generator,
    transient_evolve,
)

__all__ = [
    "DiffusionAxis",
    "DiffusionSpec",
    "axis_rates",
    "axis_generator",
    "drift_matrix",
    "diffusion_matrix",
    "generator_apply",
    "diffusion_spectrum",
    "diffusion_steady_state",
    "diffusion_gap",
    "convergence_rate_estimate",
    "DegenerateInputError",
]


class DegenerateInputError(TauSpectraError):
    pass


@dataclass(frozen=True)
class DiffusionAxis:
    """One coordinate: ``n`` nodes, drift ``mu``, variance ``sigma2``, spacing ``delta``.

    ``delta`` defaults to ``1/(n-1)``, so the nodes are ``(i-1) delta``.
    """

    n: int
    mu: float
    sigma2: float
    delta: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidDimensionError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        delta = 1.0 / (self.n - 1) if self.delta is None else float(self.delta)
        if not delta > 0 or not math.isfinite(delta):
            raise DomainError(f"delta must be positive, got {self.delta!r}")
        object.__setattr__(self, "delta", delta)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.delta

    def replace(self, **kw) -> "DiffusionAxis":
        args = dict(n=self.n, mu=self.mu, sigma2=self.sigma2, delta=self.delta)
        args.update(kw)
        return DiffusionAxis(**args)


@dataclass(frozen=True)
class DiffusionSpec:
    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise InvalidDimensionError("a diffusion needs at least one axis")
        if not all(isinstance(a, DiffusionAxis) for a in axes):
            raise TypeError("axes must be DiffusionAxis instances")
        object.__setattr__(self, "axes", axes)

    @property
    def dims(self) -> tuple:
        return tuple(a.n for a in self.axes)

    @property
    def space(self) -> MultiIndexSpace:
        return MultiIndexSpace(self.dims)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def with_axis(self, r: int, axis: DiffusionAxis) -> "DiffusionSpec":
        axes = list(self.axes)
        axes[r] = axis
        return DiffusionSpec(tuple(axes))


def axis_rates(axis: DiffusionAxis):
    """Upwind birth/death rates ``(lam, mu, rho)`` of one axis.

    The drift enters the birth rate when ``mu >= 0`` and the death rate when
    ``mu <= 0``; both branches coincide at ``mu = 0``.
    """
    base = axis.sigma2 / (2.0 * axis.delta**2)
    drift = axis.mu / axis.delta
    if axis.mu >= 0:
        lam, mu = base + drift, base
    else:
        lam, mu = base, base - drift
    if not (lam > 0 and mu > 0):
        raise IllPosedDiscretizationError(
            f"upwind rates must be positive (got {lam!r}, {mu!r}); sigma2 must be > 0",
            min_n=None,
        )
    return lam, mu, lam / mu


def _birth_death(axis: DiffusionAxis) -> BirthDeathParams:
    lam, mu, _ = axis_rates(axis)
    return BirthDeathParams(axis.n, lam, mu)


def axis_generator(axis: DiffusionAxis) -> np.ndarray:
    return queue_generator(_birth_death(axis))


def drift_matrix(axis: DiffusionAxis) -> np.ndarray:
    """One-sided difference of the drift term with reflecting ends."""
    n, h, m = axis.n, axis.delta, axis.mu
    A = np.zeros((n, n))
    i = np.arange(n - 1)
    if m >= 0:
        A[i, i] = -m / h
        A[i, i + 1] = m / h
    else:
        A[i + 1, i + 1] = m / h
        A[i + 1, i] = -m / h
    return A


def diffusion_matrix(axis: DiffusionAxis) -> np.ndarray:
    """Second difference scaled by ``sigma2 / 2`` with reflecting ends."""
    n = axis.n
    c = axis.sigma2 / (2.0 * axis.delta**2)
    B = np.zeros((n, n))
    i = np.arange(n - 1)
    B[i, i + 1] = c
    B[i + 1, i] = c
    B[np.arange(n), np.arange(n)] = -B.sum(axis=1)
    return B


def generator_apply(spec: DiffusionSpec, x, transpose: bool = False) -> np.ndarray:
    """Apply the Kronecker-sum generator (or its transpose) to a lattice tensor.

    A flat vector of the right length is accepted and returned flat.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ndim == 1 and spec.ndim > 1
    if x.shape != spec.dims:
        if not flat or x.size != int(np.prod(spec.dims)):
            raise InvalidDimensionError(f"tensor of shape {x.shape} does not fit lattice {spec.dims}")
        x = x.reshape(spec.dims)
    out = np.zeros_like(x)
    for r, axis in enumerate(spec.axes):
        G = axis_generator(axis)
        out += apply_axis(x, G.T if transpose else G, r)
    return out.ravel() if flat else out


def diffusion_spectrum(spec: DiffusionSpec, full: bool = False, max_values: int = 10**6) -> SpectrumReport:
    """Kronecker-sum spectrum of the transposed generator.

    Eigenvectors stay factored per axis. With ``full=True`` the dense
    eigenvector matrix is also checked against ``max_values`` entries and
    attached as ``report.dense_vectors``.
    """
    report = kron_spectrum(spec.space, [_birth_death(a) for a in spec.axes], "generator")
    if full:
        N = report.size
        if N * N > max_values:
            raise ResourceLimitError(f"{N}x{N} eigenvectors exceed the {max_values}-value limit")
        object.__setattr__(report, "dense_vectors", report.eigenvectors(limit=N))
    return report


def diffusion_steady_state(spec: DiffusionSpec) -> np.ndarray:
    p = np.ones(())
    for axis in spec.axes:
        _, _, rho = axis_rates(axis)
        p = np.multiply.outer(p, geometric_steady_state(axis.n, rho))
    return p


def diffusion_gap(spec: DiffusionSpec) -> float:
    out = -math.inf
    for axis in spec.axes:
        lam, mu, _ = axis_rates(axis)
        out = max(out, -lam - mu + 2.0 * math.sqrt(lam * mu) * math.cos(math.pi / axis.n))
    return out


def convergence_rate_estimate(spec: DiffusionSpec, p0, t_grid) -> float:
    """Least-squares slope of ``log ||p(t) - p||_2`` over the second half of ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 3 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be an increasing sequence of at least 3 times")
    report = diffusion_spectrum(spec)
    steady = report.steady_state
    p0 = np.asarray(p0, dtype=float).reshape(spec.dims)
    if np.linalg.norm(p0 - steady) <= 1e-14:
        raise DegenerateInputError("p0 is the steady state; the distance has no decay rate")
    ts = t_grid[t_grid.size // 2 :]
    dist = np.array([np.linalg.norm(transient_evolve(report, p0, t) - steady) for t in ts])
    if np.any(dist <= 0) or not np.all(np.isfinite(dist)):
        raise DegenerateInputError("distance to the steady state underflowed on the fitting window")
    slope, _ = np.polyfit(ts, np.log(dist), 1)
    return float(slope)

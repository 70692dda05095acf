"""Stationary moments of a payoff over the diffusion lattice and their parameter derivatives."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diffusion import DiffusionAxis, DiffusionSpec, axis_rates, diffusion_steady_state
from .errors import DomainError, InvalidDimensionError, NormalizationError, TauSpectraError
from .markov import geometric_steady_state

__all__ = [
    "PayoffTensor",
    "MomentReport",
    "SensitivityReport",
    "linear_payoff",
    "payoff_moments",
    "rho_derivatives",
    "dp_drho",
    "stationary_sensitivities",
    "finite_difference_sensitivities",
    "comparative_sweep",
    "sweep_columns",
]

RHO_LIMIT_TOL = 1e-8
RHO_DISPLAY_TOL = 1e-2


@dataclass(frozen=True, eq=False)
class PayoffTensor:
    values: np.ndarray
    description: str = ""

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class MomentReport:
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    """Derivatives of the stationary mean and variance; arrays are indexed by axis."""

    dmean_dmu: np.ndarray
    dmean_dsigma2: np.ndarray
    dvar_dmu: np.ndarray
    dvar_dsigma2: np.ndarray
    dp_dmu: Optional[tuple] = field(default=None)
    dp_dsigma2: Optional[tuple] = field(default=None)


def linear_payoff(spec: DiffusionSpec, weights) -> PayoffTensor:
    weights = [float(w) for w in weights]
    if len(weights) != spec.ndim:
        raise InvalidDimensionError(f"{len(weights)} weights for {spec.ndim} axes")
    W = np.zeros(())
    for w, axis in zip(weights, spec.axes):
        W = np.add.outer(W, w * axis.nodes)
    desc = " + ".join(f"{w:g}*x{r + 1}" for r, w in enumerate(weights))
    return PayoffTensor(np.asarray(W, dtype=float), desc)


def _check_pair(W: PayoffTensor, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != W.shape:
        raise InvalidDimensionError(f"payoff shape {W.shape} does not match distribution {p.shape}")
    return p


def payoff_moments(W: PayoffTensor, p) -> MomentReport:
    p = _check_pair(W, p)
    if abs(p.sum() - 1.0) > 1e-9:
        raise NormalizationError(f"p must sum to 1 (got {p.sum()!r})")
    mean = float(np.sum(W.values * p))
    var = float(np.sum(W.values**2 * p) - mean**2)
    return MomentReport(mean, var)


def rho_derivatives(axis: DiffusionAxis):
    """``(d rho / d mu, d rho / d sigma2)`` for the upwind rate ratio of ``axis``."""
    _, mu_t, _ = axis_rates(axis)
    h, s2, m = axis.delta, axis.sigma2, axis.mu
    if m >= 0:
        d_mu = 2.0 * h / s2
    else:
        d_mu = 2.0 * h * s2 / (s2 - 2.0 * h * m) ** 2
    d_s2 = -m / (2.0 * h**3 * mu_t**2)
    return d_mu, d_s2


def dp_drho(n: int, rho: float) -> np.ndarray:
    """Derivative of the geometric steady state with respect to ``rho``.

    Uses the two-term closed form away from ``rho = 1``, the equivalent
    ``p_i (i - m) / rho`` (``m`` the mean index) close to it, and the limit
    ``(2i - n - 1) / (2n)`` within ``RHO_LIMIT_TOL``.
    """
    i = np.arange(n, dtype=float)
    if abs(rho - 1.0) <= RHO_LIMIT_TOL:
        return (2.0 * (i + 1) - n - 1) / (2.0 * n)
    if abs(rho - 1.0) > RHO_DISPLAY_TOL and n * abs(math.log(rho)) < 600:
        rn = rho**n
        a = ((1 - n) * rn + n * rho ** (n - 1) - 1) / (1 - rn) ** 2
        b = (1 - rho) / (1 - rn)
        powers = rho**i
        dpowers = np.concatenate([[0.0], i[1:] * rho ** (i[1:] - 1)])
        return a * powers + b * dpowers
    p = geometric_steady_state(n, rho)
    m = float(np.sum(i * p))
    return p * (i - m) / rho


def _replace_factor(factors, r, new):
    out = np.ones(())
    for k, f in enumerate(factors):
        out = np.multiply.outer(out, new if k == r else f)
    return out


def stationary_sensitivities(spec: DiffusionSpec, W: PayoffTensor, tensors: bool = False) -> SensitivityReport:
    factors = []
    for axis in spec.axes:
        _, _, rho = axis_rates(axis)
        factors.append(geometric_steady_state(axis.n, rho))
    p = _replace_factor(factors, -1, None)
    _check_pair(W, p)
    Wv = W.values
    mean = float(np.sum(Wv * p))

    d = spec.ndim
    out = {k: np.zeros(d) for k in ("dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2")}
    dps_mu, dps_s2 = [], []
    for r, axis in enumerate(spec.axes):
        _, _, rho = axis_rates(axis)
        d_mu, d_s2 = rho_derivatives(axis)
        base = _replace_factor(factors, r, dp_drho(axis.n, rho))
        for name, scale, store in (("mu", d_mu, dps_mu), ("sigma2", d_s2, dps_s2)):
            dp = scale * base
            dW = float(np.sum(Wv * dp))
            out[f"dmean_d{name}"][r] = dW
            out[f"dvar_d{name}"][r] = float(np.sum(Wv**2 * dp)) - 2.0 * mean * dW
            if tensors:
                store.append(dp)
    return SensitivityReport(
        dp_dmu=tuple(dps_mu) if tensors else None,
        dp_dsigma2=tuple(dps_s2) if tensors else None,
        **out,
    )


def _moments_at(spec, W):
    return payoff_moments(W, diffusion_steady_state(spec))


def finite_difference_sensitivities(spec: DiffusionSpec, W: PayoffTensor, step: float = 1e-6) -> SensitivityReport:
    """Central-difference counterpart of :func:`stationary_sensitivities` (test oracle)."""
    d = spec.ndim
    out = {k: np.zeros(d) for k in ("dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2")}
    for r, axis in enumerate(spec.axes):
        for name, value in (("mu", axis.mu), ("sigma2", axis.sigma2)):
            hi = _moments_at(spec.with_axis(r, axis.replace(**{name: value + step})), W)
            lo = _moments_at(spec.with_axis(r, axis.replace(**{name: value - step})), W)
            out[f"dmean_d{name}"][r] = (hi.mean - lo.mean) / (2 * step)
            out[f"dvar_d{name}"][r] = (hi.variance - lo.variance) / (2 * step)
    return SensitivityReport(**out)


def _parse_target(target, d):
    """``"mu_1"`` / ``"sigma2_2"`` (1-based axis) or ``(name, r)`` with 0-based ``r``."""
    if isinstance(target, str):
        name, _, idx = target.rpartition("_")
        try:
            r = int(idx) - 1
        except ValueError:
            raise DomainError(f"bad sweep target {target!r}; use e.g. 'mu_1' or 'sigma2_2'") from None
    else:
        name, r = target
    if name not in ("mu", "sigma2") or not 0 <= r < d:
        raise DomainError(f"bad sweep target {target!r} for {d} axes")
    return name, r


def sweep_columns(d: int) -> list:
    cols = ["parameter_name", "value", "status", "mean", "variance"]
    for key in ("dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2"):
        cols += [f"{key}_{r + 1}" for r in range(d)]
    return cols


def _sweep_row(spec, W, name, r, value):
    d = spec.ndim
    label = f"{name}_{r + 1}"
    row = {c: math.nan for c in sweep_columns(d)}
    row.update(parameter_name=label, value=float(value))
    try:
        s = spec.with_axis(r, spec.axes[r].replace(**{name: float(value)}))
        m = _moments_at(s, W)
        sens = stationary_sensitivities(s, W)
    except TauSpectraError as exc:
        row["status"] = f"error: {exc}"
        return row
    row.update(status="ok", mean=m.mean, variance=m.variance)
    for key in ("dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2"):
        for k in range(d):
            row[f"{key}_{k + 1}"] = float(getattr(sens, key)[k])
    return row


def comparative_sweep(spec: DiffusionSpec, W: PayoffTensor, target, grid, threads: int = 1) -> list:
    """One row per grid value of ``target``; failing points are kept with an error status.

    Rows come back in grid order regardless of ``threads``.
    """
    name, r = _parse_target(target, spec.ndim)
    grid = [float(g) for g in grid]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda g: _sweep_row(spec, W, name, r, g), grid))
    return [_sweep_row(spec, W, name, r, g) for g in grid]

"""Full eigendecomposition of T(n, eps, phi) from its secular equations.

Every eigenvalue of T is of one of five kinds, each tied to an analytic
branch:

* ``trig``            lambda = 2 cos(theta),  theta in (0, pi)
* ``hyper_pos``       lambda = 2 cosh(theta), theta > 0
* ``hyper_neg``       lambda = -2 cosh(theta), theta > 0
* ``boundary_plus``   lambda = 2
* ``boundary_minus``  lambda = -2

and for each branch a scalar equation in theta decides membership while an
explicit formula gives the eigenvector. :func:`solve` brackets and bisects
those equations; :func:`closed_form` covers the parameter sets where the
roots are known in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import minimize_scalar

from .errors import (
    DegenerateVectorError,
    DomainError,
    IncompleteSpectrumError,
    UnsupportedBranchError,
)
from .oracle import oracle_eigs
from .tau_core import TauParams, build_dense, flip_conjugate

__all__ = [
    "Branch",
    "EigenPair",
    "SpectralDecomposition",
    "secular",
    "boundary_membership",
    "eigvec",
    "solve",
    "closed_form",
    "decompose",
    "reciprocal_family",
    "oracle_eigs",
]


class Branch(str, Enum):
    TRIG = "trig"
    HYPER_POS = "hyper_pos"
    HYPER_NEG = "hyper_neg"
    BOUNDARY_PLUS = "boundary_plus"
    BOUNDARY_MINUS = "boundary_minus"

    @property
    def has_theta(self) -> bool:
        return self in (Branch.TRIG, Branch.HYPER_POS, Branch.HYPER_NEG)


def branch_eigenvalue(branch: Branch, theta: Optional[float]) -> float:
    if branch is Branch.TRIG:
        return 2.0 * math.cos(theta)
    if branch is Branch.HYPER_POS:
        return 2.0 * math.cosh(theta)
    if branch is Branch.HYPER_NEG:
        return -2.0 * math.cosh(theta)
    if branch is Branch.BOUNDARY_PLUS:
        return 2.0
    return -2.0


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: float
    branch: Branch
    theta: Optional[float]
    vector: np.ndarray

    @property
    def residual_scale(self) -> float:
        return max(1.0, abs(self.lam))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    params: TauParams
    pairs: tuple

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as columns, ordered like :attr:`eigenvalues`."""
        return np.column_stack([p.vector for p in self.pairs])

    def residuals(self) -> np.ndarray:
        T = build_dense(self.params)
        return np.array(
            [np.linalg.norm(T.matvec(p.vector) - p.lam * p.vector) for p in self.pairs]
        )

    def outliers(self):
        return [p for p in self.pairs if abs(p.lam) > 2.0]


# ---------------------------------------------------------------------------
# secular functions


def _sinh_ratio(m, n, theta):
    """sinh(m theta) / sinh(n theta) for theta >= 0 without overflow."""
    theta = np.asarray(theta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        num = np.exp((m - n) * theta) * -np.expm1(-2.0 * m * theta)
        den = -np.expm1(-2.0 * n * theta)
        out = num / den
    return np.where(theta == 0.0, m / n, out)


def _check_theta(branch, theta):
    t = np.asarray(theta, dtype=float)
    if branch is Branch.TRIG:
        if np.any((t <= 0.0) | (t >= math.pi)):
            raise DomainError("trig branch needs theta in (0, pi)")
    elif np.any(t <= 0.0):
        raise DomainError("hyperbolic branches need theta > 0")


def secular(params: TauParams, branch: Branch, theta):
    """Secular residual for ``branch`` at ``theta`` (scalar or array).

    The trigonometric residual is returned as is. The hyperbolic residuals are
    divided by ``sinh(n theta)``, which keeps them finite for large
    ``n theta`` and leaves the zero set unchanged.
    """
    branch = Branch(branch)
    if not branch.has_theta:
        raise UnsupportedBranchError(
            f"{branch.value} has no theta; use boundary_membership instead"
        )
    _check_theta(branch, theta)
    n, s, p = params.n, params.eps + params.phi, params.eps * params.phi
    t = np.asarray(theta, dtype=float)
    if branch is Branch.TRIG:
        out = np.sin((n + 1) * t) - s * np.sin(n * t) + p * np.sin((n - 1) * t)
    else:
        sign = 1.0 if branch is Branch.HYPER_NEG else -1.0
        out = _sinh_ratio(n + 1, n, t) + sign * s + p * _sinh_ratio(n - 1, n, t)
    return out if out.ndim else float(out)


def boundary_membership(params: TauParams, sign: str) -> float:
    """Discriminant whose vanishing makes ``+2`` (``sign="plus"``) or ``-2`` an eigenvalue."""
    n, s, p = params.n, params.eps + params.phi, params.eps * params.phi
    if sign == "plus":
        return (n + 1) - s * n + p * (n - 1)
    if sign == "minus":
        return (n + 1) + s * n + p * (n - 1)
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def boundary_tolerance(n: int) -> float:
    return 1e-12 * n


def _trig_reduced(params: TauParams, theta):
    """Trig residual divided by sin(theta), continuous on [0, pi].

    At the endpoints it takes the boundary discriminants: ``D+`` at 0 and
    ``(-1)^n D-`` at pi.
    """
    n, s, p = params.n, params.eps + params.phi, params.eps * params.phi
    t = np.asarray(theta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.sin((n + 1) * t) - s * np.sin(n * t) + p * np.sin((n - 1) * t)
        g = f / np.sin(t)
    g = np.where(t == 0.0, boundary_membership(params, "plus"), g)
    g = np.where(t == math.pi, (-1) ** n * boundary_membership(params, "minus"), g)
    return g


def _hyper_scaled(params: TauParams, theta):
    """Positive-branch residual over sinh(n theta); equals D+/n at theta = 0."""
    n, s, p = params.n, params.eps + params.phi, params.eps * params.phi
    return _sinh_ratio(n + 1, n, theta) - s + p * _sinh_ratio(n - 1, n, theta)


def _symmetric_factor(eps: float, n: int, flip_sign: int):
    """Factor of the positive-branch equation when eps == phi.

    With ``z = e^theta`` the equation splits into
    ``z^n (z - eps) = s (1 - eps z)``; ``s = -1`` gives eigenvectors fixed by
    the flip and ``s = +1`` gives flip-antisymmetric ones. The returned
    function is the factor scaled by ``z^-n`` (and, for ``s = +1``, divided
    by theta to remove the trivial root at 0).
    """
    if flip_sign < 0:

        def fun(theta):
            t = np.asarray(theta, dtype=float)
            z = np.exp(t)
            return (z - eps) + np.exp(-n * t) * (1.0 - eps * z)

    else:

        def fun(theta):
            t = np.asarray(theta, dtype=float)
            with np.errstate(invalid="ignore", divide="ignore"):
                a = (np.expm1(t) - np.expm1(-n * t)) / t
                b = -np.expm1((1 - n) * t) / t
                out = a - eps * b
            return np.where(t == 0.0, (n + 1) - eps * (n - 1), out)

    return fun


# ---------------------------------------------------------------------------
# eigenvectors

_SIGN_THRESHOLD = 1e-12
_EPS = np.finfo(float).eps


def _normalize(v):
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DegenerateVectorError("eigenvector formula produced non-finite entries")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise DegenerateVectorError("eigenvector formula produced the zero vector")
    v = v / norm
    big = np.flatnonzero(np.abs(v) > _SIGN_THRESHOLD * np.max(np.abs(v)))
    if v[big[0]] < 0:
        v = -v
    return v


def _raw_vector(n: int, eps: float, branch: Branch, theta):
    i = np.arange(1, n + 1, dtype=float)
    if branch is Branch.TRIG:
        return np.sin(i * theta) - eps * np.sin((i - 1) * theta)
    if branch is Branch.HYPER_POS:
        # 2 e^(-n theta) [sinh(i theta) - eps sinh((i-1) theta)]
        return (np.exp((i - n) * theta) - np.exp(-(i + n) * theta)) - eps * (
            np.exp((i - 1 - n) * theta) - np.exp(-(i - 1 + n) * theta)
        )
    if branch is Branch.HYPER_NEG:
        signs = np.where(i % 2 == 0, 1.0, -1.0)
        return signs * _raw_vector(n, -eps, Branch.HYPER_POS, theta)
    if branch is Branch.BOUNDARY_PLUS:
        return eps + (1.0 - eps) * i
    signs = np.where(i % 2 == 0, 1.0, -1.0)
    return signs * (-eps + (1.0 + eps) * i)


def eigvec(params: TauParams, branch: Branch, theta: Optional[float] = None) -> np.ndarray:
    """Unit eigenvector from the explicit branch formula, anchored at the eps corner.

    Hyperbolic formulas are evaluated after scaling by ``2 e^(-n theta)``,
    which only changes the (positive) normalization.
    """
    branch = Branch(branch)
    if branch.has_theta:
        if theta is None:
            raise DomainError(f"{branch.value} needs theta")
        _check_theta(branch, theta)
    return _normalize(_raw_vector(params.n, params.eps, branch, theta))


def _residual(params, lam, v):
    T = build_dense(params)
    return np.linalg.norm(T.matvec(v) - lam * v)


def _stable_vector(params: TauParams, branch: Branch, theta, lam, flip_sign=None):
    """Eigenvector for a located root, chosen for accuracy.

    The eps-anchored formula loses accuracy when the eigenvector decays away
    from the eps corner, so it is compared against the phi-anchored formula
    (flipped) and a splice of the two, keeping the smallest residual. When
    ``eps == phi`` hyperbolic vectors use the exact flip-symmetric form.
    """
    n = params.n
    if flip_sign is not None:
        i = np.arange(1, n + 1, dtype=float)
        raw = np.exp(-i * theta) - flip_sign * np.exp(-(n + 1 - i) * theta)
        if branch is Branch.HYPER_NEG:
            raw = np.where(i % 2 == 0, 1.0, -1.0) * raw
        return _normalize(raw)

    left = _raw_vector(n, params.eps, branch, theta)
    right = _raw_vector(n, params.phi, branch, theta)[::-1]
    candidates = []
    for v in (left, right):
        if np.all(np.isfinite(v)) and np.any(v):
            candidates.append(_normalize(v))
    m = n // 2
    if right[m] != 0.0 and np.isfinite(right[m]):
        splice = np.concatenate([left[: m + 1], right[m + 1 :] * (left[m] / right[m])])
        if np.all(np.isfinite(splice)) and np.any(splice):
            candidates.append(_normalize(splice))
    if not candidates:
        raise DegenerateVectorError("no usable eigenvector formula")
    res = [_residual(params, lam, v) for v in candidates]
    best = int(np.argmin(res))
    scale = abs(lam) + 2.0 + abs(params.eps) + abs(params.phi)
    if res[best] > 64 * _EPS * scale * math.sqrt(n):
        polished = _inverse_step(params, lam, candidates[best])
        if polished is not None and _residual(params, lam, polished) < res[best]:
            return polished
    return candidates[best]


def _inverse_step(params: TauParams, lam, v, steps=2):
    """Shifted inverse iteration on the tridiagonal matrix; cleans up close-pair mixing."""
    n = params.n
    band = np.zeros((3, n))
    band[0, 1:] = 1.0
    band[2, :-1] = 1.0
    diag = np.zeros(n)
    diag[0], diag[-1] = params.eps, params.phi
    shift = lam + 4 * _EPS * (abs(lam) + 1.0)
    band[1] = diag - shift
    x = v
    with np.errstate(all="ignore"):
        for _ in range(steps):
            try:
                x = solve_banded((1, 1), band, x)
            except (np.linalg.LinAlgError, ValueError):
                return None
            if not np.all(np.isfinite(x)) or not np.any(x):
                return None
            x = x / np.linalg.norm(x)
    return _normalize(x)


# ---------------------------------------------------------------------------
# root finding


def _bisect(fun, a, b):
    """Vectorized bisection to machine precision; each [a_k, b_k] brackets a sign change."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if a.size == 0:
        return a
    fa = fun(a)
    for _ in range(400):
        m = 0.5 * (a + b)
        active = (m > a) & (m < b)
        if not active.any():
            break
        fm = fun(m)
        hit = active & (fm == 0.0)
        go_right = active & ~hit & (np.sign(fm) == np.sign(fa))
        go_left = active & ~hit & ~go_right
        a = np.where(go_right | hit, m, a)
        fa = np.where(go_right, fm, fa)
        b = np.where(go_left | hit, m, b)
    return 0.5 * (a + b)


def _brackets(fun, grid, refine_extrema):
    """Root brackets of ``fun`` on ``grid``.

    Sign changes between neighbours give brackets; exact zeros at nodes give
    degenerate ones. With ``refine_extrema`` a local minimum of ``|fun|`` that
    does not change sign on the grid is polished; if the polished extremum
    crosses zero it yields two brackets (a close root pair).
    """
    vals = fun(grid)
    s = np.sign(vals)
    lo, hi = [], []
    for k in np.flatnonzero(s == 0.0):
        lo.append(grid[k])
        hi.append(grid[k])
    change = np.flatnonzero(s[:-1] * s[1:] < 0)
    lo.extend(grid[change])
    hi.extend(grid[change + 1])
    if refine_extrema and len(grid) >= 3:
        a = np.abs(vals)
        cand = np.flatnonzero(
            (s[:-2] == s[1:-1])
            & (s[1:-1] == s[2:])
            & (s[1:-1] != 0)
            & (a[1:-1] < a[:-2])
            & (a[1:-1] <= a[2:])
        ) + 1
        for k in cand:
            sk = s[k]
            res = minimize_scalar(
                lambda t: sk * float(fun(np.array(t))),
                bounds=(grid[k - 1], grid[k + 1]),
                method="bounded",
                options={"xatol": 1e-15},
            )
            if sk * float(fun(np.array(res.x))) < 0:
                lo.extend([grid[k - 1], res.x])
                hi.extend([res.x, grid[k + 1]])
    order = np.argsort(lo, kind="stable")
    return np.asarray(lo, dtype=float)[order], np.asarray(hi, dtype=float)[order]


def _roots(fun, grid, refine_extrema):
    lo, hi = _brackets(fun, grid, refine_extrema)
    exact = lo == hi
    roots = lo.copy()
    roots[~exact] = _bisect(fun, lo[~exact], hi[~exact])
    return roots


def _trig_roots(params, density, has_plus, has_minus, refine):
    delta = math.pi / (2.0 * density)
    grid = np.linspace(delta, math.pi - delta, density)
    if not has_plus:
        grid = np.concatenate([[0.0], grid])
    if not has_minus:
        grid = np.concatenate([grid, [math.pi]])
    roots = _roots(lambda t: _trig_reduced(params, t), grid, refine)
    return roots[(roots > 0.0) & (roots < math.pi)]


def _theta_max(params):
    return (
        max(
            math.log(max(abs(params.eps), 1.0)),
            math.log(max(abs(params.phi), 1.0)),
        )
        + 2.0
    )


def _split_factor(params: TauParams, sign: int):
    """One factor of the positive-branch equation written as ``(z - m)^2 = R(z)``.

    Here ``z = e^theta``, ``m = (eps + phi)/2`` and
    ``R = ((phi - eps)/2)^2 + z^(-2n) (1 - eps z)(1 - phi z)``; the factor is
    ``(z - m) - sign sqrt(R)`` and is NaN where ``R < 0`` (no roots there).
    Close root pairs of the unsplit equation land in different factors.
    """
    e, f, n = params.eps, params.phi, params.n
    m = 0.5 * (e + f)
    d2 = (0.5 * (f - e)) ** 2

    def fun(theta):
        t = np.asarray(theta, dtype=float)
        z = np.exp(t)
        R = d2 + np.exp(-2.0 * n * t) * (1.0 - e * z) * (1.0 - f * z)
        with np.errstate(invalid="ignore"):
            return (z - m) - sign * np.sqrt(R)

    return fun


def _split_roots(params, grid, has_boundary, refine):
    # the factor with sign(1 - m) vanishes identically at theta = 0; its sign
    # just right of 0 is sign(D+) * sign(1 - m)
    m = 0.5 * (params.eps + params.phi)
    trivial = 1 if m < 1 else -1
    h0 = float(_hyper_scaled(params, 0.0))
    found = []
    for sign in (-1, 1):
        raw = _split_factor(params, sign)
        if sign != trivial:
            g, fun = grid, raw
        elif has_boundary:
            g, fun = grid[1:], raw
        else:
            start = trivial * math.copysign(1.0, h0)

            def fun(t, raw=raw, start=start):
                t = np.asarray(t, dtype=float)
                return np.where(t == 0.0, start, raw(t))

            g = grid
        for t in _roots(fun, g, refine):
            if t > 0.0:
                found.append((float(t), None))
    found.sort()
    return found


def _hyper_roots(params, density, has_boundary, refine):
    """Positive-branch roots as a list of ``(theta, flip_sign)``."""
    grid = np.linspace(0.0, _theta_max(params), density + 1)
    found = []
    if params.eps == params.phi:
        for flip_sign in (-1, 1):
            fun = _symmetric_factor(params.eps, params.n, flip_sign)
            g = grid[1:] if (has_boundary and flip_sign < 0) else grid
            for t in _roots(fun, g, refine):
                if t > 0.0:
                    found.append((float(t), flip_sign))
    elif refine and params.eps + params.phi != 2.0:
        found = _split_roots(params, grid, has_boundary, refine)
    else:
        g = grid[1:] if has_boundary else grid
        for t in _roots(lambda t: _hyper_scaled(params, t), g, refine):
            if t > 0.0:
                found.append((float(t), None))
    return found


_MAX_REFINEMENTS = 3


def solve(params: TauParams, vectors: bool = True) -> SpectralDecomposition:
    """All n eigenpairs of T(n, eps, phi) by root finding on the branch equations.

    Pairs are returned sorted by descending eigenvalue. With
    ``vectors=False`` eigenvectors are skipped (``vector`` is ``None``).
    Raises :class:`IncompleteSpectrumError` if the root count does not reach
    ``n`` after the grid has been refined.
    """
    n = params.n
    tol = boundary_tolerance(n)
    has_plus = abs(boundary_membership(params, "plus")) <= tol
    has_minus = abs(boundary_membership(params, "minus")) <= tol
    neg = params.negated()

    for attempt in range(_MAX_REFINEMENTS + 1):
        density = 20 * n * 4**attempt
        refine = attempt > 0
        trig = _trig_roots(params, density, has_plus, has_minus, refine)
        hpos = _hyper_roots(params, density, has_plus, refine)
        hneg = _hyper_roots(neg, density, has_minus, refine)
        total = len(trig) + len(hpos) + len(hneg) + int(has_plus) + int(has_minus)
        if total == n:
            break

    found = []
    for t in trig:
        found.append((Branch.TRIG, float(t), None))
    for t, fs in hpos:
        found.append((Branch.HYPER_POS, t, fs))
    for t, fs in hneg:
        found.append((Branch.HYPER_NEG, t, fs))
    if has_plus:
        found.append((Branch.BOUNDARY_PLUS, None, None))
    if has_minus:
        found.append((Branch.BOUNDARY_MINUS, None, None))

    pairs = []
    for branch, theta, fs in found:
        lam = branch_eigenvalue(branch, theta)
        vec = _stable_vector(params, branch, theta, lam, fs) if vectors else None
        pairs.append(EigenPair(lam, branch, theta, vec))
    # ties (eps == phi at large n) keep the flip-symmetric pair first
    pairs.sort(key=lambda p: -p.lam)
    if len(pairs) != n:
        raise IncompleteSpectrumError(
            f"found {len(pairs)} eigenpairs for n={n} (eps={params.eps}, phi={params.phi})",
            pairs,
        )
    return SpectralDecomposition(params, tuple(pairs))


# ---------------------------------------------------------------------------
# closed forms

_UNIT = (-1.0, 0.0, 1.0)
_PRODUCT_TOL = 4 * np.finfo(float).eps


def _trig_pairs(n, thetas, vec_fn):
    return [
        EigenPair(2.0 * math.cos(t), Branch.TRIG, float(t), _normalize(vec_fn(t)))
        for t in thetas
    ]


def _unit_corner_pairs(params: TauParams):
    n, e, f = params.n, params.eps, params.phi
    i = np.arange(1, n + 1, dtype=float)
    alt = np.where(i % 2 == 0, 1.0, -1.0)
    k = np.arange(1, n + 1, dtype=float)
    if (e, f) == (0.0, 0.0):
        return _trig_pairs(n, k * math.pi / (n + 1), lambda t: np.sin(i * t))
    if (e, f) == (1.0, 1.0):
        pairs = [EigenPair(2.0, Branch.BOUNDARY_PLUS, None, _normalize(np.ones(n)))]
        thetas = np.arange(1, n) * math.pi / n
        return pairs + _trig_pairs(n, thetas, lambda t: np.cos((2 * i - 1) * t / 2))
    if (e, f) == (-1.0, -1.0):
        pairs = [EigenPair(-2.0, Branch.BOUNDARY_MINUS, None, _normalize(alt.copy()))]
        ks = np.arange(1, n)
        thetas = math.pi - ks * math.pi / n
        vecs = {
            float(t): alt * np.cos((2 * i - 1) * kk * math.pi / (2 * n))
            for t, kk in zip(thetas, ks)
        }
        return pairs + _trig_pairs(n, thetas, lambda t: vecs[float(t)])
    if (e, f) in ((1.0, -1.0), (-1.0, 1.0)):
        thetas = (2 * k - 1) * math.pi / (2 * n)
        rev = e < 0
    elif (e, f) in ((1.0, 0.0), (0.0, 1.0)):
        thetas = (2 * k - 1) * math.pi / (2 * n + 1)
        rev = e == 0.0
    else:  # (-1, 0) and (0, -1)
        thetas = 2 * k * math.pi / (2 * n + 1)
        rev = e == 0.0
        fn = (lambda t: np.sin((2 * i - 1) * t / 2)[::-1]) if rev else (
            lambda t: np.sin((2 * i - 1) * t / 2)
        )
        return _trig_pairs(n, thetas, fn)
    fn = (lambda t: np.cos((2 * i - 1) * t / 2)[::-1]) if rev else (
        lambda t: np.cos((2 * i - 1) * t / 2)
    )
    return _trig_pairs(n, thetas, fn)


def _reciprocal_pairs(params: TauParams):
    """eps * phi = 1 with eps > 0: n-1 trig pairs at k pi / n plus the exact outlier."""
    n, e = params.n, params.eps
    i = np.arange(1, n + 1, dtype=float)
    thetas = np.arange(1, n) * math.pi / n
    pairs = _trig_pairs(n, thetas, lambda t: np.sin(i * t) - e * np.sin((i - 1) * t))
    logv = -(i - 1) * math.log(e)
    v = _normalize(np.exp(logv - logv.max()))
    pairs.append(EigenPair(e + 1.0 / e, Branch.HYPER_POS, abs(math.log(e)), v))
    return pairs


def reciprocal_family(n: int, eps: float) -> SpectralDecomposition:
    """Decomposition of T(n, eps, 1/eps) for eps > 0, with phi taken as exactly 1/eps."""
    if eps <= 0:
        raise DomainError("reciprocal family needs eps > 0")
    if eps == 1.0:
        pairs = _unit_corner_pairs(TauParams(n, 1.0, 1.0))
    else:
        pairs = _reciprocal_pairs(TauParams(n, eps, 1.0 / eps))
    pairs.sort(key=lambda p: -p.lam)
    return SpectralDecomposition(TauParams(n, eps, 1.0 / eps), tuple(pairs))


def is_reciprocal(params: TauParams) -> bool:
    return params.eps > 0 and params.phi > 0 and abs(params.eps * params.phi - 1.0) <= _PRODUCT_TOL


def closed_form(params: TauParams) -> Optional[SpectralDecomposition]:
    """Root-free decomposition for corners in {-1, 0, 1} or for eps * phi = 1 (eps, phi > 0).

    Returns ``None`` for every other parameter pair.
    """
    if params.eps in _UNIT and params.phi in _UNIT:
        pairs = _unit_corner_pairs(params)
    elif is_reciprocal(params):
        pairs = list(reciprocal_family(params.n, params.eps).pairs)
    else:
        return None
    pairs.sort(key=lambda p: -p.lam)
    return SpectralDecomposition(params, tuple(pairs))


def decompose(params: TauParams, vectors: bool = True) -> SpectralDecomposition:
    """Closed form when available, otherwise :func:`solve`."""
    cf = closed_form(params)
    if cf is not None:
        return cf
    return solve(params, vectors=vectors)

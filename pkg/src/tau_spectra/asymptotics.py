"""Large-n behaviour of outliers and their eigenvectors.

For ``|eps| > 1`` an outlier approaches ``eps + 1/eps`` and its eigenvector
aligns with ``v = [eps^(1-i)]``; for ``|phi| > 1`` the same holds with
``phi + 1/phi`` and ``w = [phi^(i-n)]``. When ``eps == phi`` both outliers
share the limit and split into a flip-symmetric eigenvector close to
``v + w`` and an antisymmetric one close to ``v - w``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyReportError
from .spectral_solver import solve
from .tau_core import TauParams, quasi_eigenpair_residual

__all__ = [
    "OutlierReport",
    "predicted_outliers",
    "projection_residual",
    "symmetry_class",
    "validation_row",
    "table_rows",
    "TABLE_PARAMS",
    "ERROR_FLOOR",
]

ERROR_FLOOR = 1e-14
SYMMETRY_TOL = 1e-8

TABLE_PARAMS = {1: (3.0, 0.5), 2: (4.0, -2.0), 3: (1.6, 1.6)}


@dataclass(frozen=True, eq=False)
class OutlierReport:
    """Outliers of one matrix paired with their predicted limits.

    Entry ``k`` of every field refers to the same outlier. ``references``
    names the comparison vector (``"v"``, ``"w"``, ``"v+w"`` or ``"v-w"``).
    """

    params: TauParams
    predicted: tuple
    computed: tuple
    abs_errors: tuple
    projection_residuals: tuple
    references: tuple
    classes: tuple

    def __len__(self):
        return len(self.predicted)


def predicted_outliers(params: TauParams) -> list:
    out = []
    if abs(params.eps) > 1:
        out.append(params.eps + 1.0 / params.eps)
    if abs(params.phi) > 1 and params.phi != params.eps:
        out.append(params.phi + 1.0 / params.phi)
    return out


def projection_residual(x, u) -> float:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    uu = float(u @ u)
    if uu == 0.0:
        raise DomainError("cannot project onto the zero vector")
    return float(np.linalg.norm(x - (x @ u) / uu * u))


def symmetry_class(x) -> str:
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise DomainError("symmetry class of the zero vector is undefined")
    if np.linalg.norm(x[::-1] - x) <= SYMMETRY_TOL * norm:
        return "symmetric"
    if np.linalg.norm(x[::-1] + x) <= SYMMETRY_TOL * norm:
        return "antisymmetric"
    return "neither"


def _reference_vectors(params):
    refs = {}
    if params.eps != 0.0:
        refs["v"] = quasi_eigenpair_residual(params, "left")[1]
    if params.phi != 0.0:
        refs["w"] = quasi_eigenpair_residual(params, "right")[1]
    return refs


def validation_row(params: TauParams) -> OutlierReport:
    """Compare the computed outliers of ``params`` with their predicted limits.

    Pairing minimises the total absolute error over assignments. With
    ``eps == phi`` both outliers share the prediction and are labelled by
    the symmetry class of their eigenvector instead; the symmetric one is
    listed first.
    """
    predicted = predicted_outliers(params)
    outliers = [p for p in solve(params).pairs if abs(p.lam) > 2.0]
    if not predicted or not outliers:
        raise EmptyReportError(
            f"no outliers to report for eps={params.eps}, phi={params.phi}, n={params.n}"
        )
    refs = _reference_vectors(params)

    rows = []
    if params.eps == params.phi:
        target = predicted[0]
        keyed = sorted(
            outliers,
            key=lambda p: (symmetry_class(p.vector) != "symmetric", -p.lam),
        )
        for pair in keyed:
            cls = symmetry_class(pair.vector)
            ref = "v-w" if cls == "antisymmetric" else "v+w"
            u = refs["v"] - refs["w"] if ref == "v-w" else refs["v"] + refs["w"]
            rows.append((target, pair, ref, u, cls))
    else:
        labels = []
        if abs(params.eps) > 1:
            labels.append("v")
        if abs(params.phi) > 1:
            labels.append("w")
        best = None
        k = min(len(outliers), len(predicted))
        for chosen in itertools.permutations(range(len(predicted)), k):
            for picked in itertools.combinations(range(len(outliers)), k):
                cost = sum(
                    abs(outliers[o].lam - predicted[c]) for o, c in zip(picked, chosen)
                )
                if best is None or cost < best[0]:
                    best = (cost, picked, chosen)
        _, picked, chosen = best
        for o, c in sorted(zip(picked, chosen), key=lambda oc: oc[1]):
            pair = outliers[o]
            ref = labels[c]
            rows.append((predicted[c], pair, ref, refs[ref], symmetry_class(pair.vector)))

    return OutlierReport(
        params=params,
        predicted=tuple(r[0] for r in rows),
        computed=tuple((r[1].lam, r[1].vector) for r in rows),
        abs_errors=tuple(abs(r[1].lam - r[0]) for r in rows),
        projection_residuals=tuple(projection_residual(r[1].vector, r[3]) for r in rows),
        references=tuple(r[2] for r in rows),
        classes=tuple(r[4] for r in rows),
    )


def table_rows(which: int, ns) -> list:
    """Rows ``(n, reference, outlier, error, residual)`` for one of the validation tables.

    Error and residual columns are floored at ``ERROR_FLOOR``, the smallest
    value resolvable in binary64 here.
    """
    if which not in TABLE_PARAMS:
        raise DomainError(f"unknown table {which}; choose from {sorted(TABLE_PARAMS)}")
    eps, phi = TABLE_PARAMS[which]
    rows = []
    for n in ns:
        rep = validation_row(TauParams(n, eps, phi))
        for k in range(len(rep)):
            rows.append(
                {
                    "n": int(n),
                    "reference": rep.references[k],
                    "outlier": rep.computed[k][0],
                    "error": max(rep.abs_errors[k], ERROR_FLOOR),
                    "residual": max(rep.projection_residuals[k], ERROR_FLOOR),
                }
            )
    return rows

"""Spec-file loading and deterministic CSV/JSON writers."""
from __future__ import annotations

import json
import math
from numbers import Integral, Real

import numpy as np

from .diffusion import DiffusionAxis, DiffusionSpec
from .errors import SchemaError, TauSpectraError
from .wealth import PayoffTensor, linear_payoff

__all__ = ["load_spec", "parse_spec", "fmt_float", "to_json", "to_csv"]


def _is_real(x):
    return isinstance(x, Real) and not isinstance(x, bool)


def _real(obj, key, path, required=True):
    if key not in obj:
        if required:
            raise SchemaError(f"{path}.{key}", "missing required field")
        return None
    v = obj[key]
    if not _is_real(v) or not math.isfinite(v):
        raise SchemaError(f"{path}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def parse_spec(doc):
    """Validate a decoded spec document and build ``(DiffusionSpec, PayoffTensor | None)``."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    unknown = set(doc) - {"axes", "payoff"}
    if unknown:
        raise SchemaError(sorted(unknown)[0], "unknown field")
    axes_doc = doc.get("axes")
    if not isinstance(axes_doc, list) or not axes_doc:
        raise SchemaError("axes", "expected a non-empty list of axis objects")
    axes = []
    for k, a in enumerate(axes_doc):
        path = f"axes[{k}]"
        if not isinstance(a, dict):
            raise SchemaError(path, "expected an object")
        extra = set(a) - {"n", "mu", "sigma2", "delta"}
        if extra:
            raise SchemaError(f"{path}.{sorted(extra)[0]}", "unknown field")
        n = a.get("n")
        if not isinstance(n, Integral) or isinstance(n, bool) or n < 2:
            raise SchemaError(f"{path}.n", f"expected an integer >= 2, got {n!r}")
        mu = _real(a, "mu", path)
        sigma2 = _real(a, "sigma2", path)
        delta = _real(a, "delta", path, required=False)
        if delta is not None and delta <= 0:
            raise SchemaError(f"{path}.delta", "must be positive")
        axes.append(DiffusionAxis(int(n), mu, sigma2, delta))
    spec = DiffusionSpec(tuple(axes))

    payoff = None
    if "payoff" in doc:
        pd = doc["payoff"]
        if not isinstance(pd, dict):
            raise SchemaError("payoff", "expected an object")
        kind = pd.get("kind")
        if kind == "linear":
            w = pd.get("weights")
            if not isinstance(w, list) or not all(_is_real(x) for x in w):
                raise SchemaError("payoff.weights", "expected a list of numbers")
            if len(w) != spec.ndim:
                raise SchemaError("payoff.weights", f"expected {spec.ndim} weights, got {len(w)}")
            payoff = linear_payoff(spec, w)
        elif kind == "tensor":
            vals = pd.get("values")
            if not isinstance(vals, list) or not all(_is_real(x) for x in vals):
                raise SchemaError("payoff.values", "expected a flat list of numbers")
            size = int(np.prod(spec.dims))
            if len(vals) != size:
                raise SchemaError("payoff.values", f"expected {size} values, got {len(vals)}")
            payoff = PayoffTensor(np.asarray(vals, dtype=float).reshape(spec.dims), "tensor")
        else:
            raise SchemaError("payoff.kind", f"expected 'linear' or 'tensor', got {kind!r}")
    return spec, payoff


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError("$", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    try:
        return parse_spec(doc)
    except SchemaError:
        raise
    except TauSpectraError as exc:
        raise SchemaError("axes", str(exc)) from None


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (Integral, np.integer)):
        return str(int(obj))
    if isinstance(obj, (Real, np.floating)):
        return "null" if not math.isfinite(obj) else fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _json(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj) -> str:
    """JSON text with every float written to 17 significant digits; non-finite floats become null."""
    return _json(obj) + "\n"


def _cell(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace('"', '""') + '"' if any(c in v for c in ',"\n') else v
    if v is None:
        return ""
    if isinstance(v, (Integral, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return fmt_float(v)


def to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"

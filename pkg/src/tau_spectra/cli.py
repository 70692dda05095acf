"""Command-line interface.

Exit codes: 0 on success, 2 on usage or spec-file errors, 1 on domain errors.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import asymptotics, diffusion, markov, wealth
from .errors import SchemaError, TauSpectraError
from .spec_io import load_spec, to_csv, to_json
from .spectral_solver import closed_form, decompose, solve
from .tau_core import TauParams

PRECISION_ENV = "TAU_SPECTRA_PRECISION"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text):
    """``a:b:k`` (k evenly spaced points) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must look like start:stop:count")
        try:
            a, b, k = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
        if k < 1:
            raise argparse.ArgumentTypeError("grid count must be >= 1")
        return list(np.linspace(a, b, k))
    return _floats(text)


def _tensor_rows(tensor):
    dims = tensor.shape
    cols = [f"i{r + 1}" for r in range(len(dims))] + ["value"]
    rows = []
    for pos, v in enumerate(tensor.ravel()):
        idx = [int(i) + 1 for i in np.unravel_index(pos, dims)]
        rows.append(idx + [float(v)])
    return cols, rows


# ---------------------------------------------------------------------------
# commands


def cmd_eig(a):
    params = TauParams(a.n, a.eps, a.phi)
    if a.method == "solve":
        dec = solve(params)
    elif a.method == "closed":
        dec = closed_form(params)
        if dec is None:
            raise TauSpectraError("no closed form for these parameters")
    else:
        dec = decompose(params)
    pairs = [
        {"lambda": p.lam, "branch": p.branch.value, "theta": p.theta, "vector": p.vector}
        for p in dec.pairs
    ]
    if a.format == "json":
        return to_json({"n": params.n, "eps": params.eps, "phi": params.phi, "pairs": pairs})
    cols = ["k", "lambda", "branch", "theta"] + [f"v{i + 1}" for i in range(params.n)]
    rows = [[k + 1, p["lambda"], p["branch"], p["theta"]] + list(p["vector"]) for k, p in enumerate(pairs)]
    return to_csv(cols, rows)


def cmd_tables(a):
    rows = asymptotics.table_rows(a.which, a.n)
    if a.format == "json":
        return to_json({"table": a.which, "rows": rows})
    return to_csv(["n", "reference", "outlier", "error", "residual"], rows)


def _one_dim_output(a, report):
    steady = report.steady_state
    out = {
        "kind": report.kind,
        "eigenvalues": report.eigenvalues,
        "gap": report.gap,
        "steady_state": steady,
    }
    traj = {}
    if a.times:
        p0 = np.zeros(report.size)
        if not 1 <= a.start <= report.size:
            raise TauSpectraError(f"start state must be in 1..{report.size}")
        p0[a.start - 1] = 1.0
        for t in a.times:
            traj[t] = markov.transient_evolve(report, p0, t)
        out["trajectory"] = {"start": a.start, "times": a.times, "p": [traj[t] for t in a.times]}
    if a.format == "json":
        return to_json(out)
    cols = ["i", "steady_state"] + [f"p_t{t:g}" for t in a.times]
    rows = []
    for i in range(report.size):
        rows.append([i + 1, steady[i] if steady is not None else None] + [traj[t][i] for t in a.times])
    return to_csv(cols, rows)


def cmd_queue(a):
    return _one_dim_output(a, markov.queue_spectrum(markov.BirthDeathParams(a.n, a.lam, a.mu)))


def cmd_walk(a):
    return _one_dim_output(a, markov.walk_spectrum(markov.RandomWalkParams(a.n, a.p, a.q)))


def cmd_kron(a):
    dims = a.dims
    if a.kind == "chain":
        if a.p is None or a.q is None:
            raise UsageError("kron --kind chain needs --p and --q")
        if not len(a.p) == len(a.q) == len(dims):
            raise UsageError("--p and --q need one value per axis")
        axes = [markov.RandomWalkParams(n, p, q) for n, p, q in zip(dims, a.p, a.q)]
    else:
        if a.lam is None or a.mu is None:
            raise UsageError("kron --kind generator needs --lambda and --mu")
        if not len(a.lam) == len(a.mu) == len(dims):
            raise UsageError("--lambda and --mu need one value per axis")
        axes = [markov.BirthDeathParams(n, l, m) for n, l, m in zip(dims, a.lam, a.mu)]
    report = markov.kron_spectrum(markov.MultiIndexSpace(tuple(dims)), axes, a.kind)
    if a.format == "json":
        return to_json(
            {
                "kind": report.kind,
                "dims": list(report.dims),
                "eigenvalues": report.eigenvalues.ravel(),
                "gap": report.gap,
                "steady_state": None if report.steady_state is None else report.steady_state.ravel(),
            }
        )
    if report.steady_state is None:
        raise TauSpectraError("rates are not a probability model; no steady state to write")
    cols, rows = _tensor_rows(report.steady_state)
    return to_csv(cols, rows)


def cmd_diffusion(a):
    spec, _ = load_spec(a.spec)
    if a.action == "gap":
        gap = diffusion.diffusion_gap(spec)
        return to_json({"gap": gap}) if a.format == "json" else to_csv(["gap"], [[gap]])
    if a.action == "steady":
        p = diffusion.diffusion_steady_state(spec)
    elif a.action == "spectrum":
        report = diffusion.diffusion_spectrum(spec)
        if a.format == "json":
            return to_json({"dims": list(report.dims), "gap": report.gap, "eigenvalues": report.eigenvalues.ravel()})
        p = report.eigenvalues
    else:  # evolve
        if a.t is None:
            raise UsageError("diffusion evolve needs --t")
        report = diffusion.diffusion_spectrum(spec)
        p0 = np.zeros(spec.dims)
        start = tuple(a.start) if a.start else (1,) * spec.ndim
        if len(start) != spec.ndim:
            raise UsageError(f"--start needs {spec.ndim} indices")
        p0[tuple(i - 1 for i in start)] = 1.0
        p = markov.transient_evolve(report, p0, a.t)
    if a.format == "json":
        return to_json({"dims": list(p.shape), "values": p.ravel()})
    cols, rows = _tensor_rows(p)
    return to_csv(cols, rows)


def _spec_with_payoff(a):
    spec, payoff = load_spec(a.spec)
    if payoff is None:
        raise SchemaError("payoff", "this command needs a payoff")
    return spec, payoff


def cmd_moments(a):
    spec, W = _spec_with_payoff(a)
    m = wealth.payoff_moments(W, diffusion.diffusion_steady_state(spec))
    if a.format == "json":
        return to_json({"mean": m.mean, "variance": m.variance})
    return to_csv(["mean", "variance"], [[m.mean, m.variance]])


def cmd_sens(a):
    spec, W = _spec_with_payoff(a)
    s = wealth.stationary_sensitivities(spec, W)
    keys = ["dmean_dmu", "dmean_dsigma2", "dvar_dmu", "dvar_dsigma2"]
    rows = [[r + 1] + [float(getattr(s, k)[r]) for k in keys] for r in range(spec.ndim)]
    if a.format == "json":
        return to_json({"axes": [dict(zip(["axis"] + keys, row)) for row in rows]})
    return to_csv(["axis"] + keys, rows)


def cmd_sweep(a):
    spec, W = _spec_with_payoff(a)
    rows = wealth.comparative_sweep(spec, W, a.target, a.grid, threads=a.threads)
    cols = wealth.sweep_columns(spec.ndim)
    if a.format == "json":
        return to_json({"columns": cols, "rows": rows})
    return to_csv(cols, rows)


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="write output here instead of stdout")

    parser = _Parser(prog="tau-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eig", parents=[common], help="eigendecomposition of T(n, eps, phi)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--method", choices=["auto", "solve", "closed"], default="auto")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("tables", parents=[common], help="outlier validation tables")
    p.add_argument("--which", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--n", type=_ints, default=[8, 16, 32, 64, 128])
    p.set_defaults(func=cmd_tables)

    for name, func, a1, a2 in (("queue", cmd_queue, "lambda", "mu"), ("walk", cmd_walk, "p", "q")):
        p = sub.add_parser(name, parents=[common], help=f"{name} spectrum and steady state")
        p.add_argument("--n", type=int, required=True)
        p.add_argument(f"--{a1}", dest="lam" if a1 == "lambda" else a1, type=float, required=True)
        p.add_argument(f"--{a2}", dest=a2, type=float, required=True)
        p.add_argument("--times", type=_floats, default=[], help="comma-separated evolution times/steps")
        p.add_argument("--start", type=int, default=1, help="initial state for --times (1-based)")
        p.set_defaults(func=func)

    p = sub.add_parser("kron", parents=[common], help="tensor-product chain or Kronecker-sum generator")
    p.add_argument("--dims", type=_ints, required=True)
    p.add_argument("--kind", choices=["chain", "generator"], required=True)
    p.add_argument("--lambda", dest="lam", type=_floats)
    p.add_argument("--mu", type=_floats)
    p.add_argument("--p", type=_floats)
    p.add_argument("--q", type=_floats)
    p.set_defaults(func=cmd_kron)

    p = sub.add_parser("diffusion", parents=[common], help="discretized reflected diffusion")
    p.add_argument("action", choices=["steady", "gap", "spectrum", "evolve"])
    p.add_argument("--spec", required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--start", type=_ints, help="initial lattice point for evolve (1-based)")
    p.set_defaults(func=cmd_diffusion)

    for name, func, helptext in (
        ("moments", cmd_moments, "stationary mean and variance of the payoff"),
        ("sens", cmd_sens, "derivatives of the stationary moments"),
        ("sweep", cmd_sweep, "comparative statics over one parameter"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--spec", required=True)
        if name == "sweep":
            p.add_argument("--target", required=True, help="mu_<axis> or sigma2_<axis> (1-based)")
            p.add_argument("--grid", type=_grid, required=True)
            p.add_argument("--threads", type=int, default=1)
        p.set_defaults(func=func)
    return parser


def run(argv=None) -> int:
    precision = os.environ.get(PRECISION_ENV, "binary64")
    if precision != "binary64":
        print(f"tau-spectra: precision {precision!r} is not available in this build (binary64 only)", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"tau-spectra: spec error: {exc}", file=sys.stderr)
        return 2
    except TauSpectraError as exc:
        print(f"tau-spectra: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())

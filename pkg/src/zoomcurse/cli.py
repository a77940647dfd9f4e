"""Command-line interface: score tables in, JSON envelopes out.

Input is a CSV with header ``label,score`` or ``label,score,sigma``.  Every
subcommand prints one JSON envelope (format ``zoomcurse/v1``; schema shipped
alongside this module) with deterministic, sorted, byte-stable output.

Exit codes: 0 success, 2 input/usage error, 3 the error budget is
statistically infeasible, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import Problem, winner_interval_grid, winner_interval_root
from .errors import InfeasibleAlphaError, UnsupportedMethodError
from .meta import near_winner_interval, winner_identity_set
from .sampling import EquicorrelatedSampler, DiagonalGaussianSampler, TableSampler, draw_bank
from .scaled import ScaledProblem, winner_interval_scaled
from .simulate import parse_config_text, run_simulation, width_comparison
from .stepdown import winner_interval_stepdown
from .tails import EmpiricalTail, GaussianTail, MonteCarloBound, SubGaussianTail, UnionBound
from .topk import topk_interval, topk_stepdown


class InputError(ValueError):
    """Anything wrong with files, flags, or their combination."""


@dataclass(frozen=True)
class ScoreTable:
    labels: tuple
    x: np.ndarray
    sigma: np.ndarray | None


def read_scores(path: str) -> ScoreTable:
    """Parse a `label,score[,sigma]` CSV with a mandatory header row."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    if header not in (["label", "score"], ["label", "score", "sigma"]):
        raise InputError(f"{path}: header must be label,score or label,score,sigma")
    with_sigma = len(header) == 3
    labels, scores, sigmas = [], [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields")
        labels.append(row[0].strip())
        try:
            scores.append(float(row[1]))
            if with_sigma:
                sigmas.append(float(row[2]))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric value") from exc
    if not labels:
        raise InputError(f"{path}: no data rows")
    if len(set(labels)) != len(labels):
        raise InputError(f"{path}: labels must be unique")
    x = np.asarray(scores)
    if not np.all(np.isfinite(x)):
        raise InputError(f"{path}: scores must be finite")
    sigma = None
    if with_sigma:
        sigma = np.asarray(sigmas)
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise InputError(f"{path}: sigma values must be positive and finite")
    return ScoreTable(tuple(labels), x, sigma)


def parse_tail_spec(spec: str):
    """gaussian:<scale> | subgaussian:<proxy> | empirical:<path>."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise InputError(f"bad tail spec {spec!r}: expected kind:argument")
    if kind == "gaussian":
        return GaussianTail(_positive(arg, "gaussian scale"))
    if kind == "subgaussian":
        return SubGaussianTail(_positive(arg, "subgaussian proxy"))
    if kind == "empirical":
        try:
            with open(arg, encoding="utf-8") as fh:
                values = [float(line.split("#", 1)[0])
                          for line in fh if line.split("#", 1)[0].strip()]
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
        except ValueError as exc:
            raise InputError(f"{arg}: every line must hold one number") from exc
        if not values:
            raise InputError(f"{arg}: no values")
        try:
            return EmpiricalTail(np.abs(values))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"unknown tail kind {kind!r}")


def _positive(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise InputError(f"{what} must be a number, got {text!r}") from exc
    if not value > 0:
        raise InputError(f"{what} must be positive, got {value}")
    return value


def parse_noise_spec(spec: str, m: int):
    """equicorrelated:<rho> | independent | table:<csv> -> noise sampler."""
    kind, _, arg = spec.partition(":")
    if kind == "independent":
        if arg:
            raise InputError("independent noise takes no argument")
        return EquicorrelatedSampler(m, 0.0)
    if kind == "equicorrelated":
        try:
            rho = float(arg)
        except ValueError as exc:
            raise InputError(f"bad correlation {arg!r}") from exc
        try:
            return EquicorrelatedSampler(m, rho)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if kind == "table":
        try:
            rows = np.loadtxt(arg, delimiter=",", ndmin=2)
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
        except ValueError as exc:
            raise InputError(f"{arg}: malformed numeric CSV") from exc
        if rows.shape[1] != m:
            raise InputError(f"{arg}: table has {rows.shape[1]} columns, need {m}")
        try:
            return TableSampler(rows)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"unknown noise kind {kind!r}")


DEFAULT_MC_SAMPLES = 100_000


def _build_bound(args, m: int):
    """Resolve tail/noise flags into a joint bound."""
    if args.noise is not None:
        sampler = parse_noise_spec(args.noise, m)
        if args.seed is None and not isinstance(sampler, TableSampler):
            raise InputError("--noise sampling requires --seed")
        n = args.mc_samples
        if n is None:
            n = (sampler.rows.shape[0] if isinstance(sampler, TableSampler)
                 else DEFAULT_MC_SAMPLES)
        if n < 1:
            raise InputError("--mc-samples must be >= 1")
        bank = draw_bank(sampler, n, 0 if args.seed is None else args.seed)
        return MonteCarloBound(bank)
    if args.tail is None:
        raise InputError("give a marginal --tail (or a joint --noise model)")
    model = parse_tail_spec(args.tail)
    return UnionBound((model,) * m)


def _json_safe(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _json_safe(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return repr(obj)


def _envelope(mode: str, args, method: str, winner_label, result: dict,
              diagnostics: dict) -> dict:
    return {
        "schema": "zoomcurse/v1",
        "version": __version__,
        "mode": mode,
        "alpha": args.alpha,
        "method": method,
        "seed": args.seed,
        "winner": winner_label,
        "result": _json_safe(result),
        "diagnostics": _json_safe(diagnostics),
    }


def _winner_interval(args, problem):
    if args.method == "grid":
        return winner_interval_grid(problem, args.grid_points, refine=args.refine)
    if args.method == "root":
        return winner_interval_root(problem)
    if args.method == "stepdown":
        return winner_interval_stepdown(problem)
    raise InputError(f"unknown method {args.method!r}")


def cmd_winner_ci(args) -> dict:
    table = read_scores(args.input)
    if table.sigma is not None:
        if args.noise is not None:
            raise InputError("per-candidate sigma works with marginal tails only")
        if args.method != "grid":
            raise InputError("sigma-scaled intervals support --method grid only")
        if args.tail is None:
            raise InputError("sigma-scaled intervals need a standardized --tail")
        model = parse_tail_spec(args.tail)
        base = Problem(table.x, UnionBound((model,) * table.x.size), args.alpha)
        iv = winner_interval_scaled(ScaledProblem(base, table.sigma), args.grid_points)
    else:
        problem = Problem(table.x, _build_bound(args, table.x.size), args.alpha)
        iv = _winner_interval(args, problem)
    result = {
        "interval": [iv.t_l, iv.t_u],
        "winner_index": iv.winner,
        "radius_lower": iv.r_l,
        "radius_upper": iv.r_u,
        "width": iv.width,
    }
    return _envelope("winner-ci", args, iv.method, table.labels[iv.winner],
                     result, iv.diagnostics)


def cmd_topk_ci(args) -> dict:
    table = read_scores(args.input)
    if table.sigma is not None:
        raise InputError("top-k boxes do not take per-candidate sigma")
    problem = Problem(table.x, _build_bound(args, table.x.size), args.alpha)
    if args.k < 1 or args.k > table.x.size:
        raise InputError(f"--k must lie in [1, {table.x.size}]")
    if args.method == "grid":
        res = topk_interval(problem, args.k, args.grid_points, refine=args.refine)
    elif args.method == "stepdown":
        res = topk_stepdown(problem, args.k)
    else:
        raise InputError("top-k supports --method grid or stepdown")
    result = {
        "k": res.k,
        "winners": [table.labels[j] for j in res.winners],
        "winner_indices": list(res.winners),
        "r_max": res.r_max,
        "boxes": {table.labels[j]: [float(lo), float(hi)]
                  for j, (lo, hi) in zip(res.winners, res.boxes)},
    }
    return _envelope("topk-ci", args, res.method, table.labels[res.winners[0]],
                     result, res.diagnostics)


def cmd_identity_set(args) -> dict:
    table = read_scores(args.input)
    if table.sigma is not None:
        raise InputError("identity sets do not take per-candidate sigma")
    problem = Problem(table.x, _build_bound(args, table.x.size), args.alpha)
    method = None if args.method == "auto" else args.method
    ids = winner_identity_set(problem, method, args.grid_points, refine=args.refine)
    result = {
        "members": [table.labels[j] for j in ids.indices],
        "member_indices": list(ids.indices),
        "threshold": ids.threshold,
        "size": len(ids),
    }
    return _envelope("identity-set", args, args.method,
                     table.labels[problem.winner], result, {})


def cmd_near_winner(args) -> dict:
    table = read_scores(args.input)
    if table.sigma is not None:
        raise InputError("near-winner intervals do not take per-candidate sigma")
    if (args.index is None) == (args.label is None):
        raise InputError("give exactly one of --index or --label")
    if args.label is not None:
        if args.label not in table.labels:
            raise InputError(f"label {args.label!r} not in {args.input}")
        index = table.labels.index(args.label)
    else:
        index = args.index
        if not 0 <= index < len(table.labels):
            raise InputError(f"--index must lie in [0, {len(table.labels) - 1}]")
    problem = Problem(table.x, _build_bound(args, table.x.size), args.alpha)
    method = None if args.method == "auto" else args.method
    nw = near_winner_interval(problem, index, method, args.grid_points,
                              refine=args.refine)
    result = {
        "index": nw.index,
        "label": table.labels[nw.index],
        "pieces": [list(piece) for piece in nw.pieces],
        "hull": list(nw.hull),
    }
    diagnostics = {"deficit": nw.diagnostics["deficit"],
                   "winner_interval": nw.diagnostics["winner_interval"]}
    return _envelope("near-winner", args, args.method,
                     table.labels[problem.winner], result, diagnostics)


def cmd_simulate(args) -> dict:
    try:
        with open(args.config, encoding="utf-8") as fh:
            config = parse_config_text(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    report = run_simulation(config, include_raw=args.include_raw)
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    result = {
        "config": dataclasses.asdict(config),
        "r_sim": report.r_sim,
        "summaries": report.summaries,
    }
    if len(config.methods) > 1:
        result["comparison"] = width_comparison(report)
    shim = argparse.Namespace(alpha=config.alpha, seed=config.seed)
    return _envelope("simulate", shim, "simulation", None, result, {})


def _add_common(sub):
    sub.add_argument("--input", required=True, help="CSV of label,score[,sigma]")
    sub.add_argument("--alpha", type=float, required=True,
                     help="error budget in (0, 1)")
    sub.add_argument("--tail", default=None,
                     help="marginal tail: gaussian:<scale>|subgaussian:<proxy>|empirical:<path>")
    sub.add_argument("--noise", default=None,
                     help="joint noise for the Monte-Carlo bound: "
                          "equicorrelated:<rho>|independent|table:<csv>")
    sub.add_argument("--grid-points", type=int, default=2001)
    sub.add_argument("--refine", action="store_true",
                     help="bisect the boundary brackets after the grid scan")
    sub.add_argument("--mc-samples", type=int, default=None,
                     help="bank rows for --noise (default 100000, or the whole table)")
    sub.add_argument("--seed", type=int, default=None,
                     help="required whenever noise is sampled")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zoomcurse",
        description="Valid confidence intervals for empirically selected winners.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("winner-ci", help="interval for the top-scoring candidate")
    _add_common(p)
    p.add_argument("--method", choices=("grid", "root", "stepdown"), default="grid")
    p.set_defaults(func=cmd_winner_ci)

    p = commands.add_parser("topk-ci", help="simultaneous boxes for the top k scores")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("grid", "stepdown"), default="grid")
    p.set_defaults(func=cmd_topk_ci)

    p = commands.add_parser("identity-set",
                            help="candidates not separable from the population best")
    _add_common(p)
    p.add_argument("--method", choices=("auto", "grid", "root"), default="auto")
    p.set_defaults(func=cmd_identity_set)

    p = commands.add_parser("near-winner",
                            help="interval for any post-hoc candidate of interest")
    _add_common(p)
    p.add_argument("--method", choices=("auto", "grid", "root"), default="auto")
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--label", default=None)
    p.set_defaults(func=cmd_near_winner)

    p = commands.add_parser("simulate", help="coverage/width experiment from a config file")
    p.add_argument("--config", required=True, help="key = value lines; see docs")
    p.add_argument("--include-raw", action="store_true")
    p.add_argument("--out-json", default=None)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "alpha") and not (0.0 < args.alpha < 1.0):
        print("zoomcurse: --alpha must lie in (0, 1)", file=sys.stderr)
        return 2
    try:
        envelope = args.func(args)
    except InputError as exc:
        print(f"zoomcurse: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedMethodError, ValueError) as exc:
        print(f"zoomcurse: {exc}", file=sys.stderr)
        return 2
    except InfeasibleAlphaError as exc:
        print(f"zoomcurse: infeasible: {exc}", file=sys.stderr)
        return 3
    except AssertionError as exc:  # pragma: no cover - internal tripwire
        print(f"zoomcurse: internal error: {exc}", file=sys.stderr)
        return 4
    sys.stdout.write(json.dumps(envelope, sort_keys=True, indent=2) + "\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line entry point: ``monosys {spectrum,solve,bvp,study,check}``.

Exit codes: 0 success, 2 invalid config, 3 inadmissible lambda,
4 non-convergence or failed study, 5 falsified assumption.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import assumptions
from .assumptions import admissible_lambda_interval, apriori_solution_bound
from .bvp import DifferenceProblem, emden_fowler_preset, solve_bvp
from .config import (
    build_family,
    build_matrix,
    build_problem,
    config_digest,
    growth_from_dict,
    load_config,
    parameter,
    solve_config,
)
from .dependence import MemberSolveError, ParameterSequence, boundedness_check, geometric_sequence, run_dependence_study
from .errors import ConfigError, ConvergenceError, InadmissibleLambdaError, MonosysError
from .linalg import build_dirichlet_matrix, smallest_eigenvalue, spectral_norm
from .model import Regime, check_nontriviality
from .solver import assemble_operator, solve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_LAMBDA = 3
EXIT_SOLVE = 4
EXIT_FALSIFIED = 5

DEFAULT_SEED = assumptions.DEFAULT_SEED


def _fmt(x):
    return f"{x:.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dumps(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


class Output:
    """Collects the primary text and an optional JSON companion."""

    def __init__(self, args):
        self.args = args

    def emit(self, primary, companion=None):
        out = self.args.out
        if out is None:
            sys.stdout.write(primary)
            if companion is not None and self.args.format == "csv":
                sys.stdout.write(companion)
            return
        path = Path(out)
        path.write_text(primary, encoding="utf-8")
        if companion is not None and self.args.format == "csv":
            side = path.with_suffix(".json")
            if side == path:
                side = path.with_name(path.name + ".summary.json")
            side.write_text(companion, encoding="utf-8")


def _check_lambda(problem):
    interval = admissible_lambda_interval(problem.regime, problem.A, problem.constants)
    if problem.lam not in interval:
        raise InadmissibleLambdaError(problem.lam, interval)
    return interval


def _apriori(problem):
    if problem.growth is None:
        return None
    return apriori_solution_bound(problem.regime, problem.A, problem.lam, problem.growth)


def cmd_spectrum(cfg, args):
    A = build_matrix(cfg)
    ev = A.spectrum.eigenvalues
    footer = {"spectral_norm": spectral_norm(A), "smallest_eigenvalue": smallest_eigenvalue(A)}
    if args.format == "json":
        Output(args).emit(_dumps({"eigenvalues": ev, **footer, "config_digest": args.digest}))
        return EXIT_OK
    buf = io.StringIO()
    buf.write("k,eigenvalue\n")
    for k, v in enumerate(ev, start=1):
        buf.write(f"{k},{_fmt(v)}\n")
    if cfg.get("spectrum", {}).get("footer"):
        buf.write(json.dumps(_jsonable({**footer, "config_digest": args.digest}), sort_keys=True) + "\n")
    Output(args).emit(buf.getvalue())
    return EXIT_OK


def cmd_solve(cfg, args):
    problem = build_problem(cfg)
    interval = _check_lambda(problem)
    u = parameter(cfg, problem.space)
    config, lip = solve_config(cfg)
    report = solve(assemble_operator(problem, u, lipschitz=lip), config)
    payload = report.as_dict()
    payload.update(
        {
            "apriori_bound": _apriori(problem),
            "lambda": problem.lam,
            "admissible_interval": interval.as_list(),
            "regime": problem.regime.value,
            "config_digest": args.digest,
        }
    )
    nt = check_nontriviality(problem.h, seed=args.seed)
    payload["warnings"] = [] if nt.passed else ["nontriviality: h(0, u) = 0 at a sampled parameter"]
    if args.format == "csv":
        rows = "".join(f"{i},{_fmt(v)}\n" for i, v in enumerate(report.solution, start=1))
        Output(args).emit("i,x\n" + rows, _dumps(payload))
    else:
        Output(args).emit(_dumps(payload))
    return EXIT_OK


def _difference_problem(cfg):
    sec = cfg.get("bvp")
    if not isinstance(sec, dict):
        raise ConfigError("config field 'bvp' must be an object with 'n'")
    n = sec.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"config field 'bvp.n' must be a positive integer, got {n!r}")
    h = build_family(cfg, n)
    # lambda and constant overrides are resolved on the induced system
    problem = build_problem(cfg, A=build_dirichlet_matrix(n), h=h)
    if h.name == "emden_fowler" and cfg.get("constants") is None and cfg.get("growth") is None:
        dp = emden_fowler_preset(n, h.info["p"], h.space, problem.lam, offset=h.info["offset"])
    else:
        dp = DifferenceProblem.from_induced(h, problem.lam, regime=problem.regime)
        dp = DifferenceProblem(
            n=dp.n, f=dp.f, f_derivative=dp.f_derivative, lam=dp.lam, regime=dp.regime,
            constants=problem.constants, space=dp.space, growth=problem.growth, name=dp.name,
        )
    return dp, problem


def cmd_bvp(cfg, args):
    dp, problem = _difference_problem(cfg)
    interval = _check_lambda(problem)
    u = parameter(cfg, problem.space)
    config, _ = solve_config(cfg)
    result = solve_bvp(dp, u, config)
    payload = result.report.as_dict()
    payload.update(
        {
            "grid": result.grid.values,
            "difference_residual": result.difference_residual,
            "apriori_bound": _apriori(problem),
            "lambda": problem.lam,
            "admissible_interval": interval.as_list(),
            "regime": problem.regime.value,
            "config_digest": args.digest,
        }
    )
    nt = check_nontriviality(problem.h, seed=args.seed)
    payload["warnings"] = [] if nt.passed else ["nontriviality: h(0, u) = 0, the zero grid solves the problem"]
    if args.format == "csv":
        Output(args).emit(result.grid.to_csv(), _dumps(payload))
    else:
        Output(args).emit(_dumps(payload))
    return EXIT_OK


def _sequence(cfg, space):
    sec = cfg.get("sequence")
    if not isinstance(sec, dict):
        raise ConfigError("config field 'sequence' must be an object")
    limit = parameter(sec, space, field="limit")
    kind = sec.get("kind", "geometric")
    if kind == "geometric":
        count = sec.get("count", 30)
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ConfigError("config field 'sequence.count' must be a non-negative integer")
        direction = np.atleast_1d(np.asarray(sec.get("direction", 1.0), dtype=float))
        ratio = float(sec.get("ratio", 0.5))
        if not 0 < ratio < 1:
            raise ConfigError(f"config field 'sequence.ratio' must lie in (0, 1), got {ratio}")
        if direction.size not in (1, space.dimension):
            raise ConfigError("config field 'sequence.direction' has the wrong dimension")
        seq = geometric_sequence(limit, np.broadcast_to(direction, limit.shape), count, ratio)
    elif kind == "points":
        pts = sec.get("points")
        if not isinstance(pts, list):
            raise ConfigError("config field 'sequence.points' must be a list")
        rows = [np.broadcast_to(np.atleast_1d(np.asarray(p, dtype=float)), limit.shape) for p in pts]
        seq = ParameterSequence(np.array(rows) if rows else np.zeros((0, limit.size)), limit)
    else:
        raise ConfigError(f"config field 'sequence.kind' must be geometric or points, got {kind!r}")
    try:
        seq.validate(space)
    except MonosysError as exc:
        raise ConfigError(f"config field 'sequence': {exc}") from exc
    return seq


def cmd_study(cfg, args):
    problem = build_problem(cfg)
    _check_lambda(problem)
    seq = _sequence(cfg, problem.space)
    config, lip = solve_config(cfg)
    try:
        report = run_dependence_study(problem, seq, config, lipschitz=lip)
    except MemberSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    summary = report.summary()
    summary["config_digest"] = args.digest
    summary["lambda"] = problem.lam
    if problem.growth is not None:
        bc = boundedness_check(report, problem, extra_solutions=[(0, report.limit_solution)])
        summary["boundedness"] = {"passed": bc.passed, "bound": bc.bound, "index": bc.index}
    if args.format == "csv":
        Output(args).emit(report.to_csv(), _dumps(summary))
    else:
        summary["records"] = [
            {"k": r.k, "param_dist": r.param_dist, "solution_dist": r.solution_dist, "stability_bound": r.stability_bound}
            for r in report.records
        ]
        Output(args).emit(_dumps(summary))
    return EXIT_OK if report.verdict else EXIT_SOLVE


def _assumption_specs(sec, h):
    specs = sec.get("assumptions", ["A1", "A2", "A3", "A4"])
    if not isinstance(specs, list):
        raise ConfigError("config field 'check.assumptions' must be a list")
    out = []
    for spec in specs:
        spec = {"id": spec} if isinstance(spec, str) else dict(spec)
        aid = spec.get("id")
        if aid not in ("A1", "A2", "A3", "A4"):
            raise ConfigError(f"config field 'check.assumptions' has unknown id {aid!r}")
        out.append(spec)
    return out


def cmd_check(cfg, args):
    n = build_matrix(cfg).n
    h = build_family(cfg, n)
    sec = cfg.get("check", {})
    if not isinstance(sec, dict):
        raise ConfigError("config field 'check' must be an object")
    samples = sec.get("samples", assumptions.DEFAULT_SAMPLES)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise ConfigError("config field 'check.samples' must be a positive integer")
    radius = sec.get("radius")
    reports = []
    skipped = []
    for spec in _assumption_specs(sec, h):
        aid = spec["id"]
        field = f"check.{aid}"
        try:
            if aid in ("A2", "A4"):
                key = "a" if aid == "A2" else "b"
                c = spec.get(key, getattr(h.constants, key))
                if c is None:
                    skipped.append(aid)
                    continue
                fn = assumptions.falsify_A2 if aid == "A2" else assumptions.falsify_A4
                rep = fn(h, h.space, c, radius=float(radius or 10.0), samples=samples, seed=args.seed)
            else:
                kind = Regime.SUPERQUADRATIC if aid == "A1" else Regime.SUBQUADRATIC
                keys = ("gamma", "zeta", "theta") if aid == "A1" else ("mu", "nu", "theta1")
                if any(k in spec for k in keys):
                    cert = growth_from_dict({k: spec.get(k) for k in keys if k in spec}, field)
                elif h.growth is not None and h.growth.kind is kind:
                    cert = h.growth
                else:
                    skipped.append(aid)
                    continue
                fn = assumptions.falsify_A1 if aid == "A1" else assumptions.falsify_A3
                r = float(radius) if radius is not None else 2.0 * cert.radius
                rep = fn(h, h.space, cert, radius=r, samples=samples, seed=args.seed)
        except ConfigError:
            raise
        except MonosysError as exc:
            raise ConfigError(f"config field '{field}': {exc}") from exc
        reports.append(rep.as_dict())
    nt = check_nontriviality(h, seed=args.seed)
    payload = {
        "reports": reports,
        "skipped": skipped,
        "nontriviality": {"passed": nt.passed, "counterexample": None if nt.passed else nt.counterexample},
        "config_digest": args.digest,
    }
    Output(args).emit(_dumps(payload))
    return EXIT_FALSIFIED if any(r["verdict"] == assumptions.COUNTEREXAMPLE for r in reports) else EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "solve": cmd_solve,
    "bvp": cmd_bvp,
    "study": cmd_study,
    "check": cmd_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="monosys", description="Solve and study A x = lambda h(x, u).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", default=None, help="output path (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), default="csv" if name in ("spectrum", "bvp", "study") else "json")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        args.digest = config_digest(cfg, args.seed)
        return COMMANDS[args.command](cfg, args)
    except InadmissibleLambdaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LAMBDA
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except (ConfigError, MonosysError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

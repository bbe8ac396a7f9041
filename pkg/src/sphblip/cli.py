"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import STUDY_HEADER, refinement_study, time_history_study
from .config import ConfigError, InvalidValue, RunConfig, load_config
from .eos import NonPhysicalState
from .fv import CoverageMismatch, EdgeCrossing
from .output import rows_to_columns, write_csv
from .problems import CATALOGUE, UnknownProblem, get_problem
from .recipes import FIGURES, TIERS, recipe, run_recipe, write_exact, write_outcome
from .riemann import NoConvergence, VacuumGenerated
from .runs import execute
from .sph import StepRejected

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
NUMERICAL_ERRORS = (NonPhysicalState, StepRejected, VacuumGenerated, NoConvergence,
                    EdgeCrossing, CoverageMismatch, FloatingPointError, ArithmeticError,
                    RuntimeError)


def _floats(text: str):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InvalidValue(f"expected a comma-separated list of numbers, got {text!r}") from None


def _load(args) -> RunConfig:
    if not args.config:
        raise InvalidValue("--config is required")
    cfg = load_config(args.config)
    over = {}
    if args.out:
        over["out"] = args.out
    if args.workers:
        over["workers"] = args.workers
    return cfg.with_(**over) if over else cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    oc = execute(cfg)
    for p in write_outcome(oc, cfg.out):
        print(p)
    return EXIT_OK


def cmd_exact(args) -> int:
    prob = get_problem(args.problem)
    if not args.t > 0.0:
        raise InvalidValue("t must be positive; the self-similar solution is undefined at t = 0")
    if args.n < 1:
        raise InvalidValue("n must be positive")
    out = Path(args.out or ".") / f"exact_{prob.name}_t{args.t:.6g}.csv"
    write_exact(prob.name, args.t, out, args.n)
    print(out)
    return EXIT_OK


def _study_runner(cfg: RunConfig):
    def run(n):
        oc = execute(cfg.with_(resolution=int(n), workers=1))
        return oc.final.profile, oc.scale, 0.05
    return run


def cmd_convergence(args) -> int:
    cfg = _load(args)
    res = [int(r) for r in _floats(args.resolutions)]
    if len(res) < 3:
        raise InvalidValue("a convergence study needs at least three resolutions")
    prob = get_problem(cfg.problem)
    rows, _ = refinement_study(_study_runner(cfg), prob, res, workers=cfg.workers)
    out = Path(cfg.out) / "convergence.csv"
    write_csv(out, rows_to_columns(rows, STUDY_HEADER))
    print(out)
    return EXIT_OK


def cmd_timehist(args) -> int:
    cfg = _load(args)
    times = _floats(args.times)
    if not times or any(b <= a for a, b in zip(times, times[1:])) or times[0] <= 0.0:
        raise InvalidValue("times must be positive and increasing")
    prob = get_problem(cfg.problem)
    oc = execute(cfg.with_(t_end=times[-1], cadence=tuple(times[:-1])))
    snaps = {s.t: s for s in oc.snapshots}

    def runner(ts):
        return [(snaps[t].profile, oc.scale, 0.05) for t in ts]

    rows, _ = time_history_study(runner, prob, times)
    out = Path(cfg.out) / "timehist.csv"
    write_csv(out, rows_to_columns(rows, STUDY_HEADER))
    print(out)
    return EXIT_OK


def cmd_figure(args) -> int:
    rec = recipe(args.fig_id, args.tier)
    run_recipe(rec, args.out or "figures", args.workers or 1)
    print(Path(args.out or "figures") / rec.fig_id)
    return EXIT_OK


def cmd_list(args) -> int:
    print("problems:")
    for name, prob in CATALOGUE.items():
        print(f"  {name:14s} t_end={prob.t_end:g} domain={prob.domain} boundary={prob.boundary}")
    print("methods: mpm gsph gsph-hybrid fv-remap fv-euler")
    print("figures:")
    for fid in FIGURES:
        print(f"  {fid:6s} {recipe(fid).description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sphblip",
                                 description="Contact pressure blip experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, default=None, help="parallel runs")
    common.add_argument("--tier", choices=TIERS, default="ci")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common], help="run one configuration").set_defaults(
        func=cmd_run)
    p = sub.add_parser("exact", parents=[common], help="sample an exact solution")
    p.add_argument("problem")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.set_defaults(func=cmd_exact)
    p = sub.add_parser("convergence", parents=[common], help="refinement study")
    p.add_argument("--resolutions", required=True, help="e.g. 100,200,400")
    p.set_defaults(func=cmd_convergence)
    p = sub.add_parser("timehist", parents=[common], help="blip time history")
    p.add_argument("--times", required=True, help="e.g. 0.0025,0.005,0.0075,0.01")
    p.set_defaults(func=cmd_timehist)
    p = sub.add_parser("figure", parents=[common], help="run a figure recipe")
    p.add_argument("fig_id", choices=FIGURES)
    p.set_defaults(func=cmd_figure)
    sub.add_parser("list", parents=[common], help="list problems, methods, figures"
                   ).set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, UnknownProblem, FileNotFoundError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

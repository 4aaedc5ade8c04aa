"""Command-line front end.

Exit codes: 0 success (converged), 2 ran but did not converge / found no
improving thresholds, 1 could not run (missing or invalid config,
infeasible thresholds, numerical blow-up).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis
from .config import OUTPUT_DIR_ENV, RunConfig, load_config
from .engine import format_number, run, write_summary, write_trace
from .errors import ConfigError, FeasibilityError, SimulationError

log = logging.getLogger("smcbench")

EXIT_OK, EXIT_FATAL, EXIT_NOT_CONVERGED = 0, 1, 2


def _load(args) -> RunConfig:
    cfg = load_config(args.config, args.set)
    if getattr(args, "seed", None) is not None:
        sim = cfg.sim
        cfg = replace(cfg, sim=replace(sim, seed=args.seed,
                                       disturbance=replace(sim.disturbance, seed=args.seed)))
    return cfg


def _out_dir(cfg: RunConfig, args) -> Path:
    path = cfg.output_dir(args.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.sim.surface().twisting:
        log.warning("alpha <= 0.5: twisting-mode configuration")
    trace, summary = run(cfg.sim)
    out = _out_dir(cfg, args)
    run_id = cfg.output.run_id
    write_trace(trace, out / f"{run_id}.trace.csv")
    write_summary(summary.as_dict(), out / f"{run_id}.summary")
    for key, value in summary.as_dict().items():
        print(f"{key} = {format_number(value)}")
    return EXIT_OK if summary.converged else EXIT_NOT_CONVERGED


def cmd_benchmark(args) -> int:
    cfg = _load(args)
    kinds = cfg.benchmark.controllers
    traces, report = analysis.benchmark(cfg.sim, kinds)
    out = _out_dir(cfg, args)
    run_id = cfg.output.run_id
    for label, kind, trace in zip("ab", kinds, traces):
        write_trace(trace, out / f"{run_id}-{label}-{kind}.trace.csv")
    series = report.series
    with open(out / f"{run_id}.report.csv", "w", newline="\n") as fh:
        fh.write(",".join(series) + "\n")
        np.savetxt(fh, np.column_stack(list(series.values())), fmt="%.9g", delimiter=",")
    write_summary(report.scalars, out / f"{run_id}.report.summary")
    for key, value in report.scalars.items():
        print(f"{key} = {format_number(value)}")
    both = report.scalars["converged_a"] and report.scalars["converged_b"]
    return EXIT_OK if both else EXIT_NOT_CONVERGED


def cmd_chatter(args) -> int:
    pred = analysis.predict_chattering(args.mu, args.beta1, args.beta2)
    print(f"omega = {format_number(pred.omega)}")
    print(f"frequency_hz = {format_number(pred.frequency_hz)}")
    print(f"amplitude_sigma = {format_number(pred.amplitude_sigma)}")
    print(f"amplitude_x = {format_number(pred.amplitude_x)}")
    return EXIT_OK


def cmd_tune(args) -> int:
    cfg = _load(args)
    opts = cfg.tune
    grid = args.grid if args.grid is not None else opts.grid
    out = _out_dir(cfg, args)
    run_id = cfg.output.run_id
    try:
        result = analysis.tune_thresholds(
            cfg.sim, beta1=opts.beta1, grid=grid, slack=opts.slack,
            j_hat_max=opts.j_hat_max, duration=opts.duration, workers=opts.workers,
        )
    except analysis.NoImprovingPair as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    cols = ("beta1", "beta2", "feasible", "converged", "convergence_time", "energy",
            "baseline_time", "baseline_energy", "improving")
    with open(out / f"{run_id}.tune.csv", "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for cell in result.feasible_grid:
            fh.write(",".join(format_number(getattr(cell, c)) for c in cols) + "\n")
    summary = {
        "beta1": result.beta1,
        "beta2": result.beta2,
        "convergence_time": result.convergence_time,
        "energy": result.energy,
        "baseline_time": result.baseline_time,
        "baseline_energy": result.baseline_energy,
        "hard_constraint_margin": result.hard_constraint_margin,
        "grid": grid,
    }
    write_summary(summary, out / f"{run_id}.tune.summary")
    for key, value in summary.items():
        print(f"{key} = {format_number(value)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smcbench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a dotted config key (repeatable)")
        p.add_argument("--out-dir", default=None,
                       help=f"output directory (default: [output].dir, ${OUTPUT_DIR_ENV}, or .)")
        p.add_argument("--seed", type=int, default=None, help="noise and disturbance seed")
        return p

    with_config(sub.add_parser("simulate", help="run one closed-loop simulation")).set_defaults(
        func=cmd_simulate)
    with_config(sub.add_parser("benchmark", help="compare two controllers")).set_defaults(
        func=cmd_benchmark)
    p = with_config(sub.add_parser("tune", help="grid-search the energy-saving thresholds"))
    p.add_argument("--grid", type=int, default=None, help="grid points per axis (default 21)")
    p.set_defaults(func=cmd_tune)
    p = sub.add_parser("chatter", help="predicted chattering frequency and amplitude")
    p.add_argument("--mu", type=float, default=0.0012)
    p.add_argument("--beta1", type=float, default=0.85)
    p.add_argument("--beta2", type=float, default=0.1)
    p.set_defaults(func=cmd_chatter)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except FeasibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: config error: {exc}", file=sys.stderr)
    except SimulationError as exc:
        print(f"error: numerical blow-up: {exc}", file=sys.stderr)
    return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())

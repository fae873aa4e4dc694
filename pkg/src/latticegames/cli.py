"""Command-line entry points.

Subcommands: simulate, replicator, sweep, classify, ctable,
boundary-drift.  Every run is driven by a key = value config file
(--config), with --out and --seed overriding the file.  Outputs are
deterministic: identical config + seed gives byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 runtime or IO error.
Ensemble parallelism honors LATTICEGAMES_WORKERS (default: all logical
cores).
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from .analysis import (
    ADVISORY_NOTES,
    c_factor,
    classify_game,
    clustering_set_predicate,
    coex_triangle_predicate,
    interface_drift_win_predicate,
    payoff_domination_predicate,
    sweep_phase_diagram,
)
from .boundary1d import (
    GAP_EQ1,
    GAP_GE2,
    drift_closed_form,
    estimate_leftmost_drift,
)
from .config import ConfigError, RunConfig, parse_config
from .core import strategy_nature
from .dynamics import (
    HalfspaceInit,
    build_initial,
    rng_stream,
    run_direct,
    worker_count,
)
from .meanfield import integrate_replicator, interior_fixed_point, replicator_regime
from .outputs import (
    ensure_out_dir,
    write_drift_csv,
    write_replicator_csv,
    write_spacetime_pgm,
    write_sweep_csv,
    write_timeseries_csv,
)


def _load_config(args) -> RunConfig:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {args.config}: {exc}") from None
    cfg = parse_config(text)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _out_path(cfg: RunConfig, suffix: str) -> str:
    ensure_out_dir(cfg.out_dir)
    return os.path.join(cfg.out_dir, f"{cfg.basename}_{suffix}")


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if cfg.write_pgm:
        if cfg.d != 1:
            raise ConfigError("output.pgm: space-time output requires lattice.d = 1")
        cfg = dataclasses.replace(cfg, snapshot_policy="full")
    spec = cfg.spec()
    params = cfg.sim_params()
    rng = rng_stream(cfg.seed, 0)
    cfg0 = build_initial(params.init, spec, rng)
    traj = run_direct(cfg0, cfg.payoff, params, replicate=0, rng=rng)
    csv_path = _out_path(cfg, "timeseries.csv")
    write_timeseries_csv(traj, csv_path)
    written = [csv_path]
    if cfg.write_pgm:
        pgm_path = _out_path(cfg, "spacetime.pgm")
        write_spacetime_pgm(traj, pgm_path)
        written.append(pgm_path)
    if traj.fixation is not None:
        strategy, t_fix = traj.fixation
        print(f"fixation: strategy {strategy} at time {t_fix!r}")
    elif traj.frozen:
        print("frozen: non-uniform zero-rate state")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_replicator(args) -> int:
    cfg = _load_config(args)
    ode = integrate_replicator(cfg.payoff, cfg.u0, cfg.T, cfg.ode_dt)
    path = _out_path(cfg, "replicator.csv")
    write_replicator_csv(ode, cfg.u0, path)
    regime = replicator_regime(cfg.payoff)
    print(f"regime = {regime.value}")
    fp = interior_fixed_point(cfg.payoff)
    if fp.status == "interior":
        print(f"interior fixed point = {fp.value!r}")
    print(f"final u1 = {ode.final!r}")
    print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if cfg.sweep_a11 is None:
        raise ConfigError("sweep.a11_min: required for the sweep subcommand")
    if cfg.sweep_a22 is None:
        raise ConfigError("sweep.a22_min: required for the sweep subcommand")

    def axis(tr):
        lo, hi, steps = tr
        return [float(v) for v in np.linspace(lo, hi, steps)]

    report = sweep_phase_diagram(
        cfg.payoff.a12, cfg.payoff.a21, axis(cfg.sweep_a11), axis(cfg.sweep_a22),
        cfg.M, cfg.d, cfg.L, cfg.sim_params(), cfg.replicates,
        m=cfg.m, thresholds=cfg.thresholds)
    path = _out_path(cfg, "sweep.csv")
    write_sweep_csv(report, path)
    failed = [c for c in report.cells if c.error is not None]
    for note in ADVISORY_NOTES:
        print(f"note: {note}")
    if failed:
        print(f"{len(failed)} of {len(report.cells)} cells failed; see the error column")
    print(f"wrote {path}")
    return 0


def cmd_classify(args) -> int:
    cfg = _load_config(args)
    A = cfg.payoff
    M, d, m = cfg.M, cfg.d, cfg.m
    nat = strategy_nature(A)
    game = classify_game(A)
    fp = interior_fixed_point(A)
    print(f"payoff: a11={A.a11!r} a12={A.a12!r} a21={A.a21!r} a22={A.a22!r}")
    print(f"a1 = a11 - a21 = {A.a1!r} ({nat.nature1.value})")
    print(f"a2 = a22 - a12 = {A.a2!r} ({nat.nature2.value})")
    print(f"replicator regime: {replicator_regime(A).value}")
    print(f"interior fixed point: {fp.value!r} ({fp.status})")
    name = f" ({game.name})" if game.name else ""
    swap = "yes" if game.swapped else "no"
    print(f"game class: {game.ordering}{name}, labels swapped: {swap}")
    print(f"dominance win, strategy 1 (M={M}, d={d}): "
          f"{payoff_domination_predicate(A, M, d)}")
    print(f"dominance win, strategy 2 (M={M}, d={d}): "
          f"{payoff_domination_predicate(A, M, d, swapped=True)}")
    print(f"interface-drift win, strategy 1 (1D nearest neighbor): "
          f"{interface_drift_win_predicate(A)}")
    print(f"interface-drift win, strategy 2 (1D nearest neighbor): "
          f"{interface_drift_win_predicate(A, swapped=True)}")
    print(f"in clustering set: {clustering_set_predicate(A)}")
    print(f"in coexistence triangle (M={M}, d={d}, m={m!r}): "
          f"{coex_triangle_predicate(A, M, d, m)}")
    print(f"interface drift closed form, gap >= 2: {drift_closed_form(A, GAP_GE2)!r}")
    print(f"interface drift lower bound, gap = 1: {drift_closed_form(A, GAP_EQ1)!r}")
    for note in ADVISORY_NOTES:
        print(f"note: {note}")
    return 0


def cmd_ctable(args) -> int:
    if args.max_M < 1 or args.max_d < 1:
        raise ConfigError("--max-M/--max-d: must be >= 1")
    ds = range(1, args.max_d + 1)
    print("M\\d " + " ".join(f"{d:>6d}" for d in ds))
    for M in range(1, args.max_M + 1):
        row = " ".join(f"{c_factor(M, d):6.4f}" for d in ds)
        print(f"{M:<3d} {row}")
    return 0


def cmd_boundary_drift(args) -> int:
    cfg = _load_config(args)
    if cfg.d != 1 or cfg.M != 1:
        raise ConfigError("lattice.d/lattice.M: drift estimation requires d = 1, M = 1")
    if cfg.init != "halfspace":
        raise ConfigError("run.init: drift estimation requires `halfspace`")
    if cfg.replicates < 1:
        raise ConfigError("run.replicates: drift estimation needs >= 1 replicate")
    result = estimate_leftmost_drift(cfg.payoff, cfg.spec(), cfg.sim_params(),
                                     cfg.replicates,
                                     min_surviving=cfg.drift_min_surviving)
    path = _out_path(cfg, "drift.csv")
    write_drift_csv(result, cfg.payoff, path)
    for est, kind in ((result.ge2, "exact"), (result.eq1, "lower-bound")):
        if est is None:
            continue
        ref = drift_closed_form(cfg.payoff, est.gap_class)
        print(f"{est.gap_class}: estimate {est.point!r} +- {est.standard_error!r} "
              f"({est.sample_count} samples), reference {ref!r} [{kind}]")
    print(f"discarded {result.discarded} of {result.replicates_run} replicates "
          f"(wrap margin)")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticegames",
        description="Two-strategy evolutionary games on periodic lattices: "
                    "exact stochastic simulation, mean-field ODE, interface "
                    "drift, and phase-diagram sweeps.",
        epilog=f"Worker processes: set LATTICEGAMES_WORKERS "
               f"(current default {worker_count()}).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        if needs_config:
            p.add_argument("--config", required=True, help="key = value config file")
            p.add_argument("--out", default=None, help="output directory override")
            p.add_argument("--seed", type=int, default=None, help="seed override")
        p.set_defaults(func=fn)
        return p

    add("simulate", cmd_simulate,
        "run one lattice realization; write time-series CSV and optional PGM")
    add("replicator", cmd_replicator,
        "integrate the mean-field ODE; write trajectory CSV, print the regime")
    add("sweep", cmd_sweep,
        "evaluate predicates and empirical outcomes over an (a11, a22) grid")
    add("classify", cmd_classify,
        "print predicates, regime, and game class for the configured matrix")
    p_ctable = add("ctable", cmd_ctable,
                   "print the coexistence-slope table c(M, d)", needs_config=False)
    p_ctable.add_argument("--max-M", type=int, default=9)
    p_ctable.add_argument("--max-d", type=int, default=9)
    add("boundary-drift", cmd_boundary_drift,
        "estimate the leftmost-interface drift from half-space runs")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Bit-exact output writers: time-series CSV, sweep CSV, drift CSV, PGM.

Reals are rendered with shortest round-trip precision (repr), so a given
trajectory always serializes to the same bytes.  Files are written with
LF newlines regardless of platform.
"""
from __future__ import annotations

import os

import numpy as np

from .analysis import RegionReport
from .boundary1d import DriftResult, GAP_EQ1, GAP_GE2, drift_closed_form
from .core import PayoffMatrix
from .dynamics import Trajectory
from .meanfield import OdeTrajectory

PGM_MAX_DIM = 10_000


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_timeseries_csv(traj: Trajectory, path: str) -> None:
    """Columns: time, density1, het_r1, and interface_count for d = 1."""
    header = ["time", "density1", "het_r1"]
    cols = [traj.times, traj.density1, traj.het_r1]
    if traj.interface_count is not None:
        header.append("interface_count")
        cols.append(traj.interface_count)
    rows = zip(*cols)
    _write_text(path, _csv(rows, header))


def write_replicator_csv(ode: OdeTrajectory, u0: float, path: str) -> None:
    """Columns: time, u1; the first row is the initial condition at t = 0."""
    rows = [(0.0, float(u0))]
    rows += list(zip(ode.times, ode.u1))
    _write_text(path, _csv(rows, ("time", "u1")))


SWEEP_HEADER = ("a11", "a22", "dominance_win1", "dominance_win2",
                "drift_win1", "drift_win2", "in_clustering_set",
                "in_coex_triangle", "regime", "outcome", "replicates",
                "n_fix1", "n_fix2", "n_coex", "n_cluster", "error")


def write_sweep_csv(report: RegionReport, path: str) -> None:
    """One row per grid cell, row-major with a11 varying slowest."""
    rows = [(c.a11, c.a22, c.dominance_win1, c.dominance_win2,
             c.drift_win1, c.drift_win2, c.in_clustering_set,
             c.in_coex_triangle, c.regime, c.outcome, c.replicates,
             c.n_fix1, c.n_fix2, c.n_coex, c.n_cluster, c.error)
            for c in report.cells]
    _write_text(path, _csv(rows, SWEEP_HEADER))


def write_drift_csv(result: DriftResult, A: PayoffMatrix, path: str) -> None:
    """Gap-class drift estimates next to their closed-form references.

    The gap >= 2 reference is exact; the gap = 1 reference is only a
    lower bound on the true drift.
    """
    header = ("gap_class", "estimate", "standard_error", "sample_count",
              "total_time", "reference", "reference_kind",
              "replicates_run", "discarded")
    rows = []
    for est, cls, kind in ((result.ge2, GAP_GE2, "exact"),
                           (result.eq1, GAP_EQ1, "lower-bound")):
        if est is None:
            continue
        rows.append((cls, est.point, est.standard_error, est.sample_count,
                     est.total_time, drift_closed_form(A, cls), kind,
                     result.replicates_run, result.discarded))
    _write_text(path, _csv(rows, header))


def write_spacetime_pgm(traj: Trajectory, path: str) -> None:
    """Plain PGM (P2) space-time diagram of a d = 1 run with full snapshots.

    One image row per sample time, top row first sample, time increasing
    downward; one column per site; strategy 1 maps to 255, strategy 2 to
    0.  Dimensions are capped at 10^4 each.
    """
    spec = traj.spec
    if spec.d != 1:
        raise ValueError(f"space-time output requires d = 1, got d = {spec.d}")
    if traj.snapshots is None:
        raise ValueError("space-time output requires snapshot_policy = 'full'")
    width = spec.L[0]
    height = len(traj.snapshots)
    if width > PGM_MAX_DIM or height > PGM_MAX_DIM:
        raise ValueError(
            f"image {width}x{height} exceeds the {PGM_MAX_DIM} per-dimension cap")
    lines = ["P2", f"{width} {height}", "255"]
    for snap in traj.snapshots:
        row = np.where(snap.strategies == 1, 255, 0)
        lines.append(" ".join(str(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def ensure_out_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)

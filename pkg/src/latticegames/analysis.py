"""Predicate evaluation, game taxonomy, and empirical regime classification.

Pure payoff-matrix predicates (win conditions, the clustering set, the
coexistence triangle), the c(M,d) slope table, the twelve-class game
taxonomy, heterozygosity estimation, and ensemble outcome classification
feeding phase-diagram sweeps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Configuration,
    LatticeSpec,
    PayoffMatrix,
    neighbor_offsets,
    neighborhood_size,
)
from .dynamics import SimParams, Trajectory, run_ensemble
from .meanfield import replicator_regime

OUTCOME_LABELS = ("fix1", "fix2", "coexisting", "clustering", "undecided")

# Win-threshold results beyond the sharp predicates are advisory only:
# the thresholds exist but are not constructive, and the always-wins
# statement for the less altruistic strategy is a conjecture.
ADVISORY_NOTES = (
    "for fixed a12 > a21 there is a finite (nonconstructive) a11 threshold "
    "beyond which strategy 1 wins; symmetrically for strategy 2 under the "
    "label swap",
    "outside the clustering set the least altruistic strategy is "
    "conjectured, not proven, to always win",
)


def c_factor(M: int, d: int) -> float:
    """Coexistence-triangle slope 2M((2M+1)^d - 2) / ((M+1)(2M(2M+1)^{d-1} - 1))."""
    if M < 1 or d < 1:
        raise ValueError(f"M and d must be >= 1, got M={M}, d={d}")
    q = 2 * M + 1
    num = 2 * M * (q ** d - 2)
    den = (M + 1) * (2 * M * q ** (d - 1) - 1)
    return num / den


def payoff_domination_predicate(A: PayoffMatrix, M: int, d: int,
                                swapped: bool = False) -> bool:
    """Strategy 1 wins when its worst effective payoff beats strategy 2's best.

    True iff a12 > a21 and max(a22, a21) + a21/(N-1) < min(a11, a12) +
    a12/(N-1) with N the neighborhood size; with swapped=True the test is
    applied to the label-swapped matrix (a win condition for strategy 2).
    """
    B = A.swapped() if swapped else A
    if not B.a12 > B.a21:
        return False
    N = neighborhood_size(M, d)
    lhs = max(B.a22, B.a21) + B.a21 / (N - 1)
    rhs = min(B.a11, B.a12) + B.a12 / (N - 1)
    return lhs < rhs


def interface_drift_win_predicate(A: PayoffMatrix, swapped: bool = False) -> bool:
    """1D nearest-neighbor win condition for strategy 1 via interface drift.

    True iff a11 > max(a22, a21) + (a21 - a12), strictly: equivalently the
    closed-form interface drift and its gap-1 lower bound are both positive.
    """
    B = A.swapped() if swapped else A
    return B.a11 > max(B.a22, B.a21) + (B.a21 - B.a12)


def clustering_set_predicate(A: PayoffMatrix) -> bool:
    """Generic matrices: all entries and both row sums nonzero, row sums unequal.

    On this set the 1D nearest-neighbor system clusters.
    """
    prod = (A.a11 * A.a12 * A.a21 * A.a22
            * (A.a11 + A.a12) * (A.a21 + A.a22))
    return prod != 0.0 and (A.a11 + A.a12) != (A.a22 + A.a21)


def coex_triangle_predicate(A: PayoffMatrix, M: int, d: int, m: float) -> bool:
    """Coexistence triangle: c*a22 < a11 < -m and c*a11 < a22 < -m, c = c(M,d)."""
    if m <= 0:
        raise ValueError(f"triangle parameter m must be positive, got {m}")
    c = c_factor(M, d)
    return (c * A.a22 < A.a11 < -m) and (c * A.a11 < A.a22 < -m)


# game taxonomy -------------------------------------------------------------

_NAMED_ORDERINGS = {
    "a12>a22>a11>a21": "prisoner's dilemma",
    "a22>a12>a11>a21": "stag hunt",
    "a12>a22>a21>a11": "hawk-dove",
    "a12>a21>a11>a22": "battle of the sexes",
}

DEGENERATE_ORDERING = "degenerate-ordering"


@dataclass(frozen=True)
class GameClass:
    """Ordering class under the a12 > a21 convention.

    ordering: descending payoff chain like 'a12>a22>a11>a21', or
    'degenerate-ordering' on ties.  swapped records whether the labels
    were exchanged to reach the convention.
    """

    ordering: str
    name: str | None
    swapped: bool


def classify_game(A: PayoffMatrix) -> GameClass:
    """One of the 12 ordering classes, named for the four classics.

    Matrices with tied entries fall into the degenerate-ordering class.
    Canonicalization: when a12 < a21 the labels are swapped first, so
    every non-degenerate matrix lands in an a12 > a21 ordering.
    """
    vals = A.as_tuple()
    if len(set(vals)) < 4:
        return GameClass(DEGENERATE_ORDERING, None, False)
    swapped = A.a12 < A.a21
    B = A.swapped() if swapped else A
    entries = [("a11", B.a11), ("a12", B.a12), ("a21", B.a21), ("a22", B.a22)]
    entries.sort(key=lambda kv: -kv[1])
    ordering = ">".join(k for k, _ in entries)
    return GameClass(ordering, _NAMED_ORDERINGS.get(ordering), swapped)


# empirical observables ------------------------------------------------------

@dataclass(frozen=True)
class HeterozygosityEstimate:
    """P(eta(x) != eta(x + r e1)) averaged over sites and ensemble members."""

    r: int
    estimate: float
    standard_error: float
    time: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.estimate <= 1.0:
            raise ValueError(f"estimate must lie in [0,1], got {self.estimate}")
        if self.standard_error < 0:
            raise ValueError("standard error must be >= 0")


def heterozygosity(snapshots: Sequence[Configuration], r: int,
                   time: float | None = None) -> HeterozygosityEstimate:
    """Disagreement frequency at displacement r along the first axis.

    The estimate averages the indicator over all sites of every snapshot;
    the standard error is over ensemble members.
    """
    if len(snapshots) == 0:
        raise ValueError("heterozygosity requires a nonempty ensemble")
    if r == 0:
        raise ValueError("displacement r must be nonzero")
    means = []
    for cfg in snapshots:
        arr = cfg.strategies
        means.append(float(np.mean(arr != np.roll(arr, -r, axis=0))))
    means = np.asarray(means)
    est = float(means.mean())
    se = float(means.std(ddof=1) / np.sqrt(len(means))) if len(means) > 1 else 0.0
    return HeterozygosityEstimate(r=r, estimate=est, standard_error=se, time=time)


def is_sparse(cfg: Configuration, focal: int) -> bool:
    """True iff no two focal-strategy sites lie in each other's neighborhood."""
    if focal not in (1, 2):
        raise ValueError(f"focal strategy must be 1 or 2, got {focal}")
    spec = cfg.spec
    mask = cfg.strategies == focal
    axes = tuple(range(spec.d))
    for off in neighbor_offsets(spec.M, spec.d):
        if np.any(mask & np.roll(mask, tuple(-o for o in off), axis=axes)):
            return False
    return True


@dataclass(frozen=True)
class OutcomeThresholds:
    """Vote thresholds for empirical regime classification.

    fraction: share of replicates that must agree on a label.
    coex_het_floor: minimal final r=1 heterozygosity for a coexistence vote.
    cluster_decay_factor: required initial/final heterozygosity ratio for
    a clustering vote.
    """

    fraction: float = 0.95
    coex_het_floor: float = 0.05
    cluster_decay_factor: float = 5.0

    def __post_init__(self) -> None:
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must lie in (0,1]")
        if self.coex_het_floor <= 0 or self.cluster_decay_factor <= 1:
            raise ValueError("thresholds must be positive (decay factor > 1)")


@dataclass(frozen=True)
class EmpiricalOutcome:
    """Majority label with the per-label vote counts behind it."""

    label: str
    replicates: int
    n_fix1: int
    n_fix2: int
    n_coex: int
    n_cluster: int


def empirical_outcome(trajectories: Sequence[Trajectory],
                      thresholds: OutcomeThresholds = OutcomeThresholds()
                      ) -> EmpiricalOutcome:
    """Classify an ensemble as fix1/fix2/coexisting/clustering/undecided.

    Votes per run: fixation records for fix1/fix2; final r=1
    heterozygosity above the floor for coexistence; both strategies
    surviving with heterozygosity decayed by the configured factor for
    clustering.  The first label reaching the vote fraction wins, checked
    in that order; otherwise undecided.
    """
    n = len(trajectories)
    if n == 0:
        raise ValueError("empirical_outcome requires a nonempty ensemble")
    n_fix1 = n_fix2 = n_coex = n_cluster = 0
    for tr in trajectories:
        if tr.fixation is not None:
            if tr.fixation[0] == 1:
                n_fix1 += 1
            else:
                n_fix2 += 1
        final_het = float(tr.het_r1[-1])
        if final_het >= thresholds.coex_het_floor:
            n_coex += 1
        if (tr.fixation is None
                and final_het * thresholds.cluster_decay_factor <= tr.initial_het_r1):
            n_cluster += 1
    need = thresholds.fraction * n
    if n_fix1 >= need:
        label = "fix1"
    elif n_fix2 >= need:
        label = "fix2"
    elif n_coex >= need:
        label = "coexisting"
    elif n_cluster >= need:
        label = "clustering"
    else:
        label = "undecided"
    return EmpiricalOutcome(label, n, n_fix1, n_fix2, n_coex, n_cluster)


# phase-diagram sweeps -------------------------------------------------------

@dataclass(frozen=True)
class RegionCell:
    """Predicates, mean-field regime, and empirical outcome at one (a11, a22)."""

    a11: float
    a22: float
    dominance_win1: bool
    dominance_win2: bool
    drift_win1: bool
    drift_win2: bool
    in_clustering_set: bool
    in_coex_triangle: bool
    regime: str
    outcome: str | None = None
    replicates: int = 0
    n_fix1: int = 0
    n_fix2: int = 0
    n_coex: int = 0
    n_cluster: int = 0
    error: str | None = None


@dataclass(frozen=True)
class RegionReport:
    """Grid of RegionCell rows in row-major order, a11 varying slowest."""

    a12: float
    a21: float
    a11_values: tuple[float, ...]
    a22_values: tuple[float, ...]
    M: int
    d: int
    m: float
    cells: tuple[RegionCell, ...]
    advisory: tuple[str, ...] = ADVISORY_NOTES


def _cell_predicates(A: PayoffMatrix, M: int, d: int, m: float) -> dict:
    return dict(
        dominance_win1=payoff_domination_predicate(A, M, d),
        dominance_win2=payoff_domination_predicate(A, M, d, swapped=True),
        drift_win1=interface_drift_win_predicate(A),
        drift_win2=interface_drift_win_predicate(A, swapped=True),
        in_clustering_set=clustering_set_predicate(A),
        in_coex_triangle=coex_triangle_predicate(A, M, d, m),
        regime=replicator_regime(A).value,
    )


def sweep_phase_diagram(a12: float, a21: float,
                        a11_values: Sequence[float], a22_values: Sequence[float],
                        M: int, d: int, L: int | Sequence[int],
                        params: SimParams, replicates: int,
                        m: float = 1.0,
                        thresholds: OutcomeThresholds = OutcomeThresholds(),
                        runner: str = "direct",
                        workers: int | None = None) -> RegionReport:
    """Evaluate predicates and (optionally) empirical outcomes on a grid.

    Cell (i, j) covers A = ((a11_i, a12), (a21, a22_j)); replicate r of
    that cell draws from the stream (seed, cell_index, r), so the sweep
    is reproducible cell by cell.  replicates = 0 requests a
    predicate-only report.  Simulator errors are captured per cell.
    """
    a11s = tuple(float(v) for v in a11_values)
    a22s = tuple(float(v) for v in a22_values)
    if not a11s or not a22s:
        raise ValueError("sweep grid must be nonempty")
    if replicates < 0:
        raise ValueError(f"replicates must be >= 0, got {replicates}")
    sides = (int(L),) * d if isinstance(L, int) else tuple(int(v) for v in L)
    spec = LatticeSpec(d, M, sides)
    cells = []
    for i, a11 in enumerate(a11s):
        for j, a22 in enumerate(a22s):
            A = PayoffMatrix(a11, a12, a21, a22)
            pred = _cell_predicates(A, M, d, m)
            cell_index = i * len(a22s) + j
            if replicates == 0:
                cells.append(RegionCell(a11=a11, a22=a22, **pred))
                continue
            try:
                trajs = run_ensemble(A, spec, params, replicates,
                                     runner=runner,
                                     stream_prefix=(cell_index,),
                                     workers=workers)
                out = empirical_outcome(trajs, thresholds)
                cells.append(RegionCell(
                    a11=a11, a22=a22, **pred,
                    outcome=out.label, replicates=out.replicates,
                    n_fix1=out.n_fix1, n_fix2=out.n_fix2,
                    n_coex=out.n_coex, n_cluster=out.n_cluster))
            except Exception as exc:
                cells.append(RegionCell(
                    a11=a11, a22=a22, **pred,
                    error=f"{type(exc).__name__}: {exc}"))
    return RegionReport(a12=a12, a21=a21, a11_values=a11s, a22_values=a22s,
                        M=M, d=d, m=m, cells=tuple(cells))

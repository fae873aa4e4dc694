"""Interface (boundary) process for one-dimensional runs.

Between unequal adjacent strategies lives a signed particle; in the
nearest-neighbor case particles are never created and only annihilate in
pairs, which makes the particle count a pathwise-monotone observable and
the leftmost particle a random walk whose drift has a closed form.

Edges are indexed by integers: edge e is the bond between sites e and
e+1 (mod L), so no half-integer arithmetic is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Configuration, LatticeSpec, PayoffMatrix
from .dynamics import HalfspaceInit, SimParams, Trajectory, run_direct

GAP_GE2 = "gap>=2"
GAP_EQ1 = "gap=1"

# The tracked-interface displacement rate in the generator is exactly
# 1/4 of the closed-form drift units: an isolated interface site sees
# half its neighborhood on each side, halving the payoff row sums, and
# the adopting site picks the pushing neighbor with probability 1/N = 1/2.
DRIFT_UNITS = 4.0

WRAP_MARGIN_FACTOR = 4  # discard margin, in units of M, from the wrap edge


@dataclass(frozen=True)
class BoundaryState:
    """Signed particles at a fixed time, sorted by edge index.

    particles: tuple of (edge, sign); sign = eta(e+1) - eta(e).
    """

    particles: tuple[tuple[int, int], ...]
    time: float = 0.0

    def __post_init__(self) -> None:
        k = len(self.particles)
        if k % 2 != 0:
            raise ValueError(f"particle count must be even on a torus, got {k}")
        for (e1, s1), (e2, s2) in zip(self.particles, self.particles[1:]):
            if e2 <= e1:
                raise ValueError("particles must be sorted by edge index")
            if s2 == s1:
                raise ValueError("consecutive particles must have opposite signs")
        if k >= 2 and self.particles[0][1] == self.particles[-1][1]:
            raise ValueError("consecutive particles must have opposite signs")
        for _, s in self.particles:
            if s not in (-1, 1):
                raise ValueError(f"particle sign must be +-1, got {s}")

    @property
    def count(self) -> int:
        return len(self.particles)

    def edges(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.particles)


@dataclass(frozen=True)
class DriftEstimate:
    """Leftmost-particle drift in sites per unit time, one gap class."""

    point: float
    standard_error: float
    sample_count: int
    gap_class: str
    total_time: float = 0.0

    def __post_init__(self) -> None:
        if self.standard_error < 0:
            raise ValueError("standard error must be >= 0")
        if self.sample_count < 1:
            raise ValueError("sample count must be >= 1")
        if self.gap_class not in (GAP_GE2, GAP_EQ1):
            raise ValueError(f"unknown gap class {self.gap_class!r}")


@dataclass(frozen=True)
class DriftResult:
    """Both gap-class estimates from one half-space experiment.

    A class is None when no surviving replicate spent time in it.
    discarded counts replicates dropped because the tracked interface
    came within the wrap margin.
    """

    ge2: DriftEstimate | None
    eq1: DriftEstimate | None
    replicates_run: int
    discarded: int


@dataclass(frozen=True)
class InterfaceSeries:
    times: np.ndarray
    counts: np.ndarray
    monotone_safe: bool


def extract_boundaries(cfg: Configuration, time: float = 0.0) -> BoundaryState:
    """Signed particles of a d = 1 configuration.

    Edge e carries a particle iff sites e and e+1 (mod L) play different
    strategies; its sign is eta(e+1) - eta(e).
    """
    if cfg.spec.d != 1:
        raise ValueError(f"boundary extraction requires d = 1, got d = {cfg.spec.d}")
    arr = cfg.strategies
    nxt = np.roll(arr, -1)
    edges = np.nonzero(arr != nxt)[0]
    particles = tuple((int(e), int(nxt[e]) - int(arr[e])) for e in edges)
    return BoundaryState(particles, time)


def interface_count_series(traj: Trajectory) -> InterfaceSeries:
    """Particle count at each sample time of a d = 1 trajectory.

    For M = 1 the count is non-increasing along every path (particles
    are never created and annihilate in pairs); for M > 1 the counts are
    still computed but flagged non-monotone-safe.
    """
    spec = traj.spec
    if spec.d != 1:
        raise ValueError(f"interface counting requires d = 1, got d = {spec.d}")
    if traj.interface_count is not None:
        counts = traj.interface_count.copy()
    elif traj.snapshots is not None:
        counts = np.array([extract_boundaries(s).count for s in traj.snapshots],
                          dtype=np.int64)
    else:
        raise ValueError("trajectory carries neither interface counts nor snapshots")
    return InterfaceSeries(traj.times.copy(), counts, monotone_safe=spec.M == 1)


def drift_closed_form(A: PayoffMatrix, gap_class: str = GAP_GE2) -> float:
    """Leftmost-particle drift references, strategy 1 occupying the left.

    Gap >= 2: exact value (a11 + a12) - (a22 + a21).  Gap = 1: the value
    a11 + a12 - 2*a21 is only a lower bound on the drift.
    """
    if gap_class == GAP_GE2:
        return (A.a11 + A.a12) - (A.a22 + A.a21)
    if gap_class == GAP_EQ1:
        return A.a11 + A.a12 - 2.0 * A.a21
    raise ValueError(f"unknown gap class {gap_class!r}")


def _replay_halfspace(spec: LatticeSpec, flip_times: np.ndarray,
                      flip_sites: np.ndarray, t_end: float):
    """Replay a half-space flip log, tracking the 1->2 interface.

    Returns per-class (time, displacement) accumulators, an abort flag
    (tracked edge entered the wrap margin), and the absorption time if
    the two interfaces annihilated.  The strategy-1 block starts as
    [0, L/2); the tracked particle is the edge at its right end.  Gap
    classes are keyed by the 2-block length (the gap seen from the
    tracked particle); intervals with a length-1 strategy-1 block match
    neither half-space picture and count toward no class.
    """
    L = spec.L[0]
    margin = WRAP_MARGIN_FACTOR * spec.M
    start, end = 0, L // 2  # strategy-1 block [start, end), cyclic
    tau = {GAP_GE2: 0.0, GAP_EQ1: 0.0}
    disp = {GAP_GE2: 0.0, GAP_EQ1: 0.0}

    def classify(len1: int, len2: int) -> str | None:
        if len1 < 2:
            return None
        return GAP_EQ1 if len2 == 1 else GAP_GE2

    t_prev = 0.0
    absorbed_at = None
    aborted = False
    for t, x in zip(flip_times, flip_sites):
        len1 = (end - start) % L
        len2 = L - len1
        cls = classify(len1, len2)
        if cls is not None:
            tau[cls] += t - t_prev
        t_prev = t

        x = int(x)
        e_right = (end - 1) % L
        if x == end % L:
            # leftmost 2 adopts strategy 1: tracked edge moves right
            if len2 == 1:
                absorbed_at = t
                break
            end += 1
            if cls is not None:
                disp[cls] += 1.0
        elif x == e_right:
            # rightmost 1 flips: tracked edge moves left
            if len1 == 1:
                absorbed_at = t
                break
            end -= 1
            if cls is not None:
                disp[cls] -= 1.0
        elif x == (start - 1) % L:
            start -= 1
        elif x == start % L:
            start += 1
        else:
            raise RuntimeError(f"flip at site {x} not adjacent to either interface")
        e_new = (end - 1) % L
        if e_new < margin or e_new >= L - 1 - margin:
            aborted = True
            break

    if not aborted and absorbed_at is None:
        len1 = (end - start) % L
        cls = classify(len1, L - len1)
        if cls is not None:
            tau[cls] += t_end - t_prev
    return tau, disp, aborted, absorbed_at


def estimate_leftmost_drift(A: PayoffMatrix, spec: LatticeSpec, params: SimParams,
                            replicates: int, *, min_surviving: int = 50) -> DriftResult:
    """Empirical leftmost-particle drift from half-space runs.

    Runs `replicates` independent d = 1, M = 1 chains started from the
    half-space configuration, splits each path's time and tracked-edge
    displacement by the gap class in force immediately before each jump,
    and forms the ratio estimate sum(disp)/sum(time) per class, scaled
    to closed-form units.  Replicates whose tracked interface enters the
    wrap margin are discarded; fails if fewer than min_surviving remain.
    """
    if spec.d != 1 or spec.M != 1:
        raise ValueError("drift estimation requires d = 1, M = 1")
    if not isinstance(params.init, HalfspaceInit):
        raise ValueError("drift estimation requires the half-space initial condition")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")

    per_class: dict[str, list[tuple[float, float]]] = {GAP_GE2: [], GAP_EQ1: []}
    discarded = 0
    cfg0 = Configuration.halfspace(spec)
    for r in range(replicates):
        traj = run_direct(cfg0, A, params, replicate=r, record_flips=True)
        t_end = traj.fixation[1] if traj.fixation is not None else params.T
        tau, disp, aborted, _ = _replay_halfspace(
            spec, traj.flip_times, traj.flip_sites, t_end)
        if aborted:
            discarded += 1
            continue
        for cls in (GAP_GE2, GAP_EQ1):
            if tau[cls] > 0.0:
                per_class[cls].append((tau[cls], disp[cls]))

    surviving = replicates - discarded
    if surviving < min_surviving:
        raise RuntimeError(
            f"only {surviving} of {replicates} replicates survived the wrap-margin "
            f"discard, below the minimum {min_surviving}")

    def estimate(cls: str) -> DriftEstimate | None:
        rows = per_class[cls]
        if not rows:
            return None
        taus = np.array([t for t, _ in rows])
        disps = np.array([d for _, d in rows])
        total_t = taus.sum()
        raw = disps.sum() / total_t
        resid = disps - raw * taus
        se_raw = float(np.sqrt(np.sum(resid ** 2))) / total_t
        return DriftEstimate(point=float(DRIFT_UNITS * raw),
                             standard_error=float(DRIFT_UNITS * se_raw),
                             sample_count=len(rows),
                             gap_class=cls,
                             total_time=float(total_t))

    return DriftResult(ge2=estimate(GAP_GE2), eq1=estimate(GAP_EQ1),
                       replicates_run=replicates, discarded=discarded)

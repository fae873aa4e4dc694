"""Exact continuous-time simulation of the spatial game.

Three interchangeable constructions of the same Markov chain:

* run_direct: Gillespie with cached per-site rates and a Fenwick tree
  (compiled inner loop; the workhorse).
* run_graphical: per-site rate-m Poisson clocks with uniform labels and
  uniform neighbor draws, arrows thinned by the local payoff.
* run_graphical_negative: the all-negative-payoff variant with four
  Poisson families per site at rates -a_ij.

Plus the biased voter model used as a coupling bound.
"""
from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels as _k
from .core import (
    Configuration,
    LatticeSpec,
    PayoffMatrix,
    local_payoff,
    neighbor_offsets,
    neighbor_strategy_counts,
    neighborhood_size,
    neighbors,
)

WORKERS_ENV = "LATTICEGAMES_WORKERS"

_RNG_MASK = 0xFFFFFFFFFFFFFFFF
# uniform buffer growth schedule; short runs stay cheap, long runs
# amortize.  The schedule is fixed, so runs remain bit-reproducible.
_UNIFORM_BLOCK0 = 512
_UNIFORM_BLOCK_MAX = 65536


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for stream `path` under `seed`.

    Replicate r of an ensemble uses stream (seed, r); nested contexts
    (sweep cells) extend the path.  Streams are independent and
    order-free, so ensembles reduce deterministically.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & _RNG_MASK,
                                spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def worker_count() -> int:
    """Ensemble worker count: LATTICEGAMES_WORKERS, default logical cores."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


# initial conditions -------------------------------------------------------

@dataclass(frozen=True)
class BernoulliInit:
    p: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"bernoulli p must lie in [0,1], got {self.p}")


@dataclass(frozen=True)
class HalfspaceInit:
    pass


@dataclass(frozen=True)
class SingleSiteInit:
    strategy: int
    position: tuple[int, ...]


@dataclass(frozen=True)
class UniformInit:
    strategy: int


@dataclass(frozen=True, eq=False)
class ExplicitInit:
    cfg: Configuration


def build_initial(init, spec: LatticeSpec, rng: np.random.Generator) -> Configuration:
    if isinstance(init, BernoulliInit):
        return Configuration.bernoulli(spec, init.p, rng)
    if isinstance(init, HalfspaceInit):
        return Configuration.halfspace(spec)
    if isinstance(init, SingleSiteInit):
        return Configuration.single_site(spec, init.strategy, init.position)
    if isinstance(init, UniformInit):
        return Configuration.uniform(spec, init.strategy)
    if isinstance(init, ExplicitInit):
        if init.cfg.spec != spec:
            raise ValueError("explicit initial configuration does not match lattice spec")
        return init.cfg.copy()
    raise TypeError(f"unknown initial-condition spec {init!r}")


SNAPSHOT_POLICIES = ("none", "observables-only", "full")


@dataclass
class SimParams:
    """Run parameters shared by all simulators.

    sample_times defaults to a single observation at T.  Snapshot policy
    'full' stores a configuration copy at every sample time; the other
    two policies store none (per-sample observables are always cheap
    enough to record).
    """

    T: float
    seed: int
    init: object = field(default_factory=BernoulliInit)
    sample_times: tuple[float, ...] | None = None
    snapshot_policy: str = "observables-only"

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError(f"T must be positive, got {self.T}")
        self.seed = int(self.seed)
        if self.sample_times is not None:
            st = tuple(float(t) for t in self.sample_times)
            if any(t < 0 or t > self.T for t in st):
                raise ValueError(f"sample times must lie in [0, T={self.T}]")
            if any(b < a for a, b in zip(st, st[1:])):
                raise ValueError("sample times must be sorted")
            self.sample_times = st
        if self.snapshot_policy not in SNAPSHOT_POLICIES:
            raise ValueError(
                f"snapshot_policy must be one of {SNAPSHOT_POLICIES}, got {self.snapshot_policy!r}")

    def schedule(self) -> tuple[float, ...]:
        if self.sample_times is None:
            return (self.T,)
        if len(self.sample_times) == 0:
            raise ValueError("empty sample schedule")
        return self.sample_times


@dataclass
class Trajectory:
    """Sampled observables and bookkeeping from one run.

    Sites in first_flip / flip_sites are flat C-order indices.  fixation
    is (absorbed strategy, absorption time) when a uniform state was
    reached; frozen marks a non-uniform zero-rate state.  After either,
    all observables are constant.
    """

    times: np.ndarray
    density1: np.ndarray
    het_r1: np.ndarray
    interface_count: np.ndarray | None
    snapshots: list[Configuration] | None
    final_config: Configuration
    fixation: tuple[int, float] | None
    frozen: bool
    first_flip: tuple[float, int] | None
    n_flips: int
    initial_density1: float
    initial_het_r1: float
    flip_times: np.ndarray | None = None
    flip_sites: np.ndarray | None = None

    @property
    def spec(self) -> LatticeSpec:
        return self.final_config.spec


# analytic rates -----------------------------------------------------------

def flip_rate(x, cfg: Configuration, A: PayoffMatrix) -> float:
    """Total rate at which the site x changes strategy.

    max(0,-phi(x)) * f_other(x), the player dying and adopting a uniform
    neighbor, plus (1/N) * sum of max(0, phi(y)) over opposite-strategy
    neighbors y, each pushing its strategy onto x.  Zero payoff is inert.
    """
    spec = cfg.spec
    sx = cfg[x]
    n1, n2 = neighbor_strategy_counts(x, cfg)
    opp = n2 if sx == 1 else n1
    phi_x = local_payoff(x, cfg, A)
    r = max(0.0, -phi_x) * (opp / spec.N)
    for y in neighbors(x, spec):
        if cfg[y] != sx:
            py = local_payoff(y, cfg, A)
            if py > 0.0:
                r += py / spec.N
    return r


def rate_field(cfg: Configuration, A: PayoffMatrix) -> np.ndarray:
    """flip_rate at every site, vectorized; shape = lattice shape."""
    spec = cfg.spec
    arr = cfg.strategies
    N = spec.N
    axes = tuple(range(spec.d))
    n2 = np.zeros(spec.shape, dtype=np.int64)
    for off in neighbor_offsets(spec.M, spec.d):
        n2 += np.roll(arr, tuple(-o for o in off), axis=axes) == 2
    n1 = N - n2
    phi = np.where(arr == 1,
                   (A.a11 * n1 + A.a12 * n2) / N,
                   (A.a21 * n1 + A.a22 * n2) / N)
    opp = np.where(arr == 1, n2, n1)
    death = np.maximum(0.0, -phi) * (opp / N)
    pos = np.maximum(0.0, phi)
    birth = np.zeros(spec.shape, dtype=float)
    for off in neighbor_offsets(spec.M, spec.d):
        shift = tuple(-o for o in off)
        nbr_arr = np.roll(arr, shift, axis=axes)
        nbr_pos = np.roll(pos, shift, axis=axes)
        birth += np.where(nbr_arr != arr, nbr_pos, 0.0) / N
    return death + birth


def biased_voter_rate(x, cfg: Configuration, mu1: float, mu2: float) -> float:
    """c_BV(x): mu1*f1 for a type-2 site, mu2*f2 for a type-1 site."""
    n1, n2 = neighbor_strategy_counts(x, cfg)
    N = cfg.spec.N
    if cfg[x] == 2:
        return mu1 * n1 / N
    return mu2 * n2 / N


def mu_bounds(A: PayoffMatrix, M: int, d: int) -> tuple[float, float]:
    """Biased-voter rates (mu1, mu2) bracketing the game's flip rates.

    phi1(z), phi2(z) are the payoffs of a strategy-1/2 player with z
    strategy-2 neighbors out of N; mu1 collects the minimal push toward
    strategy 1, mu2 the maximal push toward strategy 2.
    """
    N = neighborhood_size(M, d)
    z = np.arange(N + 1, dtype=float)
    phi1 = (A.a11 * (N - z) + A.a12 * z) / N
    phi2 = (A.a21 * (N - z) + A.a22 * z) / N
    mu1 = np.min(np.maximum(0.0, -phi2[:-1])) + np.min(np.maximum(0.0, phi1[1:]))
    mu2 = np.max(np.maximum(0.0, -phi1[1:])) + np.max(np.maximum(0.0, phi2[:-1]))
    return float(mu1), float(mu2)


# lattice tables -----------------------------------------------------------

@lru_cache(maxsize=32)
def _tables(spec: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    """(neighbor table, rate-update table) of flat site indices.

    The update table holds the sites within Chebyshev distance 2M,
    center included, offsets deduplicated modulo L (a flip at x changes
    payoffs within M, hence rates within 2M).
    """
    idx = np.arange(spec.nsites, dtype=np.int64).reshape(spec.shape)
    axes = tuple(range(spec.d))

    def column(off):
        return np.roll(idx, tuple(-o for o in off), axis=axes).ravel()

    nbrs = np.stack([column(off) for off in neighbor_offsets(spec.M, spec.d)], axis=1)

    from itertools import product
    seen = set()
    ball_offsets = []
    for off in product(range(-2 * spec.M, 2 * spec.M + 1), repeat=spec.d):
        moff = tuple(o % Li for o, Li in zip(off, spec.L))
        if moff not in seen:
            seen.add(moff)
            ball_offsets.append(off)
    ball = np.stack([column(off) for off in ball_offsets], axis=1)
    return np.ascontiguousarray(nbrs), np.ascontiguousarray(ball)


def _payoff_tables(A: PayoffMatrix, N: int) -> tuple[np.ndarray, np.ndarray]:
    z = np.arange(N + 1, dtype=float)
    phi1 = (A.a11 * (N - z) + A.a12 * z) / N
    phi2 = (A.a21 * (N - z) + A.a22 * z) / N
    return phi1, phi2


def _observables(arr: np.ndarray) -> tuple[float, float, int | None]:
    """(strategy-1 density, r=1 heterozygosity along axis 0, interface count)."""
    nsites = arr.size
    density1 = np.count_nonzero(arr == 1) / nsites
    diff = arr != np.roll(arr, -1, axis=0)
    het = float(np.count_nonzero(diff) / nsites)
    iface = int(np.count_nonzero(diff)) if arr.ndim == 1 else None
    return density1, het, iface


class _Recorder:
    """Accumulates per-sample observables and snapshots for one run."""

    def __init__(self, spec: LatticeSpec, policy: str):
        self.spec = spec
        self.full = policy == "full"
        self.times: list[float] = []
        self.density1: list[float] = []
        self.het_r1: list[float] = []
        self.iface: list[int] = []
        self.snapshots: list[Configuration] | None = [] if self.full else None

    def record(self, t: float, arr: np.ndarray) -> None:
        d1, het, ifc = _observables(arr)
        self.times.append(t)
        self.density1.append(d1)
        self.het_r1.append(het)
        if ifc is not None:
            self.iface.append(ifc)
        if self.full:
            self.snapshots.append(Configuration(self.spec, arr.copy()))

    def trajectory(self, arr: np.ndarray, fixation, frozen, first_flip, n_flips,
                   initial, flip_times=None, flip_sites=None) -> Trajectory:
        d1_0, het_0, _ = initial
        return Trajectory(
            times=np.array(self.times, dtype=float),
            density1=np.array(self.density1, dtype=float),
            het_r1=np.array(self.het_r1, dtype=float),
            interface_count=(np.array(self.iface, dtype=np.int64)
                             if self.spec.d == 1 else None),
            snapshots=self.snapshots,
            final_config=Configuration(self.spec, arr.copy()),
            fixation=fixation,
            frozen=frozen,
            first_flip=first_flip,
            n_flips=n_flips,
            initial_density1=d1_0,
            initial_het_r1=het_0,
            flip_times=flip_times,
            flip_sites=flip_sites,
        )


def _check_run_inputs(cfg0: Configuration, params: SimParams) -> tuple[float, ...]:
    schedule = params.schedule()
    if len(schedule) == 0:
        raise ValueError("empty sample schedule")
    return schedule


# direct method ------------------------------------------------------------

def run_direct(cfg0: Configuration, A: PayoffMatrix, params: SimParams,
               *, replicate: int | tuple[int, ...] = 0,
               record_flips: bool = False,
               rng: np.random.Generator | None = None) -> Trajectory:
    """Exact CTMC realization via rate-weighted event selection.

    Deterministic given (seed, replicate).  Uniform configurations are
    absorbing: the run short-circuits and reports a fixation record.
    Non-uniform zero-rate states are reported as frozen.  An explicit
    rng continues that generator (callers that already drew the initial
    condition from the replicate's stream); otherwise the stream
    (seed, replicate) is opened fresh.
    """
    spec = cfg0.spec
    schedule = _check_run_inputs(cfg0, params)
    path = (replicate,) if isinstance(replicate, int) else tuple(replicate)
    if rng is None:
        rng = rng_stream(params.seed, *path)

    nbrs, ball = _tables(spec)
    phi1, phi2 = _payoff_tables(A, spec.N)
    strat = cfg0.strategies.ravel().astype(np.int8).copy()
    n2 = np.count_nonzero(strat[nbrs] == 2, axis=1).astype(np.int64)
    rate = np.empty(spec.nsites, dtype=float)
    _k.compute_rates(strat, n2, nbrs, phi1, phi2, rate)
    tree = np.zeros(spec.nsites + 1, dtype=float)
    total = _k._fw_build(tree, rate)

    fstate = np.array([0.0, total, float(np.count_nonzero(strat == 1)), 0.0, 0.0])
    ubuf = rng.random(_UNIFORM_BLOCK0)
    ipos = np.zeros(1, dtype=np.int64)
    first_flip = np.array([-1.0, -1.0])
    if record_flips:
        cap = 4096
        flips_t = np.empty(cap, dtype=float)
        flips_x = np.empty(cap, dtype=np.int64)
        log_state = np.array([0, cap], dtype=np.int64)
    else:
        flips_t = np.empty(1, dtype=float)
        flips_x = np.empty(1, dtype=np.int64)
        log_state = np.array([0, -1], dtype=np.int64)

    def advance_to(t_target: float) -> int:
        nonlocal ubuf, flips_t, flips_x
        while True:
            st = _k.advance(strat, n2, rate, tree, nbrs, ball, phi1, phi2,
                            fstate, ubuf, ipos, first_flip,
                            flips_t, flips_x, log_state, t_target)
            if st == _k.REFILL:
                ubuf = rng.random(min(2 * ubuf.shape[0], _UNIFORM_BLOCK_MAX))
                ipos[0] = 0
                continue
            if st == _k.LOG_FULL:
                newcap = 2 * flips_t.shape[0]
                flips_t = np.concatenate([flips_t, np.empty(flips_t.shape[0])])
                flips_x = np.concatenate([flips_x, np.empty(flips_x.shape[0], dtype=np.int64)])
                log_state[1] = newcap
                continue
            return st

    shaped = strat.reshape(spec.shape)
    initial = _observables(shaped)
    rec = _Recorder(spec, params.snapshot_policy)
    fixation = None
    frozen = False
    stopped = False
    for ts in schedule:
        if not stopped:
            st = advance_to(ts)
            if st == _k.ABSORBED:
                fixation = (1 if strat[0] == 1 else 2, float(fstate[0]))
                stopped = True
            elif st == _k.FROZEN:
                frozen = True
                stopped = True
        rec.record(ts, shaped)
    if not stopped and schedule[-1] < params.T:
        st = advance_to(params.T)
        if st == _k.ABSORBED:
            fixation = (1 if strat[0] == 1 else 2, float(fstate[0]))
        elif st == _k.FROZEN:
            frozen = True

    nf = int(fstate[4])
    ff = None
    if first_flip[0] >= 0.0:
        ff = (float(first_flip[0]), int(first_flip[1]))
    return rec.trajectory(
        shaped, fixation, frozen, ff, n_flips=nf, initial=initial,
        flip_times=flips_t[:nf].copy() if record_flips else None,
        flip_sites=flips_x[:nf].copy() if record_flips else None,
    )


def run_biased_voter(cfg0: Configuration, mu1: float, mu2: float, params: SimParams,
                     *, replicate: int | tuple[int, ...] = 0,
                     record_flips: bool = False) -> Trajectory:
    """Exact CTMC with rates mu1*f1 at type-2 sites and mu2*f2 at type-1 sites.

    Realized as the spatial game with constant payoff rows (mu1, mu1),
    (mu2, mu2): with nonnegative rates there are no death moves and the
    flip rates coincide with c_BV at every configuration.
    """
    if mu1 < 0 or mu2 < 0:
        raise ValueError(f"rates must be nonnegative, got mu1={mu1}, mu2={mu2}")
    A = PayoffMatrix(mu1, mu1, mu2, mu2)
    return run_direct(cfg0, A, params, replicate=replicate, record_flips=record_flips)


# graphical representations -------------------------------------------------

class EventStream:
    """Per-site Poisson clocks of rate m, merged lazily in global time order.

    Arrival gaps, the uniform label in (0, m), and the uniform neighbor
    draw are taken from one generator in a fixed order (label, neighbor,
    next gap), so a seed pins the whole structure.
    """

    def __init__(self, nsites: int, m: float, rng: np.random.Generator):
        self.m = m
        self.rng = rng
        first = rng.exponential(1.0 / m, nsites)
        self.heap = [(float(first[x]), x) for x in range(nsites)]
        heapq.heapify(self.heap)

    def pop(self, N: int) -> tuple[float, int, float, int]:
        """Next (time, site, label, neighbor slot); reschedules the site."""
        t, x = heapq.heappop(self.heap)
        label = self.rng.uniform(0.0, self.m)
        slot = int(self.rng.integers(N))
        heapq.heappush(self.heap, (t + self.rng.exponential(1.0 / self.m), x))
        return t, x, label, slot

    def peek_time(self) -> float:
        return self.heap[0][0]


def _graphical_payoff(x: int, strat: np.ndarray, n2: np.ndarray,
                      phi1: np.ndarray, phi2: np.ndarray) -> float:
    return phi1[n2[x]] if strat[x] == 1 else phi2[n2[x]]


def _apply_flip(x: int, strat: np.ndarray, n2: np.ndarray, nbrs: np.ndarray) -> int:
    s_new = 3 - strat[x]
    strat[x] = s_new
    dlt = 1 if s_new == 2 else -1
    for w in nbrs[x]:
        n2[w] += dlt
    return 1 if s_new == 1 else -1


def run_graphical(cfg0: Configuration, A: PayoffMatrix, params: SimParams,
                  *, replicate: int | tuple[int, ...] = 0,
                  rng: np.random.Generator | None = None) -> Trajectory:
    """Poisson-clock construction: at an arrival at x the arrow from the
    drawn neighbor is active iff the label is below |phi(x)|; a positive
    payoff pushes x's strategy onto the neighbor, a negative one makes x
    adopt the neighbor's strategy.  Same law as run_direct.
    """
    spec = cfg0.spec
    schedule = _check_run_inputs(cfg0, params)
    path = (replicate,) if isinstance(replicate, int) else tuple(replicate)
    if rng is None:
        rng = rng_stream(params.seed, *path)

    nbrs, _ = _tables(spec)
    phi1, phi2 = _payoff_tables(A, spec.N)
    strat = cfg0.strategies.ravel().astype(np.int8).copy()
    n2 = np.count_nonzero(strat[nbrs] == 2, axis=1).astype(np.int64)
    n1 = int(np.count_nonzero(strat == 1))
    nsites = spec.nsites
    m = A.max_abs

    shaped = strat.reshape(spec.shape)
    initial = _observables(shaped)
    rec = _Recorder(spec, params.snapshot_policy)
    fixation = None
    first_flip = None
    n_flips = 0
    t_now = 0.0

    stream = EventStream(nsites, m, rng) if m > 0.0 else None
    if n1 == 0 or n1 == nsites:
        fixation = (int(strat[0]), 0.0)

    for ts in schedule:
        while fixation is None and stream is not None and stream.peek_time() <= ts:
            t, x, label, slot = stream.pop(spec.N)
            t_now = t
            phi = _graphical_payoff(x, strat, n2, phi1, phi2)
            if label < abs(phi):
                v = int(nbrs[x, slot])
                if phi > 0.0:
                    target = v if strat[v] != strat[x] else -1
                    if target >= 0:
                        strat[v] = strat[x]
                        dlt = 1 if strat[x] == 2 else -1
                        for w in nbrs[v]:
                            n2[w] += dlt
                        n1 += 1 if strat[x] == 1 else -1
                        n_flips += 1
                        if first_flip is None:
                            first_flip = (t, v)
                elif phi < 0.0:
                    if strat[v] != strat[x]:
                        n1 += _apply_flip(x, strat, n2, nbrs)
                        n_flips += 1
                        if first_flip is None:
                            first_flip = (t, x)
            if n1 == 0 or n1 == nsites:
                fixation = (int(strat[0]), t)
        rec.record(ts, shaped)

    return rec.trajectory(shaped, fixation, False, first_flip, n_flips, initial)


def run_graphical_negative(cfg0: Configuration, A: PayoffMatrix, params: SimParams,
                           *, replicate: int | tuple[int, ...] = 0,
                           rng: np.random.Generator | None = None) -> Trajectory:
    """All-negative-payoff construction: four Poisson families per site at
    rates -a_ij; an arrival of family (i,j) at x is active iff x plays i
    and a first uniform neighbor plays j, in which case x adopts the
    strategy of a second uniform neighbor.  Same law as run_direct.
    """
    if not all(a < 0 for a in A.as_tuple()):
        raise ValueError("this construction requires all four payoffs strictly negative")
    spec = cfg0.spec
    schedule = _check_run_inputs(cfg0, params)
    path = (replicate,) if isinstance(replicate, int) else tuple(replicate)
    if rng is None:
        rng = rng_stream(params.seed, *path)

    nbrs, _ = _tables(spec)
    strat = cfg0.strategies.ravel().astype(np.int8).copy()
    n2 = np.count_nonzero(strat[nbrs] == 2, axis=1).astype(np.int64)
    n1 = int(np.count_nonzero(strat == 1))
    nsites = spec.nsites

    # families in fixed (i,j) order per site; rates -a_ij
    fam_rate = (-A.a11, -A.a12, -A.a21, -A.a22)
    fam_i = (1, 1, 2, 2)
    fam_j = (1, 2, 1, 2)
    heap: list[tuple[float, int, int]] = []
    for x in range(nsites):
        for f in range(4):
            heap.append((float(rng.exponential(1.0 / fam_rate[f])), x, f))
    heapq.heapify(heap)

    shaped = strat.reshape(spec.shape)
    initial = _observables(shaped)
    rec = _Recorder(spec, params.snapshot_policy)
    fixation = None
    first_flip = None
    n_flips = 0
    if n1 == 0 or n1 == nsites:
        fixation = (int(strat[0]), 0.0)

    for ts in schedule:
        while fixation is None and heap[0][0] <= ts:
            t, x, f = heapq.heappop(heap)
            u_slot = int(rng.integers(spec.N))
            v_slot = int(rng.integers(spec.N))
            heapq.heappush(heap, (t + rng.exponential(1.0 / fam_rate[f]), x, f))
            if strat[x] == fam_i[f] and strat[nbrs[x, u_slot]] == fam_j[f]:
                v = int(nbrs[x, v_slot])
                if strat[v] != strat[x]:
                    n1 += _apply_flip(x, strat, n2, nbrs)
                    n_flips += 1
                    if first_flip is None:
                        first_flip = (t, x)
                    if n1 == 0 or n1 == nsites:
                        fixation = (int(strat[0]), t)
        rec.record(ts, shaped)

    return rec.trajectory(shaped, fixation, False, first_flip, n_flips, initial)


# ensembles -----------------------------------------------------------------

_RUNNERS = {
    "direct": run_direct,
    "graphical": run_graphical,
    "graphical-negative": run_graphical_negative,
}


def _run_one(args):
    runner, A, spec, params, path, record_flips = args
    # one stream per replicate: initial-condition draws first, then dynamics
    rng = rng_stream(params.seed, *path)
    cfg0 = build_initial(params.init, spec, rng)
    fn = _RUNNERS[runner]
    if runner == "direct":
        return fn(cfg0, A, params, replicate=path, record_flips=record_flips, rng=rng)
    return fn(cfg0, A, params, replicate=path, rng=rng)


def run_ensemble(A: PayoffMatrix, spec: LatticeSpec, params: SimParams,
                 replicates: int, *, runner: str = "direct",
                 record_flips: bool = False,
                 stream_prefix: tuple[int, ...] = (),
                 workers: int | None = None) -> list[Trajectory]:
    """Independent replicates, one stream per replicate, order-stable.

    Replicate r draws its initial condition and its dynamics from the
    stream (seed, *stream_prefix, r).  The result list is ordered by
    replicate index regardless of worker scheduling.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    if runner not in _RUNNERS:
        raise ValueError(f"unknown runner {runner!r}")
    jobs = [(runner, A, spec, params, stream_prefix + (r,), record_flips)
            for r in range(replicates)]
    nworkers = worker_count() if workers is None else workers
    if nworkers > 1 and replicates > 1:
        import multiprocessing

        with multiprocessing.Pool(min(nworkers, replicates)) as pool:
            return pool.map(_run_one, jobs)
    return [_run_one(j) for j in jobs]

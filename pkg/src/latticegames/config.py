"""Flat key = value run configuration with dotted section prefixes.

Example document:

    payoff.a11 = -8
    payoff.a12 = 3
    payoff.a21 = 4
    payoff.a22 = -8
    lattice.d = 1
    lattice.M = 1
    lattice.L = 600
    run.T = 10000
    run.seed = 7

Unknown keys are rejected; every parse or validation error names the
offending key.  parse -> serialize -> parse is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import OutcomeThresholds
from .core import LatticeSpec, PayoffMatrix
from .dynamics import (
    BernoulliInit,
    HalfspaceInit,
    SNAPSHOT_POLICIES,
    SimParams,
    SingleSiteInit,
    UniformInit,
)


class ConfigError(ValueError):
    """Invalid configuration document; the message names the key."""


INIT_KINDS = ("bernoulli", "halfspace", "single-site", "uniform")

REQUIRED_KEYS = ("payoff.a11", "payoff.a12", "payoff.a21", "payoff.a22",
                 "lattice.L", "run.T", "run.seed")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for every subcommand.

    Simulation fields cover the lattice, horizon, seeding, initial
    condition, and sampling; the remaining fields carry subcommand
    options (ODE start/step, sweep grid, triangle parameter, outcome
    thresholds, drift survival floor) and output naming.
    """

    payoff: PayoffMatrix
    d: int
    M: int
    L: tuple[int, ...]
    T: float
    seed: int
    replicates: int = 1
    init: str = "bernoulli"
    init_p: float = 0.5
    init_strategy: int = 1
    init_position: tuple[int, ...] | None = None
    sample_times: tuple[float, ...] | None = None
    sample_dt: float | None = None
    snapshot_policy: str = "observables-only"
    out_dir: str = "out"
    basename: str = "run"
    write_pgm: bool = False
    u0: float = 0.5
    ode_dt: float = 0.01
    sweep_a11: tuple[float, float, int] | None = None
    sweep_a22: tuple[float, float, int] | None = None
    m: float = 1.0
    thresholds: OutcomeThresholds = field(default_factory=OutcomeThresholds)
    drift_min_surviving: int = 50

    def spec(self) -> LatticeSpec:
        return LatticeSpec(self.d, self.M, self.L)

    def schedule(self) -> tuple[float, ...]:
        """Resolved sample times: the explicit list, or 0, dt, 2dt, ..., T."""
        if self.sample_times is not None:
            return self.sample_times
        if self.sample_dt is None:
            return (self.T,)
        times = [0.0]
        k = 1
        while k * self.sample_dt < self.T - 1e-9 * self.T:
            times.append(k * self.sample_dt)
            k += 1
        times.append(self.T)
        return tuple(times)

    def initial_condition(self):
        if self.init == "bernoulli":
            return BernoulliInit(self.init_p)
        if self.init == "halfspace":
            return HalfspaceInit()
        if self.init == "uniform":
            return UniformInit(self.init_strategy)
        pos = self.init_position if self.init_position is not None else (0,) * self.d
        return SingleSiteInit(self.init_strategy, pos)

    def sim_params(self) -> SimParams:
        return SimParams(T=self.T, seed=self.seed, init=self.initial_condition(),
                         sample_times=self.schedule(),
                         snapshot_policy=self.snapshot_policy)


def _parse_scalar(key: str, raw: str, kind: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "false"):
                return raw.lower() == "true"
            raise ValueError
        return raw
    except ValueError:
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}") from None


def _parse_list(key: str, raw: str, kind: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip() != ""]
    if not parts:
        raise ConfigError(f"{key}: expected a comma-separated list, got {raw!r}")
    return tuple(_parse_scalar(key, p, kind) for p in parts)


# key -> (kind, is_list); strings validated downstream
_SCHEMA = {
    "payoff.a11": ("float", False),
    "payoff.a12": ("float", False),
    "payoff.a21": ("float", False),
    "payoff.a22": ("float", False),
    "lattice.d": ("int", False),
    "lattice.M": ("int", False),
    "lattice.L": ("int", True),
    "run.T": ("float", False),
    "run.seed": ("int", False),
    "run.replicates": ("int", False),
    "run.init": ("str", False),
    "run.init_p": ("float", False),
    "run.init_strategy": ("int", False),
    "run.init_position": ("int", True),
    "run.sample_times": ("float", True),
    "run.sample_dt": ("float", False),
    "run.snapshot_policy": ("str", False),
    "output.dir": ("str", False),
    "output.basename": ("str", False),
    "output.pgm": ("bool", False),
    "replicator.u0": ("float", False),
    "replicator.dt": ("float", False),
    "sweep.a11_min": ("float", False),
    "sweep.a11_max": ("float", False),
    "sweep.a11_steps": ("int", False),
    "sweep.a22_min": ("float", False),
    "sweep.a22_max": ("float", False),
    "sweep.a22_steps": ("int", False),
    "triangle.m": ("float", False),
    "outcome.fraction": ("float", False),
    "outcome.coex_het_floor": ("float", False),
    "outcome.cluster_decay_factor": ("float", False),
    "drift.min_surviving": ("int", False),
}


def _read_pairs(text: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"{key}: unknown key")
        if key in values:
            raise ConfigError(f"{key}: duplicate key")
        kind, is_list = _SCHEMA[key]
        values[key] = (_parse_list(key, raw, kind) if is_list
                       else _parse_scalar(key, raw, kind))
    return values


def _sweep_axis(values: dict, axis: str) -> tuple[float, float, int] | None:
    keys = [f"sweep.{axis}_min", f"sweep.{axis}_max", f"sweep.{axis}_steps"]
    present = [k for k in keys if k in values]
    if not present:
        return None
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"{missing[0]}: required when {present[0]} is set")
    lo, hi, steps = (values[k] for k in keys)
    if steps < 1:
        raise ConfigError(f"sweep.{axis}_steps: must be >= 1, got {steps}")
    if steps > 1 and hi <= lo:
        raise ConfigError(f"sweep.{axis}_max: must exceed sweep.{axis}_min")
    return float(lo), float(hi), int(steps)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration document."""
    values = _read_pairs(text)
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"{key}: required key missing")

    d = int(values.get("lattice.d", 1))
    M = int(values.get("lattice.M", 1))
    if d < 1:
        raise ConfigError(f"lattice.d: must be >= 1, got {d}")
    if M < 1:
        raise ConfigError(f"lattice.M: must be >= 1, got {M}")
    Lraw = values["lattice.L"]
    if len(Lraw) == 1:
        Lraw = Lraw * d
    if len(Lraw) != d:
        raise ConfigError(f"lattice.L: expected 1 or {d} entries, got {len(Lraw)}")
    floor = 2 * (2 * M + 1)
    for Li in Lraw:
        if Li < floor:
            raise ConfigError(
                f"lattice.L: each side must be >= 2(2M+1) = {floor}, got {Li}")
        if Li % 2 != 0:
            raise ConfigError(f"lattice.L: each side must be even, got {Li}")

    T = float(values["run.T"])
    if T <= 0:
        raise ConfigError(f"run.T: must be positive, got {T}")
    replicates = int(values.get("run.replicates", 1))
    if replicates < 0:
        raise ConfigError(f"run.replicates: must be >= 0, got {replicates}")

    init = values.get("run.init", "bernoulli")
    if init not in INIT_KINDS:
        raise ConfigError(f"run.init: must be one of {INIT_KINDS}, got {init!r}")
    init_p = float(values.get("run.init_p", 0.5))
    if not 0.0 <= init_p <= 1.0:
        raise ConfigError(f"run.init_p: must lie in [0,1], got {init_p}")
    init_strategy = int(values.get("run.init_strategy", 1))
    if init_strategy not in (1, 2):
        raise ConfigError(f"run.init_strategy: must be 1 or 2, got {init_strategy}")
    init_position = values.get("run.init_position")
    if init_position is not None:
        if len(init_position) != d:
            raise ConfigError(
                f"run.init_position: expected {d} coordinates, got {len(init_position)}")
        for c, Li in zip(init_position, Lraw):
            if not 0 <= c < Li:
                raise ConfigError(f"run.init_position: coordinate {c} outside [0,{Li})")

    sample_times = values.get("run.sample_times")
    sample_dt = values.get("run.sample_dt")
    if sample_times is not None and sample_dt is not None:
        raise ConfigError("run.sample_times: mutually exclusive with run.sample_dt")
    if sample_times is not None:
        st = tuple(float(t) for t in sample_times)
        if any(t < 0 or t > T for t in st):
            raise ConfigError(f"run.sample_times: times must lie in [0, T={T}]")
        if any(b < a for a, b in zip(st, st[1:])):
            raise ConfigError("run.sample_times: times must be sorted")
        sample_times = st
    if sample_dt is not None:
        sample_dt = float(sample_dt)
        if sample_dt <= 0:
            raise ConfigError(f"run.sample_dt: must be positive, got {sample_dt}")

    policy = values.get("run.snapshot_policy", "observables-only")
    if policy not in SNAPSHOT_POLICIES:
        raise ConfigError(
            f"run.snapshot_policy: must be one of {SNAPSHOT_POLICIES}, got {policy!r}")

    u0 = float(values.get("replicator.u0", 0.5))
    if not 0.0 <= u0 <= 1.0:
        raise ConfigError(f"replicator.u0: must lie in [0,1], got {u0}")
    ode_dt = float(values.get("replicator.dt", 0.01))
    if not 0.0 < ode_dt < T:
        raise ConfigError(f"replicator.dt: must lie in (0, T), got {ode_dt}")

    m = float(values.get("triangle.m", 1.0))
    if m <= 0:
        raise ConfigError(f"triangle.m: must be positive, got {m}")

    try:
        thresholds = OutcomeThresholds(
            fraction=float(values.get("outcome.fraction", 0.95)),
            coex_het_floor=float(values.get("outcome.coex_het_floor", 0.05)),
            cluster_decay_factor=float(values.get("outcome.cluster_decay_factor", 5.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"outcome.*: {exc}") from None

    min_surviving = int(values.get("drift.min_surviving", 50))
    if min_surviving < 1:
        raise ConfigError(f"drift.min_surviving: must be >= 1, got {min_surviving}")

    try:
        payoff = PayoffMatrix(values["payoff.a11"], values["payoff.a12"],
                              values["payoff.a21"], values["payoff.a22"])
    except ValueError as exc:
        raise ConfigError(f"payoff.*: {exc}") from None

    return RunConfig(
        payoff=payoff, d=d, M=M, L=tuple(int(Li) for Li in Lraw),
        T=T, seed=int(values["run.seed"]), replicates=replicates,
        init=init, init_p=init_p, init_strategy=init_strategy,
        init_position=(tuple(int(c) for c in init_position)
                       if init_position is not None else None),
        sample_times=sample_times, sample_dt=sample_dt, snapshot_policy=policy,
        out_dir=str(values.get("output.dir", "out")),
        basename=str(values.get("output.basename", "run")),
        write_pgm=bool(values.get("output.pgm", False)),
        u0=u0, ode_dt=ode_dt,
        sweep_a11=_sweep_axis(values, "a11"), sweep_a22=_sweep_axis(values, "a22"),
        m=m, thresholds=thresholds, drift_min_surviving=min_surviving,
    )


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) == cfg."""
    lines = [
        f"payoff.a11 = {cfg.payoff.a11!r}",
        f"payoff.a12 = {cfg.payoff.a12!r}",
        f"payoff.a21 = {cfg.payoff.a21!r}",
        f"payoff.a22 = {cfg.payoff.a22!r}",
        f"lattice.d = {cfg.d}",
        f"lattice.M = {cfg.M}",
        "lattice.L = " + ",".join(str(Li) for Li in cfg.L),
        f"run.T = {cfg.T!r}",
        f"run.seed = {cfg.seed}",
        f"run.replicates = {cfg.replicates}",
        f"run.init = {cfg.init}",
        f"run.init_p = {cfg.init_p!r}",
        f"run.init_strategy = {cfg.init_strategy}",
    ]
    if cfg.init_position is not None:
        lines.append("run.init_position = " + ",".join(str(c) for c in cfg.init_position))
    if cfg.sample_times is not None:
        lines.append("run.sample_times = " + ",".join(repr(t) for t in cfg.sample_times))
    if cfg.sample_dt is not None:
        lines.append(f"run.sample_dt = {cfg.sample_dt!r}")
    lines += [
        f"run.snapshot_policy = {cfg.snapshot_policy}",
        f"output.dir = {cfg.out_dir}",
        f"output.basename = {cfg.basename}",
        f"output.pgm = {str(cfg.write_pgm).lower()}",
        f"replicator.u0 = {cfg.u0!r}",
        f"replicator.dt = {cfg.ode_dt!r}",
    ]
    for axis, tr in (("a11", cfg.sweep_a11), ("a22", cfg.sweep_a22)):
        if tr is not None:
            lo, hi, steps = tr
            lines.append(f"sweep.{axis}_min = {lo!r}")
            lines.append(f"sweep.{axis}_max = {hi!r}")
            lines.append(f"sweep.{axis}_steps = {steps}")
    lines += [
        f"triangle.m = {cfg.m!r}",
        f"outcome.fraction = {cfg.thresholds.fraction!r}",
        f"outcome.coex_het_floor = {cfg.thresholds.coex_het_floor!r}",
        f"outcome.cluster_decay_factor = {cfg.thresholds.cluster_decay_factor!r}",
        f"drift.min_surviving = {cfg.drift_min_surviving}",
    ]
    return "\n".join(lines) + "\n"

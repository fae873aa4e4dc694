"""Domain types for two-strategy games on periodic lattices.

Payoffs act as rates: a positive local payoff is a birth rate, a negative
one a death rate.  Everything downstream (simulators, mean field, phase
diagrams) is built on the types and payoff computations defined here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

Site = "tuple[int, ...] | int"


class Nature(enum.Enum):
    """Sign classification of a strategy's advantage a_i over its rival."""

    ALTRUISTIC = "altruistic"
    SELFISH = "selfish"
    NEUTRAL = "neutral-boundary"


@dataclass(frozen=True)
class StrategyNature:
    nature1: Nature
    nature2: Nature


@dataclass(frozen=True)
class PayoffMatrix:
    """2x2 payoff matrix A = (a_ij), entries in rate units (1/time).

    a_ij is the payoff of a strategy-i player against a strategy-j player.
    """

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self) -> None:
        for name in ("a11", "a12", "a21", "a22"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise TypeError(f"{name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def a1(self) -> float:
        """Advantage of strategy 1: a11 - a21.  Positive means selfish."""
        return self.a11 - self.a21

    @property
    def a2(self) -> float:
        """Advantage of strategy 2: a22 - a12."""
        return self.a22 - self.a12

    @property
    def max_abs(self) -> float:
        """Largest payoff magnitude; bounds every per-site event rate."""
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))

    def row(self, strategy: int) -> tuple[float, float]:
        if strategy == 1:
            return (self.a11, self.a12)
        if strategy == 2:
            return (self.a21, self.a22)
        raise ValueError(f"strategy must be 1 or 2, got {strategy}")

    def swapped(self) -> "PayoffMatrix":
        """The matrix seen after relabeling strategies 1 <-> 2."""
        return PayoffMatrix(self.a22, self.a21, self.a12, self.a11)

    def scaled(self, m: float) -> "PayoffMatrix":
        return PayoffMatrix(m * self.a11, m * self.a12, m * self.a21, m * self.a22)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a11, self.a12, self.a21, self.a22)


def neighborhood_size(M: int, d: int) -> int:
    """Number of sites within Chebyshev distance M of a site, center excluded."""
    if M < 1 or d < 1:
        raise ValueError(f"require M >= 1 and d >= 1, got M={M}, d={d}")
    return (2 * M + 1) ** d - 1


@lru_cache(maxsize=None)
def neighbor_offsets(M: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Nonzero offsets of the Chebyshev ball, in lexicographic order.

    The order is fixed so uniform-neighbor draws are reproducible.
    """
    return tuple(off for off in product(range(-M, M + 1), repeat=d) if any(off))


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic torus: dimension d, interaction range M, side lengths L.

    Side lengths must be large enough that the 2M+1 interaction window
    never wraps onto the same site twice (L_i >= 2M+1), the floor at
    which neighborhoods stay proper sets.  Production configs parsed
    from files are held to the stricter even L_i >= 2(2M+1); see the
    config module.  Half-space initial conditions additionally need an
    even leading side.
    """

    d: int
    M: int
    L: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")
        L = tuple(int(v) for v in self.L)
        object.__setattr__(self, "L", L)
        if len(L) != self.d:
            raise ValueError(f"L must have d={self.d} entries, got {L}")
        for Li in L:
            if Li <= 0:
                raise ValueError(f"side lengths must be positive integers, got {Li}")
            if Li <= 2 * self.M:
                raise ValueError(
                    f"side length {Li} too small for M={self.M}: "
                    f"the interaction window would wrap onto a site twice"
                )

    @property
    def N(self) -> int:
        return neighborhood_size(self.M, self.d)

    @property
    def nsites(self) -> int:
        return int(np.prod(self.L))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.L


def _as_coords(x, spec: LatticeSpec) -> tuple[int, ...]:
    if isinstance(x, (int, np.integer)):
        if spec.d != 1:
            raise TypeError(f"scalar site index only valid for d=1, got d={spec.d}")
        return (int(x),)
    coords = tuple(int(v) for v in x)
    if len(coords) != spec.d:
        raise ValueError(f"site {x!r} has wrong dimension for d={spec.d}")
    return coords


def neighbors(x, spec: LatticeSpec) -> list:
    """The N sites within Chebyshev distance M of x, modular, x excluded.

    Order follows neighbor_offsets.  For d=1 a scalar site index yields
    scalar results; tuple input yields tuples.
    """
    scalar = isinstance(x, (int, np.integer)) and spec.d == 1
    coords = _as_coords(x, spec)
    out = []
    for off in neighbor_offsets(spec.M, spec.d):
        y = tuple((c + o) % Li for c, o, Li in zip(coords, off, spec.L))
        out.append(y[0] if scalar else y)
    return out


@dataclass(eq=False)
class Configuration:
    """Strategy in {1,2} at every torus site.

    Mutable; owned by a single simulation at a time.  Snapshots handed to
    analysis code are deep copies.
    """

    spec: LatticeSpec
    strategies: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.strategies, dtype=np.int8)
        if arr.shape != self.spec.shape:
            raise ValueError(f"strategies shape {arr.shape} != lattice shape {self.spec.shape}")
        vals = np.unique(arr)
        if not np.all(np.isin(vals, (1, 2))):
            raise ValueError(f"strategies must be 1 or 2, found values {vals}")
        self.strategies = arr

    # constructors ---------------------------------------------------------
    @classmethod
    def uniform(cls, spec: LatticeSpec, strategy: int) -> "Configuration":
        if strategy not in (1, 2):
            raise ValueError(f"strategy must be 1 or 2, got {strategy}")
        return cls(spec, np.full(spec.shape, strategy, dtype=np.int8))

    @classmethod
    def bernoulli(cls, spec: LatticeSpec, p: float, rng: np.random.Generator) -> "Configuration":
        """Each site independently strategy 1 with probability p, else 2."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0,1], got {p}")
        draw = rng.random(spec.shape) < p
        return cls(spec, np.where(draw, 1, 2).astype(np.int8))

    @classmethod
    def halfspace(cls, spec: LatticeSpec) -> "Configuration":
        """Strategy 1 on the interval [0, L/2) of the first axis, 2 elsewhere."""
        if spec.L[0] % 2 != 0:
            raise ValueError(
                f"half-space initial condition needs an even leading side, got {spec.L[0]}")
        arr = np.full(spec.shape, 2, dtype=np.int8)
        half = spec.L[0] // 2
        arr[(slice(0, half),) + (slice(None),) * (spec.d - 1)] = 1
        return cls(spec, arr)

    @classmethod
    def single_site(cls, spec: LatticeSpec, strategy: int, position) -> "Configuration":
        """All sites the other strategy except one focal site."""
        if strategy not in (1, 2):
            raise ValueError(f"strategy must be 1 or 2, got {strategy}")
        arr = np.full(spec.shape, 3 - strategy, dtype=np.int8)
        arr[_as_coords(position, spec)] = strategy
        return cls(spec, arr)

    # access ---------------------------------------------------------------
    def __getitem__(self, x) -> int:
        return int(self.strategies[_as_coords(x, self.spec)])

    def __setitem__(self, x, strategy: int) -> None:
        if strategy not in (1, 2):
            raise ValueError(f"strategy must be 1 or 2, got {strategy}")
        self.strategies[_as_coords(x, self.spec)] = strategy

    def copy(self) -> "Configuration":
        return Configuration(self.spec, self.strategies.copy())

    def count1(self) -> int:
        return int(np.count_nonzero(self.strategies == 1))

    def density1(self) -> float:
        return self.count1() / self.spec.nsites

    def is_uniform(self) -> bool:
        n1 = self.count1()
        return n1 == 0 or n1 == self.spec.nsites

    def swapped(self) -> "Configuration":
        """Copy with every strategy label flipped 1 <-> 2."""
        return Configuration(self.spec, (3 - self.strategies).astype(np.int8))


def neighbor_strategy_counts(x, cfg: Configuration) -> tuple[int, int]:
    """(n1, n2): how many of x's N neighbors follow each strategy."""
    n2 = 0
    spec = cfg.spec
    coords = _as_coords(x, spec)
    for off in neighbor_offsets(spec.M, spec.d):
        y = tuple((c + o) % Li for c, o, Li in zip(coords, off, spec.L))
        if cfg.strategies[y] == 2:
            n2 += 1
    return spec.N - n2, n2


def local_payoff(x, cfg: Configuration, A: PayoffMatrix) -> float:
    """Payoff of the player at x: a_i1*f1 + a_i2*f2, i the player's strategy.

    f_j is the fraction of the N neighbors following strategy j, so
    f1 + f2 = 1 exactly (common denominator N).
    """
    n1, n2 = neighbor_strategy_counts(x, cfg)
    ai1, ai2 = A.row(cfg[x])
    return (ai1 * n1 + ai2 * n2) / cfg.spec.N


def strategy_nature(A: PayoffMatrix) -> StrategyNature:
    """Classify both strategies by the strict sign of a1, a2."""

    def nat(a: float) -> Nature:
        if a > 0:
            return Nature.SELFISH
        if a < 0:
            return Nature.ALTRUISTIC
        return Nature.NEUTRAL

    return StrategyNature(nat(A.a1), nat(A.a2))

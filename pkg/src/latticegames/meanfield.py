"""Mean-field replicator dynamics for the two-strategy game.

The strategy-1 frequency obeys u1' = u1(1-u1)((a1+a2)u1 - a2).  Regimes
are read off the signs of a1 and a2; the interior fixed point, when it
exists, is e12 = a2/(a1+a2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Nature, PayoffMatrix, strategy_nature


class ReplicatorRegime(enum.Enum):
    STRATEGY1_WINS = "strategy1_wins"
    STRATEGY2_WINS = "strategy2_wins"
    COEXISTENCE = "coexistence"
    BISTABLE = "bistable"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class InteriorFixedPoint:
    """e12 when it lies in (0,1); otherwise a flag explaining its absence.

    status: 'interior' (value set), 'outside' (e12 exists but not in (0,1)),
    or 'undefined' (a1 + a2 = 0).
    """

    value: float | None
    status: str


@dataclass
class OdeTrajectory:
    times: np.ndarray
    u1: np.ndarray

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.u1 = np.asarray(self.u1, dtype=float)
        if self.times.shape != self.u1.shape:
            raise ValueError("times and u1 must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.u1 < 0) or np.any(self.u1 > 1):
            raise ValueError("u1 values must lie in [0,1]")

    @property
    def final(self) -> float:
        return float(self.u1[-1])


def replicator_rhs(u1: float, A: PayoffMatrix) -> float:
    """Right-hand side u1(1-u1)((a1+a2)u1 - a2)."""
    return u1 * (1.0 - u1) * ((A.a1 + A.a2) * u1 - A.a2)


def interior_fixed_point(A: PayoffMatrix) -> InteriorFixedPoint:
    s = A.a1 + A.a2
    if s == 0.0:
        return InteriorFixedPoint(None, "undefined")
    e12 = A.a2 / s
    if 0.0 < e12 < 1.0:
        return InteriorFixedPoint(e12, "interior")
    return InteriorFixedPoint(None, "outside")


def replicator_regime(A: PayoffMatrix) -> ReplicatorRegime:
    nat = strategy_nature(A)
    if nat.nature1 is Nature.NEUTRAL or nat.nature2 is Nature.NEUTRAL:
        return ReplicatorRegime.DEGENERATE
    if nat.nature1 is Nature.SELFISH and nat.nature2 is Nature.ALTRUISTIC:
        return ReplicatorRegime.STRATEGY1_WINS
    if nat.nature1 is Nature.ALTRUISTIC and nat.nature2 is Nature.SELFISH:
        return ReplicatorRegime.STRATEGY2_WINS
    if nat.nature1 is Nature.ALTRUISTIC and nat.nature2 is Nature.ALTRUISTIC:
        return ReplicatorRegime.COEXISTENCE
    return ReplicatorRegime.BISTABLE


def integrate_replicator(A: PayoffMatrix, u0: float, T: float, dt: float = 0.01) -> OdeTrajectory:
    """Fixed-step classical RK4 integration of the replicator equation.

    Values are clamped to [0,1] after every step; the last step is
    shortened to land exactly on T.
    """
    if not 0.0 <= u0 <= 1.0:
        raise ValueError(f"u0 must lie in [0,1], got {u0}")
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    if dt <= 0 or dt >= T:
        raise ValueError(f"require 0 < dt < T, got dt={dt}, T={T}")

    def f(u: float) -> float:
        return replicator_rhs(u, A)

    nfull = int(T / dt)
    if nfull * dt >= T:
        nfull -= 1
    times = [0.0]
    values = [float(u0)]
    t, u = 0.0, float(u0)
    for k in range(nfull + 1):
        h = dt if k < nfull else T - t
        k1 = f(u)
        k2 = f(u + 0.5 * h * k1)
        k3 = f(u + 0.5 * h * k2)
        k4 = f(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        u = min(1.0, max(0.0, u))
        t = (k + 1) * dt if k < nfull else T
        times.append(t)
        values.append(u)
    return OdeTrajectory(np.array(times), np.array(values))

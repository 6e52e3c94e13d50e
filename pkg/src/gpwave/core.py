"""Physical parameters and time-dependent trap schedules.

Schedules describe the squared trap frequency so that inverted traps
(negative values) need no special handling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


class ParameterError(ValueError):
    """Raised when physical parameters violate their invariants.

    ``problems`` maps field name to a human readable description.
    """

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        msg = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(f"invalid physics parameters ({msg})")


@dataclass(frozen=True)
class Constant:
    omega2: float = 1.0

    def __call__(self, t: float) -> float:
        return float(self.omega2)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Step schedule: ``values[0]`` before the first breakpoint, ``values[i]``
    on ``[breakpoints[i-1], breakpoints[i])`` and the last value afterwards."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.breakpoints, t, side="right"))
        return self.values[i]


@dataclass(frozen=True)
class Modulated:
    """omega2(t) = omega0_2 * (1 + epsilon * sin(big_omega * t))."""

    omega0_2: float = 1.0
    epsilon: float = 0.0
    big_omega: float = 1.0

    def __call__(self, t: float) -> float:
        return self.omega0_2 * (1.0 + self.epsilon * math.sin(self.big_omega * t))


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation through ``(t, omega2)`` samples, clamped outside."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(x) for x in self.times))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "Tabulated":
        ts, vs = zip(*pairs) if pairs else ((), ())
        return cls(tuple(ts), tuple(vs))

    def __call__(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))


OmegaSquaredSchedule = Union[Constant, PiecewiseConstant, Modulated, Tabulated]


def omega_squared_at(schedule: OmegaSquaredSchedule, t: float) -> float:
    """Squared trap frequency of ``schedule`` at time ``t``."""
    return schedule(t)


@dataclass(frozen=True)
class PhysicsParams:
    g: float = 0.0
    trap: OmegaSquaredSchedule = field(default_factory=Constant)
    mass: float = 1.0
    hbar: float = 1.0

    def omega2(self, t: float) -> float:
        return self.trap(t)


def _schedule_problems(trap) -> dict[str, str]:
    problems = {}

    def finite(name, values):
        if not all(math.isfinite(v) for v in values):
            problems[name] = "must be finite"

    if isinstance(trap, Constant):
        finite("trap.omega2", [trap.omega2])
    elif isinstance(trap, Modulated):
        finite("trap.omega2", [trap.omega0_2])
        finite("trap.epsilon", [trap.epsilon])
        finite("trap.big_omega", [trap.big_omega])
    elif isinstance(trap, PiecewiseConstant):
        finite("trap.breakpoints", trap.breakpoints)
        finite("trap.values", trap.values)
        if any(b >= c for b, c in zip(trap.breakpoints, trap.breakpoints[1:])):
            problems["trap.breakpoints"] = "must be strictly ascending"
        if len(trap.values) != len(trap.breakpoints) + 1:
            problems["trap.values"] = "need exactly one more value than breakpoints"
    elif isinstance(trap, Tabulated):
        finite("trap.table", trap.times + trap.values)
        if len(trap.times) < 2 or len(trap.times) != len(trap.values):
            problems["trap.table"] = "need at least 2 (t, omega2) samples"
        elif any(a >= b for a, b in zip(trap.times, trap.times[1:])):
            problems["trap.table"] = "sample times must be strictly ascending"
    else:
        problems["trap"] = f"unknown schedule type {type(trap).__name__}"
    return problems


def validate_params(raw: PhysicsParams) -> PhysicsParams:
    """Return ``raw`` unchanged, or raise ParameterError listing every violation."""
    problems = {}
    for name in ("mass", "hbar"):
        value = getattr(raw, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            problems[name] = f"must be finite and > 0, got {value!r}"
    if not (isinstance(raw.g, (int, float)) and math.isfinite(raw.g)):
        problems["g"] = f"must be finite, got {raw.g!r}"
    problems.update(_schedule_problems(raw.trap))
    if problems:
        raise ParameterError(problems)
    return raw

"""Host movement models queried on a fixed tick.

Every model answers ``position_at(t)`` for non-decreasing ``t``. The
closed-form paths are stateless; the random-waypoint walker consumes
its generator lazily leg by leg, so feeding it a time from the past
would desynchronize the draw order and is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .units import Position


@dataclass(frozen=True)
class StationaryPath:
    position: Position

    def position_at(self, t: float) -> Position:
        return self.position


@dataclass(frozen=True)
class LinearPath:
    start: Position
    velocity_x_mps: float
    velocity_y_mps: float

    def position_at(self, t: float) -> Position:
        return Position(
            self.start.x + self.velocity_x_mps * t,
            self.start.y + self.velocity_y_mps * t,
        )


@dataclass(frozen=True)
class CircularOrbitPath:
    """Counterclockwise orbit; one revolution per period."""

    center: Position
    radius_m: float
    period_s: float
    phase_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.radius_m <= 0.0 or self.period_s <= 0.0:
            raise ValueError("orbit radius and period must be positive")

    def angle_deg_at(self, t: float) -> float:
        return (self.phase_deg + 360.0 * t / self.period_s) % 360.0

    def position_at(self, t: float) -> Position:
        a = math.radians(self.angle_deg_at(t))
        return Position(
            self.center.x + self.radius_m * math.cos(a),
            self.center.y + self.radius_m * math.sin(a),
        )


class RandomWaypointPath:
    """Pick a waypoint, walk to it at a drawn speed, pause, repeat.

    Three uniform draws per leg (target x, target y, speed) in a fixed
    order keep trajectories reproducible for a given generator seed.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        x_min: float,
        x_max: float,
        y_min: float,
        y_max: float,
        speed_min_mps: float,
        speed_max_mps: float,
        pause_s: float = 0.0,
        start: Position | None = None,
    ) -> None:
        if x_max <= x_min or y_max <= y_min:
            raise ValueError("degenerate bounds")
        if not 0.0 < speed_min_mps <= speed_max_mps:
            raise ValueError("speeds must satisfy 0 < min <= max")
        if pause_s < 0.0:
            raise ValueError("pause must be nonnegative")
        self._rng = rng
        self._bounds = (x_min, x_max, y_min, y_max)
        self._speed = (speed_min_mps, speed_max_mps)
        self._pause = pause_s
        if start is None:
            start = Position(
                float(rng.uniform(x_min, x_max)), float(rng.uniform(y_min, y_max))
            )
        self._last_t = 0.0
        self._new_leg(start, 0.0)

    def _new_leg(self, origin: Position, t0: float) -> None:
        x_min, x_max, y_min, y_max = self._bounds
        target = Position(
            float(self._rng.uniform(x_min, x_max)),
            float(self._rng.uniform(y_min, y_max)),
        )
        speed = float(self._rng.uniform(*self._speed))
        travel = math.hypot(target.x - origin.x, target.y - origin.y) / speed
        self._origin = origin
        self._target = target
        self._t0 = t0
        self._t_arrive = t0 + travel
        self._t_resume = self._t_arrive + self._pause

    def position_at(self, t: float) -> Position:
        if t < self._last_t:
            raise ValueError("random waypoint path must be queried forward in time")
        self._last_t = t
        while t >= self._t_resume:
            self._new_leg(self._target, self._t_resume)
        if t >= self._t_arrive:
            return self._target
        frac = (t - self._t0) / (self._t_arrive - self._t0)
        return Position(
            self._origin.x + (self._target.x - self._origin.x) * frac,
            self._origin.y + (self._target.y - self._origin.y) * frac,
        )


MobilityModel = StationaryPath | LinearPath | CircularOrbitPath | RandomWaypointPath

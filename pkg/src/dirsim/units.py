"""Scalar unit conversions and planar geometry helpers.

Power is carried in dBm or linear mW, gains in dB, angles in degrees.
Functions are plain-float; array variants live in the kernel module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NEG_INF_DB = float("-inf")


def dbm_to_mw(power_dbm: float) -> float:
    """Convert a power level in dBm to linear milliwatts.

    P_mW = 10^(P_dBm / 10). Minus infinity maps to 0 mW.
    """
    if math.isnan(power_dbm):
        raise ValueError("power_dbm must not be NaN")
    if power_dbm == NEG_INF_DB:
        return 0.0
    return 10.0 ** (power_dbm / 10.0)


def mw_to_dbm(power_mw: float) -> float:
    """Convert linear milliwatts to dBm.

    P_dBm = 10 * log10(P_mW). Zero maps to minus infinity; negative
    power is a domain error.
    """
    if math.isnan(power_mw) or power_mw < 0.0:
        raise ValueError(f"power_mw must be >= 0, got {power_mw!r}")
    if power_mw == 0.0:
        return NEG_INF_DB
    return 10.0 * math.log10(power_mw)


def normalize_angle_deg(angle_deg: float) -> float:
    """Fold an angle in degrees into the half-open interval (-180, 180]."""
    if not math.isfinite(angle_deg):
        raise ValueError(f"angle_deg must be finite, got {angle_deg!r}")
    return 180.0 - (180.0 - angle_deg) % 360.0


def angular_difference_deg(angle_a_deg: float, angle_b_deg: float) -> float:
    """Signed smallest rotation from ``angle_b_deg`` to ``angle_a_deg``.

    Result lies in (-180, 180]; positive means counterclockwise.
    """
    return normalize_angle_deg(angle_a_deg - angle_b_deg)


@dataclass(frozen=True, slots=True)
class Position:
    """Planar position in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x!r}, {self.y!r})")


def distance_m(a: Position, b: Position) -> float:
    """Euclidean distance between two positions in meters."""
    dx = b.x - a.x
    dy = b.y - a.y
    # sqrt(dx*dx + dy*dy) instead of hypot keeps scalar and kernel paths
    # on the same arithmetic.
    return math.sqrt(dx * dx + dy * dy)


def bearing_deg(origin: Position, target: Position) -> float:
    """Direction of the vector from ``origin`` to ``target`` in [0, 360).

    Zero degrees points along +x and angles grow counterclockwise.
    Coincident positions have no direction and raise ValueError.
    """
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("bearing is undefined for coincident positions")
    return math.degrees(math.atan2(dy, dx)) % 360.0

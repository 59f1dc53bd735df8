"""Parametric antenna gain patterns.

A directional antenna is described by a normalized main-lobe curve (a
relative linear power gain in [0, 1], peaking at 1 on the boresight), an
absolute main-lobe gain, a side/back-lobe floor, and a requested beam
width. The curve's natural threshold width is rescaled onto the requested
beam width, so the configured width is exact by construction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Union

from .units import NEG_INF_DB, angular_difference_deg

_WIDTH_TOL_DEG = 1e-9
_PEAK_SCAN_STEP_DEG = 0.05


@dataclass(frozen=True, slots=True)
class CircularPattern:
    """Circle lobe: cos(theta) on |theta| < 90 deg, zero elsewhere.

    The radius ``r`` scales the raw polar curve and cancels out under
    peak normalization; it is kept so configured values round-trip.
    """

    r: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"r must be positive, got {self.r!r}")

    domain_deg: float = field(default=90.0, init=False, repr=False)

    def value(self, theta_deg: float) -> float:
        if abs(theta_deg) >= 90.0:
            return 0.0
        return math.cos(math.radians(theta_deg))


@dataclass(frozen=True, slots=True)
class CardioidPattern:
    """Cardioid lobe: (1 + cos(theta)) / 2, defined on the full circle."""

    domain_deg: float = field(default=180.0, init=False, repr=False)

    def value(self, theta_deg: float) -> float:
        if abs(theta_deg) > 180.0:
            return 0.0
        return (1.0 + math.cos(math.radians(theta_deg))) / 2.0


@dataclass(frozen=True, slots=True)
class FoliumPattern:
    """Folium lobe: cos(theta) * (b - 4a sin^2(theta)) on |theta| <= 90 deg.

    Negative excursions are clipped to zero and the curve is normalized
    by its boresight value b.
    """

    a: float = 1.0
    b: float = 3.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"a must be positive, got {self.a!r}")
        if not (math.isfinite(self.b) and self.b > 0.0):
            raise ValueError(f"b must be positive, got {self.b!r}")

    domain_deg: float = field(default=90.0, init=False, repr=False)

    def value(self, theta_deg: float) -> float:
        if abs(theta_deg) > 90.0:
            return 0.0
        t = math.radians(theta_deg)
        s = math.sin(t)
        raw = math.cos(t) * (self.b - 4.0 * self.a * s * s)
        if raw <= 0.0:
            return 0.0
        return raw / self.b


@dataclass(frozen=True, slots=True)
class RosePattern:
    """Rose lobe: cos(k * theta) on |theta| <= 90/k degrees."""

    k: float = 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise ValueError(f"k must be positive, got {self.k!r}")

    @property
    def domain_deg(self) -> float:
        return 90.0 / self.k

    def value(self, theta_deg: float) -> float:
        if abs(theta_deg) > self.domain_deg:
            return 0.0
        return math.cos(math.radians(self.k * theta_deg))


CurveFamily = Union[CircularPattern, CardioidPattern, FoliumPattern, RosePattern]

_FAMILY_NAMES = {
    "CircularPattern": CircularPattern,
    "CardioidPattern": CardioidPattern,
    "FoliumPattern": FoliumPattern,
    "RosePattern": RosePattern,
}


def make_family(name: str, **params: float) -> CurveFamily:
    """Build a curve family from its configuration name."""
    try:
        cls = _FAMILY_NAMES[name]
    except KeyError:
        raise ValueError(f"unknown pattern type {name!r}") from None
    return cls(**params)


def curve_value(family: CurveFamily, theta_hat_deg: float) -> float:
    """Normalized linear power gain of the raw lobe at an off-boresight angle.

    Returns a value in [0, 1]; zero outside the curve's angular domain.
    """
    return family.value(theta_hat_deg)


def _bisect_threshold_crossing(family: CurveFamily, threshold_lin: float, side: float) -> float:
    # One-sided search on the monotone flank: value(0) = 1 >= thr,
    # value(domain edge) = 0 < thr.
    lo = 0.0
    hi = side * family.domain_deg
    while abs(hi - lo) > _WIDTH_TOL_DEG:
        mid = 0.5 * (lo + hi)
        if family.value(mid) >= threshold_lin:
            lo = mid
        else:
            hi = mid
    return lo


@functools.lru_cache(maxsize=None)
def natural_width_deg(family: CurveFamily, threshold_db: float) -> float:
    """Angular width of the lobe region where the curve stays within
    ``threshold_db`` of its peak.

    Each flank is located by bisection to 1e-9 degrees.
    """
    if not (math.isfinite(threshold_db) and threshold_db > 0.0):
        raise ValueError(f"threshold_db must be positive, got {threshold_db!r}")
    threshold_lin = 10.0 ** (-threshold_db / 10.0)
    right = _bisect_threshold_crossing(family, threshold_lin, 1.0)
    left = _bisect_threshold_crossing(family, threshold_lin, -1.0)
    return right - left


@functools.lru_cache(maxsize=None)
def _validate_peak(family: CurveFamily) -> None:
    # The scaling model assumes the normalized maximum sits on the
    # boresight; scan the domain to catch a bad parameterization.
    peak = family.value(0.0)
    if abs(peak - 1.0) > 1e-12:
        raise ValueError(f"curve must be normalized to 1 at zero, got {peak!r}")
    edge = family.domain_deg
    steps = int(edge / _PEAK_SCAN_STEP_DEG) + 1
    for i in range(1, steps + 1):
        theta = min(i * _PEAK_SCAN_STEP_DEG, edge)
        if family.value(theta) > 1.0 + 1e-12:
            raise ValueError(
                f"curve exceeds its boresight value at {theta:.3f} deg; "
                "the maximum must sit at zero"
            )


@dataclass(frozen=True, slots=True)
class OmniAntenna:
    """Isotropic antenna: 0 dB gain in every direction."""

    def gain_db(self, direction_deg: float) -> float:
        return 0.0

    @property
    def max_gain_db(self) -> float:
        return 0.0


@dataclass(frozen=True)
class DirectionalAntenna:
    """Directional antenna built from a normalized lobe curve.

    The curve is compressed or stretched so that the two points
    ``threshold_db`` below the peak land exactly ``beam_width_deg``
    apart. Off the scaled lobe the gain falls back to the side-lobe
    floor.
    """

    family: CurveFamily
    beam_width_deg: float
    main_lobe_gain_db: float
    side_lobe_gain_db: float
    orientation_deg: float = 0.0
    threshold_db: float = 3.0
    natural_width_deg: float = field(init=False)
    scale: float = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.beam_width_deg < 360.0):
            raise ValueError(f"beam_width_deg must be in (0, 360), got {self.beam_width_deg!r}")
        if not self.main_lobe_gain_db > self.side_lobe_gain_db:
            raise ValueError(
                "main_lobe_gain_db must exceed side_lobe_gain_db, got "
                f"{self.main_lobe_gain_db!r} <= {self.side_lobe_gain_db!r}"
            )
        if not math.isfinite(self.orientation_deg):
            raise ValueError("orientation_deg must be finite")
        _validate_peak(self.family)
        width = natural_width_deg(self.family, self.threshold_db)
        object.__setattr__(self, "natural_width_deg", width)
        object.__setattr__(self, "scale", width / self.beam_width_deg)

    def gain_db(self, direction_deg: float) -> float:
        """Absolute gain in dB toward an absolute direction in degrees.

        The maximum of the scaled main lobe and the side-lobe floor.
        """
        theta = angular_difference_deg(direction_deg, self.orientation_deg)
        c = self.family.value(theta * self.scale)
        if c > 0.0:
            main = self.main_lobe_gain_db + 10.0 * math.log10(c)
        else:
            main = NEG_INF_DB
        return max(main, self.side_lobe_gain_db)

    @property
    def max_gain_db(self) -> float:
        return self.main_lobe_gain_db


Antenna = Union[OmniAntenna, DirectionalAntenna]

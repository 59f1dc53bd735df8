"""Path loss models, link budget, and coverage geometry.

The receive power chain is P_rx = P_tx + G_tx - PL + G_rx with every
term in the dB domain; an omnidirectional end contributes 0 dB, which
collapses the expression to the gainless form bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .antenna import Antenna, OmniAntenna
from .units import NEG_INF_DB, Position, bearing_deg, distance_m, mw_to_dbm

SPEED_OF_LIGHT_M_S = 299792458.0
MIN_DISTANCE_M = 0.1

_FOUR_PI = 4.0 * math.pi
_RANGE_TOL_DB = 1e-12


class PathLossModel(str, Enum):
    FREE_SPACE = "freeSpace"
    TWO_RAY = "twoRay"


def free_space_path_loss_db(distance_m: float, frequency_hz: float, alpha: float) -> float:
    """Free-space loss generalized to exponent alpha.

    PL = 10 * alpha * log10(4 pi d f / c); alpha = 2 is the Friis case.
    """
    if not distance_m > 0.0:
        raise ValueError(f"distance_m must be positive, got {distance_m!r}")
    if not frequency_hz > 0.0:
        raise ValueError(f"frequency_hz must be positive, got {frequency_hz!r}")
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return 10.0 * alpha * math.log10(_FOUR_PI * distance_m * frequency_hz / SPEED_OF_LIGHT_M_S)


def two_ray_crossover_m(h_tx_m: float, h_rx_m: float, frequency_hz: float) -> float:
    """Distance where the ground-reflection regime takes over."""
    return _FOUR_PI * h_tx_m * h_rx_m * frequency_hz / SPEED_OF_LIGHT_M_S


def two_ray_path_loss_db(
    distance_m: float,
    h_tx_m: float,
    h_rx_m: float,
    frequency_hz: float,
    alpha: float,
) -> float:
    """Two-regime ground reflection loss.

    Below the crossover distance the free-space expression applies; at
    and beyond it PL = 40 log10(d) - 20 log10(h_tx * h_rx). The seam is
    continuous only for alpha = 2.
    """
    if not (h_tx_m > 0.0 and h_rx_m > 0.0):
        raise ValueError(f"antenna heights must be positive, got {h_tx_m!r}, {h_rx_m!r}")
    crossover = two_ray_crossover_m(h_tx_m, h_rx_m, frequency_hz)
    if distance_m < crossover:
        return free_space_path_loss_db(distance_m, frequency_hz, alpha)
    if not distance_m > 0.0:
        raise ValueError(f"distance_m must be positive, got {distance_m!r}")
    return 40.0 * math.log10(distance_m) - 20.0 * math.log10(h_tx_m * h_rx_m)


def link_budget_dbm(p_tx_dbm: float, g_tx_db: float, path_loss_db: float, g_rx_db: float) -> float:
    """Receive power from the dB-domain budget P_tx + G_tx - PL + G_rx."""
    return p_tx_dbm + g_tx_db - path_loss_db + g_rx_db


@dataclass(frozen=True)
class RadioConfig:
    """Static radio parameters shared by coverage and reception tests."""

    transmitter_power_mw: float
    carrier_frequency_hz: float
    antenna: Antenna
    sensitivity_dbm: float = -85.0
    detection_threshold_dbm: float = -110.0
    snir_threshold_db: float = 4.0
    path_loss_alpha: float = 2.0
    path_loss_model: PathLossModel = PathLossModel.FREE_SPACE
    antenna_height_tx_m: float = 1.0
    antenna_height_rx_m: float = 1.0

    def __post_init__(self) -> None:
        if not self.transmitter_power_mw > 0.0:
            raise ValueError(f"transmitter_power_mw must be positive, got {self.transmitter_power_mw!r}")
        if not self.carrier_frequency_hz > 0.0:
            raise ValueError(f"carrier_frequency_hz must be positive, got {self.carrier_frequency_hz!r}")
        if self.sensitivity_dbm < self.detection_threshold_dbm:
            raise ValueError(
                "sensitivity_dbm must be at or above detection_threshold_dbm, got "
                f"{self.sensitivity_dbm!r} < {self.detection_threshold_dbm!r}"
            )
        if not self.path_loss_alpha > 0.0:
            raise ValueError(f"path_loss_alpha must be positive, got {self.path_loss_alpha!r}")

    @property
    def transmitter_power_dbm(self) -> float:
        return mw_to_dbm(self.transmitter_power_mw)

    def path_loss_db(self, d_m: float) -> float:
        if self.path_loss_model is PathLossModel.FREE_SPACE:
            return free_space_path_loss_db(d_m, self.carrier_frequency_hz, self.path_loss_alpha)
        return two_ray_path_loss_db(
            d_m,
            self.antenna_height_tx_m,
            self.antenna_height_rx_m,
            self.carrier_frequency_hz,
            self.path_loss_alpha,
        )


def received_power_dbm(
    tx: RadioConfig,
    tx_pos: Position,
    rx_pos: Position,
    rx_gain_db: float,
) -> float:
    """Receive power at ``rx_pos`` for a transmission from ``tx_pos``.

    The receiver's own gain toward the transmitter is supplied by the
    caller. Coincident positions use the transmit antenna's maximum
    gain (the bearing is degenerate) and sub-0.1 m separations are
    clamped to 0.1 m.
    """
    d = distance_m(tx_pos, rx_pos)
    if d == 0.0:
        g_tx = tx.antenna.max_gain_db
    else:
        g_tx = tx.antenna.gain_db(bearing_deg(tx_pos, rx_pos))
    pl = tx.path_loss_db(max(d, MIN_DISTANCE_M))
    return link_budget_dbm(tx.transmitter_power_dbm, g_tx, pl, rx_gain_db)


def is_in_coverage_area(
    tx: RadioConfig,
    tx_pos: Position,
    target_pos: Position,
    rx_gain_db: float,
) -> bool:
    """Whether a receiver at ``target_pos`` would detect this transmitter.

    True iff the link budget meets the transmitter config's detection
    threshold.
    """
    return received_power_dbm(tx, tx_pos, target_pos, rx_gain_db) >= tx.detection_threshold_dbm


def _bisect_range(loss_fn, budget_db: float, lo_m: float, hi_m: float) -> float:
    # loss_fn is increasing on [lo, hi] with loss(lo) <= budget < loss(hi).
    for _ in range(200):
        mid = 0.5 * (lo_m + hi_m)
        if loss_fn(mid) <= budget_db:
            lo_m = mid
        else:
            hi_m = mid
        if hi_m - lo_m <= lo_m * 1e-15:
            break
    return lo_m


def max_interference_distance_m(config: RadioConfig, system_max_rx_gain_db: float) -> float:
    """Largest distance at which this radio's transmissions can still be
    detected by any receiver in the system.

    Solves P_tx + G_tx_max - PL(d) + G_rx_max = detectionThreshold for d.
    Free space inverts in closed form; the two-ray curve is solved by
    bisection inside the regime selected by the budget (the seam at the
    crossover is discontinuous for alpha != 2).
    """
    budget_db = (
        config.transmitter_power_dbm
        + config.antenna.max_gain_db
        + system_max_rx_gain_db
        - config.detection_threshold_dbm
    )
    f = config.carrier_frequency_hz
    if config.path_loss_model is PathLossModel.FREE_SPACE:
        return (SPEED_OF_LIGHT_M_S / (_FOUR_PI * f)) * 10.0 ** (
            budget_db / (10.0 * config.path_loss_alpha)
        )

    h_product = config.antenna_height_tx_m * config.antenna_height_rx_m
    crossover = two_ray_crossover_m(config.antenna_height_tx_m, config.antenna_height_rx_m, f)
    far_loss_at_crossover = 40.0 * math.log10(crossover) - 20.0 * math.log10(h_product)
    loss = lambda d: config.path_loss_db(d)  # noqa: E731
    if budget_db >= far_loss_at_crossover:
        # The far regime reaches the budget; PL = 40 log10(d) - 20 log10(h*h).
        hi = crossover
        while loss(hi) <= budget_db:
            hi *= 2.0
        return _bisect_range(loss, budget_db, crossover, hi)
    lo = MIN_DISTANCE_M
    if loss(lo) > budget_db:
        return lo
    return _bisect_range(loss, budget_db, lo, crossover)

"""Vectorized pairwise link evaluation.

The scalar chain (antenna gain, path loss, link budget) is mirrored
here over flat arrays so full-roster recomputes and candidate
refinement stay cheap. Two interchangeable backends provide the same
three entry points: a numba JIT build and a pure-numpy build. The
active backend is picked at import time; set DIRSIM_BACKEND=numba or
DIRSIM_BACKEND=numpy to force one (default: numba when importable).

All power math matches the scalar module bit-for-bit in structure:
wrap angles with 180 - (180 - a) % 360, distances via sqrt(dx*dx+dy*dy),
sub-0.1 m separations clamped, coincident pairs evaluated at maximum
antenna gain.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .antenna import (
    CardioidPattern,
    CircularPattern,
    DirectionalAntenna,
    FoliumPattern,
    OmniAntenna,
    RosePattern,
)
from .propagation import MIN_DISTANCE_M, PathLossModel, RadioConfig, SPEED_OF_LIGHT_M_S
from .units import Position

FAMILY_OMNI = 0
FAMILY_CIRCLE = 1
FAMILY_CARDIOID = 2
FAMILY_FOLIUM = 3
FAMILY_ROSE = 4

PL_FREE_SPACE = 0
PL_TWO_RAY = 1

_FOUR_PI = 4.0 * math.pi
_NEG_INF = float("-inf")


@dataclass
class RadioArrays:
    """Structure-of-arrays mirror of the registered radios."""

    x: np.ndarray
    y: np.ndarray
    ptx_dbm: np.ndarray
    det_dbm: np.ndarray
    sens_dbm: np.ndarray
    snir_db: np.ndarray
    freq_hz: np.ndarray
    alpha: np.ndarray
    pl_model: np.ndarray
    ht_m: np.ndarray
    hr_m: np.ndarray
    fam: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    scale: np.ndarray
    main_db: np.ndarray
    side_db: np.ndarray
    orient_deg: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    @classmethod
    def from_radios(cls, radios: list[tuple[RadioConfig, Position]]) -> "RadioArrays":
        n = len(radios)
        out = cls(
            x=np.zeros(n), y=np.zeros(n),
            ptx_dbm=np.zeros(n), det_dbm=np.zeros(n),
            sens_dbm=np.zeros(n), snir_db=np.zeros(n),
            freq_hz=np.zeros(n), alpha=np.zeros(n),
            pl_model=np.zeros(n, dtype=np.int64),
            ht_m=np.ones(n), hr_m=np.ones(n),
            fam=np.zeros(n, dtype=np.int64),
            p1=np.zeros(n), p2=np.zeros(n), scale=np.zeros(n),
            main_db=np.zeros(n), side_db=np.zeros(n), orient_deg=np.zeros(n),
        )
        for i, (cfg, pos) in enumerate(radios):
            out.x[i] = pos.x
            out.y[i] = pos.y
            out.ptx_dbm[i] = cfg.transmitter_power_dbm
            out.det_dbm[i] = cfg.detection_threshold_dbm
            out.sens_dbm[i] = cfg.sensitivity_dbm
            out.snir_db[i] = cfg.snir_threshold_db
            out.freq_hz[i] = cfg.carrier_frequency_hz
            out.alpha[i] = cfg.path_loss_alpha
            out.pl_model[i] = PL_TWO_RAY if cfg.path_loss_model is PathLossModel.TWO_RAY else PL_FREE_SPACE
            out.ht_m[i] = cfg.antenna_height_tx_m
            out.hr_m[i] = cfg.antenna_height_rx_m
            ant = cfg.antenna
            if isinstance(ant, OmniAntenna):
                continue
            assert isinstance(ant, DirectionalAntenna)
            fam = ant.family
            if isinstance(fam, CircularPattern):
                out.fam[i], out.p1[i] = FAMILY_CIRCLE, fam.r
            elif isinstance(fam, CardioidPattern):
                out.fam[i] = FAMILY_CARDIOID
            elif isinstance(fam, FoliumPattern):
                out.fam[i], out.p1[i], out.p2[i] = FAMILY_FOLIUM, fam.a, fam.b
            elif isinstance(fam, RosePattern):
                out.fam[i], out.p1[i] = FAMILY_ROSE, fam.k
            else:  # pragma: no cover - exhaustive over curve families
                raise TypeError(f"unsupported curve family {fam!r}")
            out.scale[i] = ant.scale
            out.main_db[i] = ant.main_lobe_gain_db
            out.side_db[i] = ant.side_lobe_gain_db
            out.orient_deg[i] = ant.orientation_deg
        return out

    def set_position(self, i: int, x: float, y: float) -> None:
        self.x[i] = x
        self.y[i] = y

    def parameter_columns(self) -> tuple[np.ndarray, ...]:
        """Every per-radio parameter column (positions excluded)."""
        return (
            self.ptx_dbm, self.det_dbm, self.sens_dbm, self.snir_db,
            self.freq_hz, self.alpha, self.pl_model, self.ht_m, self.hr_m,
            self.fam, self.p1, self.p2, self.scale, self.main_db,
            self.side_db, self.orient_deg,
        )


class KernelSet(NamedTuple):
    """One backend's implementations of the pairwise power kernels."""

    name: str
    pair_power_row: Callable[[RadioArrays, int], np.ndarray]
    pair_power_subset: Callable[[RadioArrays, int, np.ndarray], np.ndarray]
    delivery_matrix: Callable[[RadioArrays], np.ndarray]


# -- numpy backend -------------------------------------------------------


def _np_wrap180(angle):
    return 180.0 - (180.0 - angle) % 360.0


def _np_gain(fam, p1, p2, scale, main_db, side_db, orient, bearing):
    """Elementwise antenna gain; family parameters broadcast with bearing."""
    theta = _np_wrap180(bearing - orient) * scale
    at = np.abs(theta)
    rad = np.radians(theta)
    c = np.zeros(np.broadcast(theta, fam).shape)
    mask = (fam == FAMILY_CIRCLE) & (at < 90.0)
    c = np.where(mask, np.cos(rad), c)
    mask = (fam == FAMILY_CARDIOID) & (at <= 180.0)
    c = np.where(mask, (1.0 + np.cos(rad)) / 2.0, c)
    mask = (fam == FAMILY_FOLIUM) & (at <= 90.0)
    sin_t = np.sin(rad)
    folium_raw = np.cos(rad) * (p2 - 4.0 * p1 * sin_t * sin_t)
    safe_b = np.where(p2 > 0.0, p2, 1.0)
    c = np.where(mask, np.maximum(folium_raw, 0.0) / safe_b, c)
    safe_k = np.where(fam == FAMILY_ROSE, p1, 1.0)
    mask = (fam == FAMILY_ROSE) & (at <= 90.0 / safe_k)
    c = np.where(mask, np.cos(np.radians(p1 * theta)), c)
    main = np.where(c > 0.0, main_db + 10.0 * np.log10(np.where(c > 0.0, c, 1.0)), _NEG_INF)
    return np.where(fam == FAMILY_OMNI, 0.0, np.maximum(main, side_db))


def _np_max_gain(fam, main_db):
    return np.where(fam == FAMILY_OMNI, 0.0, main_db)


def _np_path_loss(model, d, f, alpha, ht, hr):
    free = 10.0 * alpha * np.log10(_FOUR_PI * d * f / SPEED_OF_LIGHT_M_S)
    crossover = _FOUR_PI * ht * hr * f / SPEED_OF_LIGHT_M_S
    hh = ht * hr
    far = 40.0 * np.log10(d) - 20.0 * np.log10(hh)
    return np.where((model == PL_TWO_RAY) & (d >= crossover), far, free)


def _np_pair_core(a: RadioArrays, i: int, dx, dy):
    d = np.sqrt(dx * dx + dy * dy)
    colocated = d == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        fwd = np.degrees(np.arctan2(dy, dx)) % 360.0
        back = np.degrees(np.arctan2(-dy, -dx)) % 360.0
        g_tx = _np_gain(
            a.fam[i], a.p1[i], a.p2[i], a.scale[i],
            a.main_db[i], a.side_db[i], a.orient_deg[i], fwd,
        )
        g_rx = _np_gain(a.fam, a.p1, a.p2, a.scale, a.main_db, a.side_db, a.orient_deg, back)
    g_tx = np.where(colocated, _np_max_gain(a.fam[i], a.main_db[i]), g_tx)
    g_rx = np.where(colocated, _np_max_gain(a.fam, a.main_db), g_rx)
    pl = _np_path_loss(
        a.pl_model[i], np.maximum(d, MIN_DISTANCE_M), a.freq_hz[i], a.alpha[i],
        a.ht_m[i], a.hr_m[i],
    )
    return a.ptx_dbm[i] + g_tx - pl + g_rx


def _np_pair_power_row(a: RadioArrays, i: int) -> np.ndarray:
    prx = _np_pair_core(a, i, a.x - a.x[i], a.y - a.y[i])
    prx[i] = _NEG_INF
    return prx


def _np_pair_power_subset(a: RadioArrays, i: int, idx: np.ndarray) -> np.ndarray:
    dx = a.x[idx] - a.x[i]
    dy = a.y[idx] - a.y[i]
    d = np.sqrt(dx * dx + dy * dy)
    colocated = d == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        fwd = np.degrees(np.arctan2(dy, dx)) % 360.0
        back = np.degrees(np.arctan2(-dy, -dx)) % 360.0
        g_tx = _np_gain(
            a.fam[i], a.p1[i], a.p2[i], a.scale[i],
            a.main_db[i], a.side_db[i], a.orient_deg[i], fwd,
        )
        g_rx = _np_gain(
            a.fam[idx], a.p1[idx], a.p2[idx], a.scale[idx],
            a.main_db[idx], a.side_db[idx], a.orient_deg[idx], back,
        )
    g_tx = np.where(colocated, _np_max_gain(a.fam[i], a.main_db[i]), g_tx)
    g_rx = np.where(colocated, _np_max_gain(a.fam[idx], a.main_db[idx]), g_rx)
    pl = _np_path_loss(
        a.pl_model[i], np.maximum(d, MIN_DISTANCE_M), a.freq_hz[i], a.alpha[i],
        a.ht_m[i], a.hr_m[i],
    )
    prx = a.ptx_dbm[i] + g_tx - pl + g_rx
    prx[idx == i] = _NEG_INF
    return prx


def _np_delivery_matrix(a: RadioArrays) -> np.ndarray:
    dx = a.x[np.newaxis, :] - a.x[:, np.newaxis]
    dy = a.y[np.newaxis, :] - a.y[:, np.newaxis]
    d = np.sqrt(dx * dx + dy * dy)
    colocated = d == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        fwd = np.degrees(np.arctan2(dy, dx)) % 360.0
        back = np.degrees(np.arctan2(-dy, -dx)) % 360.0
        g_tx = _np_gain(
            a.fam[:, None], a.p1[:, None], a.p2[:, None], a.scale[:, None],
            a.main_db[:, None], a.side_db[:, None], a.orient_deg[:, None], fwd,
        )
        g_rx = _np_gain(
            a.fam[None, :], a.p1[None, :], a.p2[None, :], a.scale[None, :],
            a.main_db[None, :], a.side_db[None, :], a.orient_deg[None, :], back,
        )
    g_tx = np.where(colocated, _np_max_gain(a.fam[:, None], a.main_db[:, None]), g_tx)
    g_rx = np.where(colocated, _np_max_gain(a.fam[None, :], a.main_db[None, :]), g_rx)
    pl = _np_path_loss(
        a.pl_model[:, None], np.maximum(d, MIN_DISTANCE_M),
        a.freq_hz[:, None], a.alpha[:, None], a.ht_m[:, None], a.hr_m[:, None],
    )
    prx = a.ptx_dbm[:, None] + g_tx - pl + g_rx
    np.fill_diagonal(prx, _NEG_INF)
    return prx


NUMPY_KERNELS = KernelSet(
    name="numpy",
    pair_power_row=_np_pair_power_row,
    pair_power_subset=_np_pair_power_subset,
    delivery_matrix=_np_delivery_matrix,
)


# -- numba backend -------------------------------------------------------


def _build_numba_kernels() -> KernelSet:
    from numba import njit

    @njit(cache=True)
    def gain_one(fam, p1, p2, scale, main_db, side_db, orient, bearing):
        if fam == FAMILY_OMNI:
            return 0.0
        theta = (bearing - orient)
        theta = 180.0 - (180.0 - theta) % 360.0
        t = theta * scale
        at = abs(t)
        c = 0.0
        if fam == FAMILY_CIRCLE:
            if at < 90.0:
                c = math.cos(math.radians(t))
        elif fam == FAMILY_CARDIOID:
            if at <= 180.0:
                c = (1.0 + math.cos(math.radians(t))) / 2.0
        elif fam == FAMILY_FOLIUM:
            if at <= 90.0:
                tr = math.radians(t)
                s = math.sin(tr)
                raw = math.cos(tr) * (p2 - 4.0 * p1 * s * s)
                if raw > 0.0:
                    c = raw / p2
        else:
            if at <= 90.0 / p1:
                c = math.cos(math.radians(p1 * t))
        if c > 0.0:
            g = main_db + 10.0 * math.log10(c)
            if g > side_db:
                return g
        return side_db

    @njit(cache=True)
    def path_loss_one(model, d, f, alpha, ht, hr):
        if model == PL_TWO_RAY:
            crossover = _FOUR_PI * ht * hr * f / SPEED_OF_LIGHT_M_S
            if d >= crossover:
                return 40.0 * math.log10(d) - 20.0 * math.log10(ht * hr)
        return 10.0 * alpha * math.log10(_FOUR_PI * d * f / SPEED_OF_LIGHT_M_S)

    @njit(cache=True)
    def pair_one(
        i, j, x, y, ptx, freq, alpha, model, ht, hr,
        fam, p1, p2, scale, main_db, side_db, orient,
    ):
        dx = x[j] - x[i]
        dy = y[j] - y[i]
        d = math.sqrt(dx * dx + dy * dy)
        if d == 0.0:
            g_tx = main_db[i] if fam[i] != FAMILY_OMNI else 0.0
            g_rx = main_db[j] if fam[j] != FAMILY_OMNI else 0.0
        else:
            if fam[i] != FAMILY_OMNI:
                fwd = math.degrees(math.atan2(dy, dx)) % 360.0
                g_tx = gain_one(fam[i], p1[i], p2[i], scale[i], main_db[i], side_db[i], orient[i], fwd)
            else:
                g_tx = 0.0
            if fam[j] != FAMILY_OMNI:
                back = math.degrees(math.atan2(-dy, -dx)) % 360.0
                g_rx = gain_one(fam[j], p1[j], p2[j], scale[j], main_db[j], side_db[j], orient[j], back)
            else:
                g_rx = 0.0
        dc = d if d > MIN_DISTANCE_M else MIN_DISTANCE_M
        pl = path_loss_one(model[i], dc, freq[i], alpha[i], ht[i], hr[i])
        return ptx[i] + g_tx - pl + g_rx

    @njit(cache=True)
    def power_row(
        i, x, y, ptx, freq, alpha, model, ht, hr,
        fam, p1, p2, scale, main_db, side_db, orient,
    ):
        n = x.shape[0]
        out = np.empty(n)
        for j in range(n):
            if j == i:
                out[j] = _NEG_INF
            else:
                out[j] = pair_one(
                    i, j, x, y, ptx, freq, alpha, model, ht, hr,
                    fam, p1, p2, scale, main_db, side_db, orient,
                )
        return out

    @njit(cache=True)
    def power_subset(
        i, idx, x, y, ptx, freq, alpha, model, ht, hr,
        fam, p1, p2, scale, main_db, side_db, orient,
    ):
        m = idx.shape[0]
        out = np.empty(m)
        for k in range(m):
            j = idx[k]
            if j == i:
                out[k] = _NEG_INF
            else:
                out[k] = pair_one(
                    i, j, x, y, ptx, freq, alpha, model, ht, hr,
                    fam, p1, p2, scale, main_db, side_db, orient,
                )
        return out

    @njit(cache=True)
    def matrix(
        x, y, ptx, freq, alpha, model, ht, hr,
        fam, p1, p2, scale, main_db, side_db, orient,
    ):
        n = x.shape[0]
        out = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                if j == i:
                    out[i, j] = _NEG_INF
                else:
                    out[i, j] = pair_one(
                        i, j, x, y, ptx, freq, alpha, model, ht, hr,
                        fam, p1, p2, scale, main_db, side_db, orient,
                    )
        return out

    def _args(a: RadioArrays) -> tuple:
        return (
            a.x, a.y, a.ptx_dbm, a.freq_hz, a.alpha, a.pl_model, a.ht_m, a.hr_m,
            a.fam, a.p1, a.p2, a.scale, a.main_db, a.side_db, a.orient_deg,
        )

    return KernelSet(
        name="numba",
        pair_power_row=lambda a, i: power_row(i, *_args(a)),
        pair_power_subset=lambda a, i, idx: power_subset(i, np.asarray(idx, dtype=np.int64), *_args(a)),
        delivery_matrix=lambda a: matrix(*_args(a)),
    )


def _select_backend() -> tuple[KernelSet, KernelSet | None]:
    requested = os.environ.get("DIRSIM_BACKEND", "auto").strip().lower() or "auto"
    if requested not in {"auto", "numba", "numpy"}:
        raise ValueError(f"DIRSIM_BACKEND must be auto, numba, or numpy, got {requested!r}")
    numba_set: KernelSet | None = None
    if requested != "numpy":
        try:
            numba_set = _build_numba_kernels()
        except ImportError:
            if requested == "numba":
                raise
    active = numba_set if numba_set is not None else NUMPY_KERNELS
    return active, numba_set


ACTIVE, NUMBA_KERNELS = _select_backend()
BACKEND = ACTIVE.name


def available_kernel_sets() -> list[KernelSet]:
    """Every importable backend, active one first."""
    sets = [ACTIVE]
    if ACTIVE is not NUMPY_KERNELS:
        sets.append(NUMPY_KERNELS)
    return sets


def pair_power_row(a: RadioArrays, i: int) -> np.ndarray:
    """Receive power in dBm from transmitter ``i`` at every other radio."""
    return ACTIVE.pair_power_row(a, i)


def pair_power_subset(a: RadioArrays, i: int, idx: np.ndarray) -> np.ndarray:
    """Receive power in dBm from ``i`` at the radios listed in ``idx``."""
    return ACTIVE.pair_power_subset(a, i, idx)


def delivery_matrix(a: RadioArrays) -> np.ndarray:
    """Full transmitter-by-receiver receive power matrix in dBm."""
    return ACTIVE.delivery_matrix(a)

"""Discrete-event simulator for wireless networks with directional radios.

The package models asymmetric links: each direction of a pair is
budgeted separately from the transmitter's power, both antennas' gains
toward each other, and a path loss model, so A hearing B says nothing
about B hearing A. Neighbor bookkeeping under mobility is pluggable
with three procedures of increasing sophistication, and a small event
engine with a carrier-sense MAC sits on top for scenario work.
"""

from .antenna import (
    CardioidPattern,
    CircularPattern,
    DirectionalAntenna,
    FoliumPattern,
    OmniAntenna,
    RosePattern,
    make_family,
    natural_width_deg,
)
from .config import ConfigDocument, ConfigError, parse_config, parse_config_file, serialize_config
from .kernels import RadioArrays, available_kernel_sets
from .neighbors import (
    BruteForceProcedure,
    NeighborsGraph,
    NeighborsGraphProcedure,
    SymmetricRangeProcedure,
    coverage_set,
    make_procedure,
)
from .propagation import (
    PathLossModel,
    RadioConfig,
    free_space_path_loss_db,
    link_budget_dbm,
    received_power_dbm,
    two_ray_crossover_m,
    two_ray_path_loss_db,
)
from .sim import Channel, CsmaMac, Engine, EventKind, Frame, MacParams, make_rng
from .units import Position, bearing_deg, dbm_to_mw, distance_m, mw_to_dbm

__all__ = [
    "BruteForceProcedure",
    "CardioidPattern",
    "Channel",
    "CircularPattern",
    "ConfigDocument",
    "ConfigError",
    "CsmaMac",
    "DirectionalAntenna",
    "Engine",
    "EventKind",
    "FoliumPattern",
    "Frame",
    "MacParams",
    "NeighborsGraph",
    "NeighborsGraphProcedure",
    "OmniAntenna",
    "PathLossModel",
    "Position",
    "RadioArrays",
    "RadioConfig",
    "RosePattern",
    "SymmetricRangeProcedure",
    "available_kernel_sets",
    "bearing_deg",
    "coverage_set",
    "dbm_to_mw",
    "distance_m",
    "free_space_path_loss_db",
    "link_budget_dbm",
    "make_family",
    "make_procedure",
    "make_rng",
    "mw_to_dbm",
    "natural_width_deg",
    "parse_config",
    "parse_config_file",
    "received_power_dbm",
    "serialize_config",
    "two_ray_crossover_m",
    "two_ray_path_loss_db",
]

__version__ = "0.1.0"

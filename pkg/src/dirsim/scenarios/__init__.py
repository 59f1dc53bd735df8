"""Reference scenarios and their CSV emitters.

Each scenario resolves its config (filling every default explicitly),
echoes the resolved document as ``#``-prefixed header lines in its CSV
output, runs the simulation, and returns a summary dict for callers
that want numbers instead of files.
"""

from __future__ import annotations

import os

from ..antenna import DirectionalAntenna, OmniAntenna, make_family
from ..config import ConfigDocument, serialize_config
from ..propagation import PathLossModel, RadioConfig
from ..units import mw_to_dbm


class ScenarioError(RuntimeError):
    """Scenario-level failure (bad roster, impossible geometry)."""


def antenna_from(doc: ConfigDocument, prefix: str):
    """Build an antenna from ``{prefix}.antennaType`` and friends."""
    kind = doc.text(f"{prefix}.antennaType", "OmniAntenna")
    if kind == "OmniAntenna":
        return OmniAntenna()
    if kind != "DirectionalAntenna":
        raise ScenarioError(f"{prefix}.antennaType: unknown antenna {kind!r}")
    pattern = doc.text(f"{prefix}.patternType", "")
    if not pattern:
        raise ScenarioError(f"{prefix}.patternType required for a directional antenna")
    params = {}
    for name in ("a", "b", "k", "r"):
        key = f"{prefix}.{pattern}.{name}"
        if key in doc:
            params[name] = doc.number(key)
    try:
        family = make_family(pattern, **params)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{prefix}: {exc}") from exc
    return DirectionalAntenna(
        family=family,
        beam_width_deg=doc.number(f"{prefix}.beamWidth"),
        main_lobe_gain_db=doc.number(f"{prefix}.mainLobeGain"),
        side_lobe_gain_db=doc.number(f"{prefix}.sideLobeGain"),
        orientation_deg=doc.number(f"{prefix}.mainLobeOrientation", 0.0),
        threshold_db=doc.number(f"{prefix}.dBThreshold", 3.0),
    )


def radio_from(doc: ConfigDocument, radio_prefix: str, antenna_prefix: str) -> RadioConfig:
    """Build a radio config; power-dimension keys arrive in mW."""
    model_name = doc.text(f"{radio_prefix}.pathLossModel", "freeSpace")
    try:
        model = PathLossModel(model_name)
    except ValueError:
        raise ScenarioError(
            f"{radio_prefix}.pathLossModel: unknown model {model_name!r}"
        ) from None
    return RadioConfig(
        transmitter_power_mw=doc.number(f"{radio_prefix}.transmitterPower"),
        carrier_frequency_hz=doc.number(f"{radio_prefix}.carrierFrequency"),
        antenna=antenna_from(doc, antenna_prefix),
        sensitivity_dbm=mw_to_dbm(doc.number(f"{radio_prefix}.sensitivity")),
        detection_threshold_dbm=mw_to_dbm(doc.number(f"{radio_prefix}.detectionThreshold")),
        snir_threshold_db=doc.number(f"{radio_prefix}.snirThreshold"),
        path_loss_alpha=doc.number(f"{radio_prefix}.pathLossAlpha"),
        path_loss_model=model,
        antenna_height_tx_m=doc.number(f"{radio_prefix}.antennaHeightTx", 1.0),
        antenna_height_rx_m=doc.number(f"{radio_prefix}.antennaHeightRx", 1.0),
    )


def config_header_lines(doc: ConfigDocument) -> list[str]:
    return [f"# {line}" for line in serialize_config(doc).splitlines()]


def write_csv(
    path: str,
    header_lines: list[str],
    columns: str,
    rows: list[str],
) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(columns + "\n")
        for row in rows:
            fh.write(row + "\n")

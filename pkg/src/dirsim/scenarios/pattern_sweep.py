"""Gain-pattern sweep: orbiting probes sample a directional beacon.

A stationary access point at the playground centre broadcasts a short
beacon every ``beaconInterval``.  Ten omnidirectional probe hosts orbit
the access point on concentric rings, one full revolution over the run,
so each beacon samples the transmit pattern at a fresh angle.  Every
reception is logged with the orbit angle at transmit time, giving one
received-power row per (angle, ring).

The scenario draws no random numbers; repeated runs produce identical
output byte for byte.
"""

from __future__ import annotations

import os

from ..config import ConfigDocument
from ..mobility import CircularOrbitPath
from ..sim import Channel, Engine, EventKind, Frame
from ..units import Position
from . import config_header_lines, radio_from, write_csv

COLUMNS = "angle_deg,radius_m,prx_dbm,received"

_DEFAULTS = [
    ("playgroundWidth", 400.0),
    ("playgroundHeight", 400.0),
    ("duration", 36.0),
    ("beaconInterval", 0.1),
    ("beaconBits", 100),
    ("bitrate", 1.0e6),
    ("orbits", 10),
    ("orbitBaseRadius", 10.0),
    ("ap.transmitterPower", 40.0),
    ("ap.carrierFrequency", 2.4e9),
    ("ap.sensitivity", 10.0 ** (-85.0 / 10.0)),
    ("ap.detectionThreshold", 10.0 ** (-110.0 / 10.0)),
    ("ap.snirThreshold", 4.0),
    ("ap.pathLossAlpha", 2.0),
    ("ap.pathLossModel", "freeSpace"),
    ("ap.antenna.antennaType", "DirectionalAntenna"),
    ("ap.antenna.patternType", "FoliumPattern"),
    ("ap.antenna.FoliumPattern.a", 1.0),
    ("ap.antenna.FoliumPattern.b", 3.0),
    ("ap.antenna.beamWidth", 40.0),
    ("ap.antenna.mainLobeGain", 15.0),
    ("ap.antenna.sideLobeGain", -5.0),
    ("ap.antenna.mainLobeOrientation", 90.0),
    ("ap.antenna.dBThreshold", 3.0),
    ("host.transmitterPower", 1.0),
    ("host.carrierFrequency", 2.4e9),
    ("host.sensitivity", 10.0 ** (-85.0 / 10.0)),
    ("host.detectionThreshold", 10.0 ** (-110.0 / 10.0)),
    ("host.snirThreshold", 4.0),
    ("host.pathLossAlpha", 2.0),
    ("host.pathLossModel", "freeSpace"),
    ("host.antenna.antennaType", "OmniAntenna"),
]


def resolve_config(doc: ConfigDocument) -> ConfigDocument:
    resolved = doc.copy()
    for key, value in _DEFAULTS:
        resolved.setdefault(key, value)
    return resolved


def run_pattern_sweep(
    doc: ConfigDocument,
    out_dir: str | None = None,
    trace: list[str] | None = None,
) -> dict:
    doc = resolve_config(doc)
    duration = doc.number("duration")
    interval = doc.number("beaconInterval")
    bits = doc.integer("beaconBits")
    bitrate = doc.number("bitrate")
    orbits = doc.integer("orbits")
    base_radius = doc.number("orbitBaseRadius")
    center = Position(doc.number("playgroundWidth") / 2.0,
                      doc.number("playgroundHeight") / 2.0)

    engine = Engine(trace=trace)
    channel = Channel(engine, procedure=3)

    ap_config = radio_from(doc, "ap", "ap.antenna")
    host_config = radio_from(doc, "host", "host.antenna")

    ap = channel.register(ap_config, center)
    paths: dict[int, CircularOrbitPath] = {}
    radius_of: dict[int, float] = {}
    for k in range(1, orbits + 1):
        path = CircularOrbitPath(center, radius_m=k * base_radius,
                                 period_s=duration, phase_deg=0.0)
        host = channel.register(host_config, path.position_at(0.0))
        paths[host] = path
        radius_of[host] = k * base_radius
    channel.finalize()

    beacon_angle: dict[int, float] = {}
    rows: list[tuple[float, float, float, int]] = []

    def on_rx_end(j: int, frame: Frame, p_dbm: float, outcome: str, _snir: float) -> None:
        rows.append((beacon_angle[frame.frame_id], radius_of[j], p_dbm,
                     1 if outcome == "received" else 0))

    channel.rx_end_hook = on_rx_end

    def make_move(host: int, t: float):
        def _move() -> str:
            channel.move(host, paths[host].position_at(t))
            return f"host={host}"
        return _move

    def make_beacon(angle: float):
        def _beacon() -> str:
            frame = Frame(channel.next_frame_id(), "data", ap, None, bits, bitrate)
            beacon_angle[frame.frame_id] = angle
            channel.transmit(ap, frame)
            return f"angle={angle!r}"
        return _beacon

    n_beacons = int(round(duration / interval))
    # Same-timestamp ordering: hosts step onto the new angle before the
    # beacon for that angle leaves the antenna.
    for i in range(n_beacons):
        t = i * interval
        angle = (360.0 * t / duration) % 360.0
        for host in paths:
            engine.at(t, EventKind.MOVE, host, make_move(host, t))
        engine.at(t, EventKind.TIMER, ap, make_beacon(angle))

    engine.run(until=duration)

    csv_path = None
    if out_dir is not None:
        csv_path = os.path.join(out_dir, "pattern.csv")
        write_csv(
            csv_path,
            config_header_lines(doc),
            COLUMNS,
            [f"{angle!r},{radius!r},{prx!r},{received}"
             for angle, radius, prx, received in rows],
        )
    return {"doc": doc, "rows": rows, "csv_path": csv_path}

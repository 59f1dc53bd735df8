"""Neighbor-maintenance timing on a mobile roster.

A square playground holds four stationary access points on a 2x2 grid
and a crowd of random-waypoint hosts.  Every host steps once per
mobility tick and fires a short unacknowledged probe at its nearest
access point once per probe interval, so each repetition exercises the
neighbor procedure with an even mix of position updates and delivery
consultations.  The wall time spent inside the procedure is reported
separately from the repetition's total wall time.

All radios share one omnidirectional config; the mirrored-update
procedure requires that homogeneity, and keeping it lets the same
roster time all three procedures.
"""

from __future__ import annotations

import multiprocessing
import os
import time

from ..config import ConfigDocument, parse_config, serialize_config
from ..mobility import RandomWaypointPath
from ..sim import MOBILITY_STREAM, Channel, Engine, EventKind, Frame, make_rng
from ..units import Position, distance_m
from . import ScenarioError, config_header_lines, radio_from, write_csv

COLUMNS = "procedure,repetition,neighbor_wall_ms,total_wall_ms"

_DEFAULTS = [
    ("playgroundWidth", 1000.0),
    ("playgroundHeight", 1000.0),
    ("hosts", 100),
    ("duration", 500.0),
    ("repeats", 10),
    ("mobilityTick", 5.0),
    ("probeInterval", 5.0),
    ("probeBits", 100),
    ("bitrate", 1.0e6),
    ("speedMin", 1.0),
    ("speedMax", 40.0 / 3.6),
    ("pauseTime", 0.0),
    ("radio.transmitterPower", 0.46),
    ("radio.carrierFrequency", 2.4e9),
    ("radio.sensitivity", 10.0 ** (-85.0 / 10.0)),
    ("radio.detectionThreshold", 10.0 ** (-85.0 / 10.0)),
    ("radio.snirThreshold", 4.0),
    ("radio.pathLossAlpha", 2.0),
    ("radio.pathLossModel", "freeSpace"),
    ("radio.antenna.antennaType", "OmniAntenna"),
]


def resolve_config(doc: ConfigDocument) -> ConfigDocument:
    resolved = doc.copy()
    for key, value in _DEFAULTS:
        resolved.setdefault(key, value)
    return resolved


def _ap_positions(width: float, height: float) -> list[Position]:
    return [
        Position(width * 0.25, height * 0.25),
        Position(width * 0.75, height * 0.25),
        Position(width * 0.25, height * 0.75),
        Position(width * 0.75, height * 0.75),
    ]


def run_repetition(doc: ConfigDocument, procedure: int, seed: int) -> dict:
    """One timed repetition; returns wall times and event counts."""
    width = doc.number("playgroundWidth")
    height = doc.number("playgroundHeight")
    hosts = doc.integer("hosts")
    duration = doc.number("duration")
    tick = doc.number("mobilityTick")
    probe_interval = doc.number("probeInterval")
    probe_bits = doc.integer("probeBits")
    bitrate = doc.number("bitrate")
    if hosts < 1:
        raise ScenarioError("hosts must be >= 1")

    t_start = time.perf_counter_ns()
    engine = Engine()
    channel = Channel(engine, procedure=procedure)
    config = radio_from(doc, "radio", "radio.antenna")

    aps = [channel.register(config, pos) for pos in _ap_positions(width, height)]
    paths: dict[int, RandomWaypointPath] = {}
    for _ in range(hosts):
        radio = len(channel)
        path = RandomWaypointPath(
            make_rng(seed, MOBILITY_STREAM, radio),
            0.0, width, 0.0, height,
            doc.number("speedMin"), doc.number("speedMax"),
            pause_s=doc.number("pauseTime"),
        )
        paths[channel.register(config, path.position_at(0.0))] = path
    channel.finalize()

    moves = 0
    transmits = 0

    def make_move(host: int, t: float):
        def _move() -> str:
            nonlocal moves
            moves += 1
            channel.move(host, paths[host].position_at(t))
            return f"host={host}"
        return _move

    def make_probe(host: int):
        def _probe() -> str:
            nonlocal transmits
            transmits += 1
            pos = channel.position_of(host)
            ap = min(aps, key=lambda a: distance_m(pos, channel.position_of(a)))
            frame = Frame(channel.next_frame_id(), "data", host, ap,
                          probe_bits, bitrate)
            channel.transmit(host, frame)
            return f"host={host} ap={ap}"
        return _probe

    n_ticks = int(duration / tick)
    n_probes = int(duration / probe_interval)
    stagger = probe_interval / hosts
    for host in paths:
        for k in range(1, n_ticks + 1):
            engine.at(k * tick, EventKind.MOVE, host, make_move(host, k * tick))
        offset = (host - len(aps) + 0.5) * stagger
        for k in range(n_probes):
            engine.at(k * probe_interval + offset, EventKind.TIMER, host,
                      make_probe(host))

    engine.run(until=duration)
    total_ns = time.perf_counter_ns() - t_start

    proc = channel.procedure
    assert proc is not None
    result = {
        "neighbor_wall_ms": proc.neighbor_time_ns / 1e6,
        "total_wall_ms": total_ns / 1e6,
        "moves": moves,
        "transmits": transmits,
    }
    if hasattr(proc, "recompute_count"):
        result["recompute_count"] = proc.recompute_count
    return result


def _warmup(procedure: int) -> None:
    """Compile the numeric kernels so the first timed rep pays no JIT."""
    import numpy as np

    from .. import kernels

    doc = resolve_config(ConfigDocument())
    config = radio_from(doc, "radio", "radio.antenna")
    arrays = kernels.RadioArrays.from_radios(
        [(config, Position(float(i), 0.0)) for i in range(3)]
    )
    kernels.delivery_matrix(arrays)
    kernels.pair_power_row(arrays, 0)
    kernels.pair_power_subset(arrays, 0, np.array([1, 2], dtype=np.int64))
    doc.set("hosts", 2)
    doc.set("duration", 2.0)
    doc.set("mobilityTick", 0.5)
    doc.set("probeInterval", 0.5)
    run_repetition(doc, procedure, seed=0)


def _bench_worker(args: tuple[str, int, int, int]) -> tuple[int, int, float, float]:
    config_text, procedure, rep, seed = args
    doc = resolve_config(parse_config(config_text))
    out = run_repetition(doc, procedure, seed + rep)
    return (procedure, rep, out["neighbor_wall_ms"], out["total_wall_ms"])


def run_bench(
    doc: ConfigDocument,
    procedure: int,
    hosts: int | None = None,
    repeats: int | None = None,
    seed: int = 0,
    out_dir: str | None = None,
    parallel: bool = False,
) -> dict:
    doc = resolve_config(doc)
    if hosts is not None:
        doc.set("hosts", hosts)
    if repeats is not None:
        doc.set("repeats", repeats)
    n_repeats = doc.integer("repeats")
    if n_repeats < 0:
        raise ScenarioError("repeats must be >= 0")

    rows: list[tuple[int, int, float, float]] = []
    reps_meta: list[dict] = []
    if n_repeats:
        _warmup(procedure)
        if parallel:
            args = [(serialize_config(doc), procedure, rep, seed)
                    for rep in range(n_repeats)]
            with multiprocessing.Pool() as pool:
                rows = pool.map(_bench_worker, args)
        else:
            for rep in range(n_repeats):
                out = run_repetition(doc, procedure, seed + rep)
                reps_meta.append(out)
                rows.append((procedure, rep,
                             out["neighbor_wall_ms"], out["total_wall_ms"]))

    csv_path = None
    if out_dir is not None:
        csv_path = os.path.join(out_dir, "bench.csv")
        write_csv(
            csv_path,
            config_header_lines(doc),
            COLUMNS,
            [f"{p},{r},{n:.3f},{t:.3f}" for p, r, n, t in rows],
        )
    return {"doc": doc, "rows": rows, "reps": reps_meta, "csv_path": csv_path}

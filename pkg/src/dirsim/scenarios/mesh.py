"""Relay chain: one client streams packets to another over bridged radios.

``relays`` dual-radio nodes sit on a straight line at ``spacing``
metre intervals between two single-radio clients.  Each relay bridges
its west-facing radio to its east-facing one: data received on the
left radio is queued on the right radio for the next hop.  client1
offers a saturating stream of fixed-size packets; every hop runs
listen-before-talk with stop-and-wait acknowledgements on one shared
channel.

Two antenna modes cover the same geometry.  ``omni`` gives every radio
an omnidirectional antenna that reaches only the adjacent node, so
senders two positions apart cannot hear each other and collide at the
radio between them.  ``directional`` points every antenna along the
chain with enough gain that a main lobe reaches five positions ahead;
carrier sensing then covers the whole interference span, while radios
deep in the chain pick up (and fail to capture) traffic from far-away
antennas pointed at them.

``relays = 0`` degenerates to the two clients one spacing apart, which
serves as the single-hop throughput baseline.
"""

from __future__ import annotations

import dataclasses
import os

from ..config import ConfigDocument
from ..sim import MAC_STREAM, Channel, CsmaMac, Engine, EventKind, MacParams, make_rng
from ..units import Position
from . import ScenarioError, config_header_lines, radio_from, write_csv

COLUMNS = "radio_id,sent,received,collisions,losses"

MODES = ("omni", "directional")

_DEFAULTS = [
    ("spacing", 100.0),
    ("relays", 10),
    ("duration", 4.0),
    ("packetInterval", 0.001),
    ("windowPackets", 0),
    ("reverseWindowPackets", 0),
    ("reverseBits", 1000),
    ("packetBits", 1000),
    ("bitrate", 1.0e6),
    ("ackBits", 112),
    ("slotTime", 20.0e-6),
    ("sifs", 10.0e-6),
    ("difs", 50.0e-6),
    ("cwMin", 16),
    ("cwMax", 1024),
    ("maxRetries", 7),
    ("omni.transmitterPower", 1.0),
    ("omni.carrierFrequency", 2.4e9),
    ("omni.sensitivity", 10.0 ** (-85.0 / 10.0)),
    ("omni.detectionThreshold", 10.0 ** (-85.0 / 10.0)),
    ("omni.snirThreshold", 4.0),
    ("omni.pathLossAlpha", 2.0),
    ("omni.pathLossModel", "freeSpace"),
    ("omni.antenna.antennaType", "OmniAntenna"),
    ("directional.transmitterPower", 0.01),
    ("directional.carrierFrequency", 2.4e9),
    ("directional.sensitivity", 10.0 ** (-85.0 / 10.0)),
    ("directional.detectionThreshold", 10.0 ** (-85.0 / 10.0)),
    ("directional.snirThreshold", 4.0),
    ("directional.pathLossAlpha", 2.0),
    ("directional.pathLossModel", "freeSpace"),
    ("directional.antenna.antennaType", "DirectionalAntenna"),
    ("directional.antenna.patternType", "FoliumPattern"),
    ("directional.antenna.FoliumPattern.a", 1.0),
    ("directional.antenna.FoliumPattern.b", 3.0),
    ("directional.antenna.beamWidth", 40.0),
    ("directional.antenna.mainLobeGain", 15.0),
    ("directional.antenna.sideLobeGain", -5.0),
    ("directional.antenna.mainLobeOrientation", 0.0),
    ("directional.antenna.dBThreshold", 3.0),
]

EAST = 0.0
WEST = 180.0


def resolve_config(doc: ConfigDocument) -> ConfigDocument:
    resolved = doc.copy()
    for key, value in _DEFAULTS:
        resolved.setdefault(key, value)
    return resolved


def _oriented(config, orientation_deg: float):
    """Point a radio's antenna along the chain; omni antennas pass through."""
    antenna = config.antenna
    if not hasattr(antenna, "orientation_deg"):
        return config
    return dataclasses.replace(
        config, antenna=dataclasses.replace(antenna, orientation_deg=orientation_deg)
    )


def run_mesh(
    doc: ConfigDocument,
    mode: str,
    seed: int,
    out_dir: str | None = None,
    trace: list[str] | None = None,
) -> dict:
    if mode not in MODES:
        raise ScenarioError(f"mode must be one of {MODES}, got {mode!r}")
    doc = resolve_config(doc)
    relays = doc.integer("relays")
    if relays < 0:
        raise ScenarioError("relays must be >= 0")
    spacing = doc.number("spacing")
    duration = doc.number("duration")
    interval = doc.number("packetInterval")
    bits = doc.integer("packetBits")

    engine = Engine(trace=trace)
    channel = Channel(engine, procedure=3)
    base = radio_from(doc, mode, f"{mode}.antenna")

    client1 = channel.register(_oriented(base, EAST), Position(0.0, 0.0), node="c1")
    left: list[int] = []
    right: list[int] = []
    for k in range(1, relays + 1):
        pos = Position(k * spacing, 0.0)
        left.append(channel.register(_oriented(base, WEST), pos, node=k))
        right.append(channel.register(_oriented(base, EAST), pos, node=k))
    client2 = channel.register(
        _oriented(base, WEST), Position((relays + 1) * spacing, 0.0), node="c2"
    )
    channel.finalize()

    params = MacParams(
        bitrate_bps=doc.number("bitrate"),
        slot_s=doc.number("slotTime"),
        sifs_s=doc.number("sifs"),
        difs_s=doc.number("difs"),
        cw_min=doc.integer("cwMin"),
        cw_max=doc.integer("cwMax"),
        max_retries=doc.integer("maxRetries"),
        ack_bits=doc.integer("ackBits"),
    )
    macs = {
        radio: CsmaMac(channel, radio, params, make_rng(seed, MAC_STREAM, radio))
        for radio in range(len(channel))
    }

    # Bridge each relay: data landing on the left radio re-enters the
    # queue of the right radio, addressed one hop further east, and
    # vice versa. A radio only ever receives one direction's stream,
    # so no demultiplexing is needed.
    def make_bridge(relay_index: int, eastbound: bool):
        if eastbound:
            sender = macs[right[relay_index]]
            next_dst = left[relay_index + 1] if relay_index + 1 < relays else client2
            frame_bits = bits
        else:
            sender = macs[left[relay_index]]
            next_dst = right[relay_index - 1] if relay_index > 0 else client1
            frame_bits = reverse_bits

        def _bridge(frame) -> None:
            sender.send(next_dst, frame_bits, payload=frame.payload)

        return _bridge

    reverse_bits = doc.integer("reverseBits")
    for k in range(relays):
        macs[left[k]].rx_handler = make_bridge(k, eastbound=True)
        macs[right[k]].rx_handler = make_bridge(k, eastbound=False)

    first_hop = left[0] if relays else client2
    source = macs[client1]
    delivered: set[object] = set()
    window = doc.integer("windowPackets")
    next_id = 0

    def offer_one() -> None:
        nonlocal next_id
        source.send(first_hop, bits, payload=next_id)
        next_id += 1

    if window > 0:
        # Delivery-clocked stream: keep `window` packets in flight, the
        # way a transport with flow control would pace the source.
        def on_delivery(frame) -> None:
            delivered.add(frame.payload)
            offer_one()

        macs[client2].rx_handler = on_delivery
        for _ in range(window):
            offer_one()
    else:
        macs[client2].rx_handler = lambda frame: delivered.add(frame.payload)

        def make_offer(packet_id: int):
            def _offer() -> str:
                offer_one()
                return f"packet={packet_id}"
            return _offer

        for i in range(int(duration / interval)):
            engine.at(i * interval, EventKind.TIMER, client1, make_offer(i))

    # Optional westward stream standing in for transport-level
    # acknowledgement traffic, always delivery-clocked.
    reverse_window = doc.integer("reverseWindowPackets")
    delivered_reverse: set[object] = set()
    if reverse_window > 0:
        reverse_source = macs[client2]
        reverse_first_hop = right[-1] if relays else client1
        next_reverse_id = 0

        def offer_reverse() -> None:
            nonlocal next_reverse_id
            reverse_source.send(reverse_first_hop, reverse_bits,
                                payload=next_reverse_id)
            next_reverse_id += 1

        def on_reverse_delivery(frame) -> None:
            delivered_reverse.add(frame.payload)
            offer_reverse()

        macs[client1].rx_handler = on_reverse_delivery
        for _ in range(reverse_window):
            offer_reverse()

    engine.run(until=duration)

    throughput_bps = len(delivered) * bits / duration
    counters = channel.counters
    rows = [
        (radio, c.mac_data_sent, c.mac_data_delivered, c.lost_collision, c.mac_data_dropped)
        for radio, c in enumerate(counters)
    ]
    relay_collisions = [
        counters[left[k]].lost_collision + counters[right[k]].lost_collision
        for k in range(relays)
    ]
    total_losses = sum(c.mac_data_dropped for c in counters)

    csv_path = None
    if out_dir is not None:
        csv_path = os.path.join(out_dir, "mesh.csv")
        lines = [",".join(str(v) for v in row) for row in rows]
        lines.append(f"throughput_bps,{throughput_bps!r},,,")
        write_csv(csv_path, config_header_lines(doc), COLUMNS, lines)

    return {
        "doc": doc,
        "mode": mode,
        "seed": seed,
        "rows": rows,
        "counters": counters,
        "relay_collisions": relay_collisions,
        "total_losses": total_losses,
        "delivered": len(delivered),
        "delivered_reverse": len(delivered_reverse),
        "throughput_bps": throughput_bps,
        "csv_path": csv_path,
    }

"""Discrete-event radio simulation.

``Engine`` runs a time-ordered event heap with a stable tiebreak, so a
scenario plus a seed reproduces the exact same event order and trace
bytes. ``Channel`` owns the radio roster, the delivery-set procedure,
and per-receiver interference bookkeeping. ``CsmaMac`` layers listen
-before-talk access with binary exponential backoff and stop-and-wait
acknowledgements on top.

Reception model: a frame reaches every radio in the transmitter's
delivery set with the power computed at transmit start, and is
classified when it ends. Power below the receiver's sensitivity is a
below-sensitivity loss (frames under the receiver's detection
threshold additionally contribute no interference). A receiver that
transmitted during the frame loses it to collision, as does a frame
whose worst-segment signal-to-interference-and-noise ratio falls under
the receiver's threshold. The noise floor in that ratio is the
receiver's detection threshold expressed in milliwatts. Propagation
delay is not modeled.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import kernels
from .kernels import KernelSet, RadioArrays
from .neighbors import NeighborProcedure, make_procedure
from .propagation import RadioConfig, max_interference_distance_m
from .units import Position, dbm_to_mw

MOBILITY_STREAM = 1
MAC_STREAM = 2


def make_rng(seed: int, stream: int, radio: int) -> np.random.Generator:
    """Independent per-radio generator for one purpose stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, radio])))


class EventKind(str, Enum):
    MOVE = "MOVE"
    TX_START = "TX_START"
    TX_END = "TX_END"
    RX_START = "RX_START"
    RX_END = "RX_END"
    TIMER = "TIMER"


class Token:
    """Handle for a scheduled event; cancellation is a lazy flag."""

    __slots__ = ("time", "seq", "kind", "radio", "handler", "cancelled")

    def __init__(self, time: float, seq: int, kind: EventKind, radio: int | None, handler):
        self.time = time
        self.seq = seq
        self.kind = kind
        self.radio = radio
        self.handler = handler
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    def __lt__(self, other: "Token") -> bool:
        return (self.time, self.seq) < (other.time, other.seq)


class Engine:
    """Event heap ordered by (time, insertion sequence).

    Handlers return an optional field string; the trace line for an
    event is appended after its handler ran, so recorded fields reflect
    outcomes. Pass ``trace`` as a list to collect lines.
    """

    def __init__(self, trace: list[str] | None = None) -> None:
        self.now = 0.0
        self.trace = trace
        self._heap: list[Token] = []
        self._seq = 0

    def at(
        self,
        time: float,
        kind: EventKind,
        radio: int | None,
        handler: Callable[[], str | None],
    ) -> Token:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time} before now {self.now}")
        token = Token(time, self._seq, kind, radio, handler)
        self._seq += 1
        heapq.heappush(self._heap, token)
        return token

    def log(self, kind: EventKind, radio: int | None, fields: str | None) -> None:
        if self.trace is not None:
            who = "-" if radio is None else str(radio)
            self.trace.append(f"{self.now!r}\t{kind.value}\t{who}\t{fields or ''}")

    def run(self, until: float) -> None:
        while self._heap and self._heap[0].time <= until:
            token = heapq.heappop(self._heap)
            if token.cancelled:
                continue
            self.now = token.time
            fields = token.handler()
            self.log(token.kind, token.radio, fields)
        self.now = until


@dataclass(frozen=True)
class Frame:
    frame_id: int
    kind: str  # "data" or "ack"
    src: int
    dst: int | None  # None broadcasts
    bits: int
    bitrate_bps: float
    payload: object = None

    def __post_init__(self) -> None:
        if self.bits <= 0 or self.bitrate_bps <= 0.0:
            raise ValueError("frame bits and bitrate must be positive")

    @property
    def duration_s(self) -> float:
        return self.bits / self.bitrate_bps


@dataclass
class RadioCounters:
    arrivals: int = 0
    received: int = 0
    lost_collision: int = 0
    lost_below_sensitivity: int = 0
    frames_sent: int = 0
    mac_data_sent: int = 0
    mac_data_acked: int = 0
    mac_data_dropped: int = 0
    mac_data_delivered: int = 0
    mac_retries: int = 0


def classify_reception(
    p_dbm: float,
    sensitivity_dbm: float,
    snir_threshold_db: float,
    poisoned: bool,
    min_snir_db: float,
) -> str:
    """Outcome of one finished frame: received, collision, or below."""
    if p_dbm < sensitivity_dbm:
        return "below"
    if poisoned or min_snir_db < snir_threshold_db:
        return "collision"
    return "received"


class _Pending:
    __slots__ = ("frame", "p_dbm", "p_mw", "poisoned", "min_snir_db", "hearable")

    def __init__(self, frame: Frame, p_dbm: float, poisoned: bool, hearable: bool):
        self.frame = frame
        self.p_dbm = p_dbm
        self.p_mw = dbm_to_mw(p_dbm)
        self.poisoned = poisoned
        self.min_snir_db = math.inf
        self.hearable = hearable


class _RadioState:
    __slots__ = (
        "config", "position", "node", "tx_active",
        "pending", "on_air_mw", "last_fold_t", "noise_mw",
    )

    def __init__(self, config: RadioConfig, position: Position, node: object):
        self.config = config
        self.position = position
        self.node = node
        self.tx_active = False
        self.pending: dict[int, _Pending] = {}
        self.on_air_mw: dict[int, float] = {}
        self.last_fold_t = 0.0
        self.noise_mw = dbm_to_mw(config.detection_threshold_dbm)


class Channel:
    """Radio roster, delivery sets, and interference accounting.

    Register every radio, then ``finalize`` before simulating; ranges
    and the neighbor structure are fixed from the roster, so late
    registration is rejected. Radios sharing a ``node`` also share
    carrier sense and medium-idle notifications.
    """

    def __init__(
        self,
        engine: Engine,
        procedure: int = 3,
        kernel_set: KernelSet | None = None,
    ) -> None:
        self.engine = engine
        self._procedure_number = procedure
        self._kernel_set = kernel_set or kernels.ACTIVE
        self._registry: list[tuple[RadioConfig, Position, object]] = []
        self._radios: list[_RadioState] = []
        self.counters: list[RadioCounters] = []
        self.arrays: RadioArrays | None = None
        self.procedure: NeighborProcedure | None = None
        self.max_range_m: np.ndarray | None = None
        self._node_members: dict[object, list[int]] = {}
        self._rx_callbacks: dict[int, Callable[[int, Frame], None]] = {}
        self._idle_callbacks: dict[object, list[Callable[[], None]]] = {}
        self._air_seq = 0
        self._frame_seq = 0
        # Called as (receiver, frame, prx_dbm, outcome, min_snir_db) when
        # any arrival finishes; scenario loggers hang off this.
        self.rx_end_hook: Callable[[int, Frame, float, str, float], None] | None = None

    # -- setup ------------------------------------------------------------

    def register(self, config: RadioConfig, position: Position, node: object = None) -> int:
        if self.arrays is not None:
            raise RuntimeError("roster is finalized; register before finalize()")
        radio_id = len(self._registry)
        self._registry.append((config, position, node if node is not None else radio_id))
        return radio_id

    def finalize(self) -> None:
        if self.arrays is not None:
            raise RuntimeError("already finalized")
        if not self._registry:
            raise RuntimeError("no radios registered")
        g_sys = max(cfg.antenna.max_gain_db for cfg, _, _ in self._registry)
        self.system_max_rx_gain_db = g_sys
        self.max_range_m = np.array(
            [max_interference_distance_m(cfg, g_sys) for cfg, _, _ in self._registry]
        )
        self.arrays = RadioArrays.from_radios([(c, p) for c, p, _ in self._registry])
        for cfg, pos, node in self._registry:
            self._radios.append(_RadioState(cfg, pos, node))
            self.counters.append(RadioCounters())
            self._node_members.setdefault(node, []).append(len(self._radios) - 1)
        self.procedure = make_procedure(
            self._procedure_number, self.arrays, self.max_range_m, self._kernel_set
        )
        self.procedure.build()

    def __len__(self) -> int:
        return len(self._registry)

    def next_frame_id(self) -> int:
        self._frame_seq += 1
        return self._frame_seq

    def set_receive_callback(self, radio: int, fn: Callable[[int, Frame], None]) -> None:
        self._rx_callbacks[radio] = fn

    def add_idle_listener(self, radio: int, fn: Callable[[], None]) -> None:
        node = self._radios[radio].node
        self._idle_callbacks.setdefault(node, []).append(fn)

    def position_of(self, radio: int) -> Position:
        return self._radios[radio].position

    def config_of(self, radio: int) -> RadioConfig:
        return self._radios[radio].config

    # -- state queries ----------------------------------------------------

    def node_busy(self, radio: int) -> bool:
        for member in self._node_members[self._radios[radio].node]:
            st = self._radios[member]
            if st.tx_active or st.on_air_mw:
                return True
        return False

    def is_transmitting(self, radio: int) -> bool:
        return self._radios[radio].tx_active

    # -- movement ---------------------------------------------------------

    def move(self, radio: int, position: Position) -> None:
        assert self.arrays is not None and self.procedure is not None
        st = self._radios[radio]
        st.position = position
        self.arrays.set_position(radio, position.x, position.y)
        self.procedure.on_move(radio)

    # -- transmission -----------------------------------------------------

    def transmit(self, radio: int, frame: Frame) -> float:
        """Put a frame on the air; returns its end time."""
        assert self.arrays is not None and self.procedure is not None
        if frame.src != radio:
            raise ValueError("frame source must match the transmitting radio")
        st = self._radios[radio]
        if st.tx_active:
            raise RuntimeError(f"radio {radio} is half duplex and already transmitting")
        st.tx_active = True
        for pend in st.pending.values():
            pend.poisoned = True
        t_end = self.engine.now + frame.duration_s
        self.counters[radio].frames_sent += 1
        self.engine.log(
            EventKind.TX_START, radio,
            f"frame={frame.frame_id} kind={frame.kind} dst={frame.dst} end={t_end!r}",
        )
        self.engine.at(t_end, EventKind.TX_END, radio, lambda: self._finish_tx(radio, frame))
        receivers = sorted(self.procedure.delivery_set(radio))
        if receivers:
            idx = np.asarray(receivers, dtype=np.int64)
            powers = self._kernel_set.pair_power_subset(self.arrays, radio, idx)
            self._air_seq += 1
            air_id = self._air_seq
            for j, p_dbm in zip(receivers, powers):
                self._arrive(int(j), air_id, frame, float(p_dbm), t_end)
        return t_end

    def _arrive(self, j: int, air_base: int, frame: Frame, p_dbm: float, t_end: float) -> None:
        key = (air_base << 20) + j  # unique per (transmission, receiver)
        st = self._radios[j]
        self.counters[j].arrivals += 1
        pend = _Pending(
            frame, p_dbm,
            poisoned=st.tx_active,
            hearable=p_dbm >= st.config.detection_threshold_dbm,
        )
        if pend.hearable:
            self._fold(j)
            st.on_air_mw[key] = pend.p_mw
        st.pending[key] = pend
        self.engine.log(
            EventKind.RX_START, j,
            f"frame={frame.frame_id} src={frame.src} prx={p_dbm!r}",
        )
        self.engine.at(t_end, EventKind.RX_END, j, lambda: self._finish_rx(j, key))

    def _fold(self, j: int) -> None:
        """Close the current constant-interference segment at receiver j."""
        st = self._radios[j]
        now = self.engine.now
        if now > st.last_fold_t and st.pending:
            total_mw = math.fsum(st.on_air_mw.values())
            for key, pend in st.pending.items():
                if not pend.hearable:
                    continue
                own = pend.p_mw if key in st.on_air_mw else 0.0
                interference_mw = total_mw - own + st.noise_mw
                snir = pend.p_dbm - 10.0 * math.log10(interference_mw)
                if snir < pend.min_snir_db:
                    pend.min_snir_db = snir
        st.last_fold_t = now

    def _finish_tx(self, radio: int, frame: Frame) -> str:
        st = self._radios[radio]
        st.tx_active = False
        self._notify_if_idle(st.node)
        return f"frame={frame.frame_id}"

    def _finish_rx(self, j: int, key: int) -> str:
        st = self._radios[j]
        self._fold(j)
        pend = st.pending.pop(key)
        st.on_air_mw.pop(key, None)
        cfg = st.config
        outcome = classify_reception(
            pend.p_dbm, cfg.sensitivity_dbm, cfg.snir_threshold_db,
            pend.poisoned, pend.min_snir_db,
        )
        c = self.counters[j]
        if outcome == "received":
            c.received += 1
        elif outcome == "collision":
            c.lost_collision += 1
        else:
            c.lost_below_sensitivity += 1
        if self.rx_end_hook is not None:
            self.rx_end_hook(j, pend.frame, pend.p_dbm, outcome, pend.min_snir_db)
        if outcome == "received":
            callback = self._rx_callbacks.get(j)
            if callback is not None:
                callback(j, pend.frame)
        self._notify_if_idle(st.node)
        snir = "inf" if pend.min_snir_db is math.inf else repr(pend.min_snir_db)
        return (
            f"frame={pend.frame.frame_id} src={pend.frame.src} "
            f"outcome={outcome} snir={snir}"
        )

    def _notify_if_idle(self, node: object) -> None:
        for member in self._node_members[node]:
            st = self._radios[member]
            if st.tx_active or st.on_air_mw:
                return
        for fn in self._idle_callbacks.get(node, ()):  # registration order
            fn()


@dataclass
class MacParams:
    bitrate_bps: float = 1_000_000.0
    slot_s: float = 20e-6
    sifs_s: float = 10e-6
    difs_s: float = 50e-6
    cw_min: int = 16
    cw_max: int = 1024
    max_retries: int = 7
    ack_bits: int = 112

    def __post_init__(self) -> None:
        if self.sifs_s >= self.difs_s:
            raise ValueError("DIFS must exceed SIFS")
        if not 0 < self.cw_min <= self.cw_max:
            raise ValueError("contention windows must satisfy 0 < min <= max")

    @property
    def ack_duration_s(self) -> float:
        return self.ack_bits / self.bitrate_bps

    @property
    def ack_timeout_s(self) -> float:
        return self.sifs_s + self.ack_duration_s + 2.0 * self.slot_s


class CsmaMac:
    """Listen-before-talk access with stop-and-wait acknowledgements.

    Unicast data waits for DIFS plus a uniform backoff drawn from the
    current contention window, transmits when the node senses idle,
    and retries with a doubled window until the retry cap drops the
    frame. Acknowledgements answer received unicast data after SIFS
    without sensing. A busy medium at the scheduled fire time defers
    the attempt to the next idle notification with a fresh draw, and a
    duplicate of the last delivered frame from a source is
    acknowledged but not handed up again.
    """

    def __init__(
        self,
        channel: Channel,
        radio: int,
        params: MacParams,
        rng: np.random.Generator,
    ) -> None:
        self.channel = channel
        self.radio = radio
        self.params = params
        self.rng = rng
        self.rx_handler: Callable[[Frame], None] | None = None
        self._queue: deque[Frame] = deque()
        self._current: Frame | None = None
        self._retries = 0
        self._cw = params.cw_min
        self._waiting_idle = False
        self._ack_timer: Token | None = None
        self._sent_current = False
        channel.set_receive_callback(radio, self._on_physical_receive)
        channel.add_idle_listener(radio, self._on_medium_idle)
        self._last_delivered: dict[int, int] = {}

    # -- sending ----------------------------------------------------------

    def send(self, dst: int | None, bits: int, payload: object = None) -> Frame:
        frame = Frame(
            frame_id=self.channel.next_frame_id(),
            kind="data", src=self.radio, dst=dst,
            bits=bits, bitrate_bps=self.params.bitrate_bps, payload=payload,
        )
        self._queue.append(frame)
        if self._current is None:
            self._next_frame()
        return frame

    def _next_frame(self) -> None:
        if not self._queue:
            self._current = None
            return
        self._current = self._queue.popleft()
        self._retries = 0
        self._cw = self.params.cw_min
        self._sent_current = False
        self._sense()

    def _sense(self) -> None:
        if self.channel.node_busy(self.radio):
            self._waiting_idle = True
            return
        slots = int(self.rng.integers(0, self._cw))
        delay = self.params.difs_s + slots * self.params.slot_s
        self.channel.engine.at(
            self.channel.engine.now + delay, EventKind.TIMER, self.radio, self._fire
        )

    def _fire(self) -> str:
        frame = self._current
        if frame is None:  # acked while the backoff timer was in flight
            return "backoff stale"
        if self.channel.node_busy(self.radio) or self.channel.is_transmitting(self.radio):
            self._waiting_idle = True
            return "backoff deferred"
        if not self._sent_current:
            self._sent_current = True
            self.channel.counters[self.radio].mac_data_sent += 1
        t_end = self.channel.transmit(self.radio, frame)
        if frame.dst is None:
            self.channel.engine.at(
                t_end, EventKind.TIMER, self.radio, self._broadcast_done
            )
        else:
            self._ack_timer = self.channel.engine.at(
                t_end + self.params.ack_timeout_s, EventKind.TIMER,
                self.radio, self._ack_timeout,
            )
        return f"backoff fired frame={frame.frame_id}"

    def _broadcast_done(self) -> str:
        done = self._current
        self._next_frame()
        return f"broadcast done frame={done.frame_id if done else '-'}"

    def _ack_timeout(self) -> str:
        frame = self._current
        assert frame is not None
        self._ack_timer = None
        self._retries += 1
        self.channel.counters[self.radio].mac_retries += 1
        if self._retries > self.params.max_retries:
            self.channel.counters[self.radio].mac_data_dropped += 1
            self._next_frame()
            return f"retries exhausted frame={frame.frame_id}"
        self._cw = min(self._cw * 2, self.params.cw_max)
        self._sense()
        return f"ack timeout frame={frame.frame_id} retry={self._retries}"

    def _on_medium_idle(self) -> None:
        if self._waiting_idle:
            self._waiting_idle = False
            self._sense()

    # -- receiving --------------------------------------------------------

    def _on_physical_receive(self, radio: int, frame: Frame) -> None:
        if frame.kind == "data":
            if frame.dst == self.radio:
                self.channel.engine.at(
                    self.channel.engine.now + self.params.sifs_s,
                    EventKind.TIMER, self.radio,
                    lambda: self._send_ack(frame),
                )
                if self._last_delivered.get(frame.src) != frame.frame_id:
                    self._last_delivered[frame.src] = frame.frame_id
                    self.channel.counters[self.radio].mac_data_delivered += 1
                    if self.rx_handler is not None:
                        self.rx_handler(frame)
            elif frame.dst is None:
                self.channel.counters[self.radio].mac_data_delivered += 1
                if self.rx_handler is not None:
                    self.rx_handler(frame)
        elif frame.kind == "ack" and frame.dst == self.radio:
            current = self._current
            if current is not None and frame.payload == current.frame_id:
                if self._ack_timer is not None:
                    self._ack_timer.cancel()
                    self._ack_timer = None
                self.channel.counters[self.radio].mac_data_acked += 1
                self._next_frame()

    def _send_ack(self, data_frame: Frame) -> str:
        if self.channel.is_transmitting(self.radio):
            return f"ack suppressed for={data_frame.frame_id}"
        ack = Frame(
            frame_id=self.channel.next_frame_id(),
            kind="ack", src=self.radio, dst=data_frame.src,
            bits=self.params.ack_bits, bitrate_bps=self.params.bitrate_bps,
            payload=data_frame.frame_id,
        )
        self.channel.transmit(self.radio, ack)
        return f"ack sent for={data_frame.frame_id}"

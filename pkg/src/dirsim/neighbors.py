"""Delivery-set maintenance for moving radios.

A transmitter's delivery set is every other radio whose receive power
meets the transmitter's detection threshold. Three interchangeable
procedures keep those sets current as radios move:

* ``SymmetricRangeProcedure`` tracks plain distance-circle membership
  with one shared radius and mirrored insert/remove on each move. Exact
  only when every radio is omnidirectional and identically configured;
  with directional antennas it returns a superset.
* ``BruteForceProcedure`` recomputes the full pairwise power matrix on
  every move and every consult. Always exact, cost grows with the
  square of the roster.
* ``NeighborsGraphProcedure`` maintains two coordinate-sorted axes and
  sweeps only the segment around the mover, keeping a cached candidate
  box per radio that is refined by actual power at consult time. Always
  exact, near-linear maintenance cost.

The candidate cache is protected lazily: a radio's box membership can
only change when a header crosses one of its box boundaries, and every
crossing is flagged during the mover's sweep. Coverage inside the box
changes without any crossing, so consults always re-refine candidates
against current power.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .axistree import AxisTree, Node
from .kernels import KernelSet, RadioArrays


class EntryKind(IntEnum):
    """Axis entry flavors; headers sort before boundaries at equal coordinate."""

    HEADER = 0
    LOW = 1
    HIGH = 2


@dataclass
class _RadioEntries:
    x_header: Node
    x_low: Node
    x_high: Node
    y_header: Node
    y_low: Node
    y_high: Node


class NeighborsGraph:
    """Two sorted axes holding one header and two box boundaries per radio.

    Radio ``i`` contributes six entries: on each axis its position and
    the two edges of its candidate box at position +/- ``half_width[i]``.
    ``neighbors_and_updates`` walks the four directed segments around a
    radio's headers and classifies what it meets: foreign headers inside
    the radio's box become candidates, foreign boundaries whose box
    gained or lost the radio since its last sweep mark that owner stale.

    The position recorded at the last sweep is compared against, so
    callers must pair each ``move_radio`` with a following sweep;
    repeating a sweep without movement is a no-op that reports nothing
    stale.
    """

    def __init__(self, arrays: RadioArrays, half_width: np.ndarray) -> None:
        self.arrays = arrays
        self.half_width = np.asarray(half_width, dtype=float)
        if len(self.half_width) != len(arrays):
            raise ValueError("one half width per radio required")
        if np.any(~np.isfinite(self.half_width)) or np.any(self.half_width <= 0.0):
            raise ValueError("half widths must be finite and positive")
        self._x_axis = AxisTree()
        self._y_axis = AxisTree()
        self._entries: dict[int, _RadioEntries] = {}
        self._swept_pos: dict[int, tuple[float, float]] = {}
        self.sweeps = 0
        self.entries_visited = 0

    def __contains__(self, i: int) -> bool:
        return i in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def build(self) -> None:
        """Insert every radio present in the arrays."""
        for i in range(len(self.arrays)):
            self.insert_radio(i)

    def insert_radio(self, i: int) -> None:
        if i in self._entries:
            raise ValueError(f"radio {i} already inserted")
        x = float(self.arrays.x[i])
        y = float(self.arrays.y[i])
        d = float(self.half_width[i])
        self._entries[i] = _RadioEntries(
            x_header=self._x_axis.insert((x, EntryKind.HEADER, i)),
            x_low=self._x_axis.insert((x - d, EntryKind.LOW, i)),
            x_high=self._x_axis.insert((x + d, EntryKind.HIGH, i)),
            y_header=self._y_axis.insert((y, EntryKind.HEADER, i)),
            y_low=self._y_axis.insert((y - d, EntryKind.LOW, i)),
            y_high=self._y_axis.insert((y + d, EntryKind.HIGH, i)),
        )
        self._swept_pos[i] = (x, y)

    def remove_radio(self, i: int) -> None:
        e = self._entries.pop(i)
        del self._swept_pos[i]
        for node in (e.x_header, e.x_low, e.x_high):
            self._x_axis.delete(node)
        for node in (e.y_header, e.y_low, e.y_high):
            self._y_axis.delete(node)

    def move_radio(self, i: int) -> tuple[float, float]:
        """Reposition radio ``i``'s six entries at its current coordinates.

        Returns the displacement since the last sweep. The old position
        stays recorded until ``neighbors_and_updates`` consumes it.
        """
        e = self._entries[i]
        x = float(self.arrays.x[i])
        y = float(self.arrays.y[i])
        d = float(self.half_width[i])
        for node in (e.x_header, e.x_low, e.x_high):
            self._x_axis.delete(node)
        for node in (e.y_header, e.y_low, e.y_high):
            self._y_axis.delete(node)
        e.x_header = self._x_axis.insert((x, EntryKind.HEADER, i))
        e.x_low = self._x_axis.insert((x - d, EntryKind.LOW, i))
        e.x_high = self._x_axis.insert((x + d, EntryKind.HIGH, i))
        e.y_header = self._y_axis.insert((y, EntryKind.HEADER, i))
        e.y_low = self._y_axis.insert((y - d, EntryKind.LOW, i))
        e.y_high = self._y_axis.insert((y + d, EntryKind.HIGH, i))
        px, py = self._swept_pos[i]
        return x - px, y - py

    def _in_box(self, owner: int, x: float, y: float) -> bool:
        d = self.half_width[owner]
        return (
            abs(x - self.arrays.x[owner]) <= d
            and abs(y - self.arrays.y[owner]) <= d
        )

    def _axis_walk(self, header: Node, lo: float, hi: float):
        node = header.next
        while node.key is not None and node.key[0] <= hi:
            yield node.key
            node = node.next
        node = header.prev
        while node.key is not None and node.key[0] >= lo:
            yield node.key
            node = node.prev

    def neighbors_and_updates(self, i: int) -> tuple[set[int], set[int]]:
        """Sweep around radio ``i``; return (candidates, stale owners).

        Candidates are radios whose header lies inside ``i``'s box.
        Stale owners are radios whose own box gained or lost ``i``
        between ``i``'s last swept position and its current one.
        """
        e = self._entries[i]
        x = float(self.arrays.x[i])
        y = float(self.arrays.y[i])
        d = float(self.half_width[i])
        prev_x, prev_y = self._swept_pos[i]
        candidates: set[int] = set()
        stale: set[int] = set()
        for header, lo, hi, cross, cross_center in (
            (e.x_header, x - d, x + d, self.arrays.y, y),
            (e.y_header, y - d, y + d, self.arrays.x, x),
        ):
            for _coord, kind, owner in self._axis_walk(header, lo, hi):
                self.entries_visited += 1
                if owner == i:
                    continue
                if kind == EntryKind.HEADER:
                    if abs(cross[owner] - cross_center) <= d:
                        candidates.add(owner)
                elif self._in_box(owner, x, y) != self._in_box(owner, prev_x, prev_y):
                    stale.add(owner)
        self._swept_pos[i] = (x, y)
        self.sweeps += 1
        return candidates, stale

    def validate(self) -> None:
        """Test support: structural invariants of both axes."""
        self._x_axis.check_invariants()
        self._y_axis.check_invariants()
        assert len(self._x_axis) == 3 * len(self._entries)
        assert len(self._y_axis) == 3 * len(self._entries)


def coverage_set(
    arrays: RadioArrays, i: int, kernel_set: KernelSet | None = None
) -> set[int]:
    """Exact delivery set of transmitter ``i`` by full-row evaluation."""
    ks = kernel_set or kernels.ACTIVE
    row = ks.pair_power_row(arrays, i)
    return {int(j) for j in np.nonzero(row >= arrays.det_dbm[i])[0]}


class NeighborProcedure:
    """Shared interface: build once, notify on moves, consult for sets.

    Subclasses accumulate the wall time their own bookkeeping consumes,
    split into maintenance (build plus move handling) and consults.
    """

    name = "abstract"
    number = 0

    def __init__(
        self,
        arrays: RadioArrays,
        max_range: np.ndarray,
        kernel_set: KernelSet | None = None,
    ) -> None:
        self.arrays = arrays
        self.max_range = np.asarray(max_range, dtype=float)
        if len(self.max_range) != len(arrays):
            raise ValueError("one range per radio required")
        self.kernel_set = kernel_set or kernels.ACTIVE
        self.maintenance_ns = 0
        self.consult_ns = 0

    @property
    def neighbor_time_ns(self) -> int:
        return self.maintenance_ns + self.consult_ns

    def build(self) -> None:
        raise NotImplementedError

    def on_move(self, i: int) -> None:
        raise NotImplementedError

    def delivery_set(self, i: int) -> set[int]:
        raise NotImplementedError


class SymmetricRangeProcedure(NeighborProcedure):
    """Distance-circle membership with mirrored updates (procedure 1).

    Requires one shared range: with it the neighbor relation is
    symmetric, so the mover fixes both sides of every changed pair and
    nobody else needs to be touched. Consults return the circle as-is;
    that equals the delivery set only for identical omnidirectional
    radios, and overshoots once antennas are directional.
    """

    name = "symmetric-range"
    number = 1

    def __init__(
        self,
        arrays: RadioArrays,
        max_range: np.ndarray,
        kernel_set: KernelSet | None = None,
    ) -> None:
        super().__init__(arrays, max_range, kernel_set)
        if len(self.max_range) and not np.all(self.max_range == self.max_range[0]):
            raise ValueError("symmetric range maintenance needs one shared range")
        for column in arrays.parameter_columns():
            if len(column) and not np.all(column == column[0]):
                raise ValueError(
                    "symmetric range maintenance needs identical radio configs"
                )
        self._sets: list[set[int]] = []

    def _range_set(self, i: int) -> set[int]:
        dx = self.arrays.x - self.arrays.x[i]
        dy = self.arrays.y - self.arrays.y[i]
        d = np.sqrt(dx * dx + dy * dy)
        inside = np.nonzero(d <= self.max_range[i])[0]
        return {int(j) for j in inside if j != i}

    def build(self) -> None:
        t0 = time.perf_counter_ns()
        self._sets = [self._range_set(i) for i in range(len(self.arrays))]
        self.maintenance_ns += time.perf_counter_ns() - t0

    def on_move(self, i: int) -> None:
        t0 = time.perf_counter_ns()
        new = self._range_set(i)
        old = self._sets[i]
        for j in old - new:
            self._sets[j].discard(i)
        for j in new - old:
            self._sets[j].add(i)
        self._sets[i] = new
        self.maintenance_ns += time.perf_counter_ns() - t0

    def delivery_set(self, i: int) -> set[int]:
        t0 = time.perf_counter_ns()
        out = set(self._sets[i])
        self.consult_ns += time.perf_counter_ns() - t0
        return out


class BruteForceProcedure(NeighborProcedure):
    """Full-matrix recompute on every move and every consult (procedure 2)."""

    name = "brute-force"
    number = 2

    def __init__(
        self,
        arrays: RadioArrays,
        max_range: np.ndarray,
        kernel_set: KernelSet | None = None,
    ) -> None:
        super().__init__(arrays, max_range, kernel_set)
        self._delivered: np.ndarray | None = None
        self.recompute_count = 0

    def _recompute(self) -> None:
        self.recompute_count += 1
        prx = self.kernel_set.delivery_matrix(self.arrays)
        self._delivered = prx >= self.arrays.det_dbm[:, np.newaxis]

    def build(self) -> None:
        t0 = time.perf_counter_ns()
        self._recompute()
        self.maintenance_ns += time.perf_counter_ns() - t0

    def on_move(self, i: int) -> None:
        t0 = time.perf_counter_ns()
        self._recompute()
        self.maintenance_ns += time.perf_counter_ns() - t0

    def delivery_set(self, i: int) -> set[int]:
        t0 = time.perf_counter_ns()
        self._recompute()
        assert self._delivered is not None
        out = {int(j) for j in np.nonzero(self._delivered[i])[0]}
        self.consult_ns += time.perf_counter_ns() - t0
        return out


class NeighborsGraphProcedure(NeighborProcedure):
    """Axis-sweep candidate boxes refined by power at consult (procedure 3).

    Moves resweep the mover eagerly and flag radios whose box membership
    it changed; flagged radios resweep lazily on their next consult.
    Every consult refines the cached candidate box against current
    receive power, because coverage inside an unchanged box still shifts
    as radios move around in it.
    """

    name = "neighbors-graph"
    number = 3

    def __init__(
        self,
        arrays: RadioArrays,
        max_range: np.ndarray,
        kernel_set: KernelSet | None = None,
    ) -> None:
        super().__init__(arrays, max_range, kernel_set)
        self.graph = NeighborsGraph(arrays, self.max_range)
        self._candidates: list[set[int]] = []
        self._valid = np.zeros(len(arrays), dtype=bool)

    def build(self) -> None:
        t0 = time.perf_counter_ns()
        self.graph.build()
        self._candidates = [set() for _ in range(len(self.arrays))]
        self._valid[:] = False
        self.maintenance_ns += time.perf_counter_ns() - t0

    def _resweep(self, i: int) -> set[int]:
        cands, stale = self.graph.neighbors_and_updates(i)
        self._candidates[i] = cands
        self._valid[i] = True
        for j in stale:
            self._valid[j] = False
        return cands

    def on_move(self, i: int) -> None:
        t0 = time.perf_counter_ns()
        dx, dy = self.graph.move_radio(i)
        limit = self.max_range[i]
        self._resweep(i)
        if abs(dx) > limit or abs(dy) > limit:
            # A jump longer than the box half width can cross boundaries
            # outside the sweep segment, so trust nothing cached.
            valid_i = self._valid[i]
            self._valid[:] = False
            self._valid[i] = valid_i
        self.maintenance_ns += time.perf_counter_ns() - t0

    def delivery_set(self, i: int) -> set[int]:
        t0 = time.perf_counter_ns()
        if self._valid[i]:
            cands = self._candidates[i]
        else:
            cands = self._resweep(i)
        if cands:
            idx = np.fromiter(cands, dtype=np.int64, count=len(cands))
            idx.sort()
            prx = self.kernel_set.pair_power_subset(self.arrays, i, idx)
            out = {int(j) for j, p in zip(idx, prx) if p >= self.arrays.det_dbm[i]}
        else:
            out = set()
        self.consult_ns += time.perf_counter_ns() - t0
        return out


PROCEDURES: dict[int, type[NeighborProcedure]] = {
    1: SymmetricRangeProcedure,
    2: BruteForceProcedure,
    3: NeighborsGraphProcedure,
}


def make_procedure(
    number: int,
    arrays: RadioArrays,
    max_range: np.ndarray,
    kernel_set: KernelSet | None = None,
) -> NeighborProcedure:
    try:
        cls = PROCEDURES[number]
    except KeyError:
        raise ValueError(f"procedure must be 1, 2, or 3, got {number}") from None
    return cls(arrays, max_range, kernel_set)

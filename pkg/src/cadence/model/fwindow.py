# src/cadence/model/fwindow.py
from __future__ import annotations

import logging
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvariantViolation, MonotonicityError, OutOfRangeError
from .buffers import BufferPool, ColumnSet
from .descriptor import StreamDescriptor, Timestamp, capacity
from .event import TIME_DTYPE, EventBatch

logger = logging.getLogger(__name__)


class FWindow:
    """Fixed-interval columnar window over a periodic stream.

    Slot ``i`` covers nominal time ``sync + i * period``. The four columns are
    acquired once and reused for the whole run; ``slide`` and ``advance`` only
    ever move the window forward.
    """

    __slots__ = ("descriptor", "dimension", "capacity", "sync", "name", "_columns", "_offsets")

    def __init__(
        self,
        descriptor: StreamDescriptor,
        dimension: int,
        sync: Optional[Timestamp] = None,
        *,
        pool: Optional[BufferPool] = None,
        name: str = "",
    ) -> None:
        self.descriptor = descriptor
        self.dimension = dimension
        self.capacity = capacity(descriptor, dimension, name or None)
        self.name = name
        start = descriptor.offset if sync is None else sync
        if not descriptor.on_grid(start):
            raise OutOfRangeError(f"window sync {start} is not on the slot grid of {descriptor.label()}")
        self.sync = start

        self._columns = (pool or BufferPool()).acquire(self.capacity, descriptor.width)
        self._offsets = np.arange(self.capacity, dtype=TIME_DTYPE) * descriptor.period
        np.add(self._offsets, self.sync, out=self._columns.vsync)

    # ---------- Columns ----------

    @property
    def payload(self) -> npt.NDArray[Any]:
        return self._columns.payload

    @property
    def vsync(self) -> npt.NDArray[np.int64]:
        return self._columns.vsync

    @property
    def duration(self) -> npt.NDArray[np.int64]:
        return self._columns.duration

    @property
    def bitvector(self) -> npt.NDArray[np.bool_]:
        return self._columns.bitvector

    @property
    def columns(self) -> ColumnSet:
        return self._columns

    @property
    def values(self) -> npt.NDArray[Any]:
        """Scalar payload column (a view, not a copy)."""
        return self._columns.payload[:, 0]

    @property
    def period(self) -> int:
        return self.descriptor.period

    @property
    def end(self) -> Timestamp:
        return self.sync + self.dimension

    # ---------- Indexing ----------

    def slot_time(self, i: int) -> Timestamp:
        return self.sync + i * self.descriptor.period

    def slot_of(self, t: Timestamp) -> int:
        """Slot index holding time t."""
        if not self.sync <= t < self.end:
            raise OutOfRangeError(f"time {t} outside window [{self.sync}, {self.end})")
        return (t - self.sync) // self.descriptor.period

    def index_of(self, t: Timestamp) -> int:
        """Slot offset of an on-grid time relative to this window; may fall outside it."""
        return (t - self.sync) // self.descriptor.period

    def present_count(self) -> int:
        return int(np.count_nonzero(self._columns.bitvector))

    # ---------- Movement ----------

    def _check_forward(self, new_sync: Timestamp) -> None:
        if new_sync < self.sync:
            raise MonotonicityError(
                f"FWindows can only move forward in time ({self.name or 'window'}: {self.sync} -> {new_sync})"
            )
        if not self.descriptor.on_grid(new_sync):
            raise OutOfRangeError(f"window sync {new_sync} is not on the slot grid of {self.descriptor.label()}")

    def slide(self, new_sync: Timestamp) -> FWindow:
        """Move to new_sync and clear every slot, reusing the same buffer."""
        self._check_forward(new_sync)
        if new_sync == self.sync:
            return self
        self.sync = new_sync
        self.clear()
        return self

    def advance(self, new_sync: Timestamp) -> FWindow:
        """Move to new_sync keeping the slots the old and new intervals share."""
        self._check_forward(new_sync)
        shift = (new_sync - self.sync) // self.descriptor.period
        if shift == 0:
            return self
        self.sync = new_sync
        if shift >= self.capacity:
            self.clear()
            return self

        keep = self.capacity - shift
        cols = self._columns
        cols.payload[:keep] = cols.payload[shift:]
        cols.vsync[:keep] = cols.vsync[shift:]
        cols.duration[:keep] = cols.duration[shift:]
        cols.bitvector[:keep] = cols.bitvector[shift:]
        cols.payload[keep:] = 0
        np.add(self._offsets[keep:], self.sync, out=cols.vsync[keep:])
        cols.duration[keep:] = 0
        cols.bitvector[keep:] = False
        return self

    def reset_vsync(self) -> None:
        """Put every slot back on its nominal sync time."""
        np.add(self._offsets, self.sync, out=self._columns.vsync)

    def clear(self) -> None:
        cols = self._columns
        cols.payload.fill(0)
        np.add(self._offsets, self.sync, out=cols.vsync)
        cols.duration.fill(0)
        cols.bitvector.fill(False)

    # ---------- Event access ----------

    def events(self) -> EventBatch:
        """Present events of the window in slot order."""
        idx = np.flatnonzero(self._columns.bitvector)
        cols = self._columns
        return EventBatch(cols.vsync[idx], cols.duration[idx], cols.payload[idx])

    def write(self, sync: npt.NDArray[np.int64], duration: npt.NDArray[np.int64], payload: npt.NDArray[Any]) -> int:
        """Store events whose sync falls inside the window; returns how many were kept."""
        inside = (sync >= self.sync) & (sync < self.end)
        if not inside.all():
            sync, duration, payload = sync[inside], duration[inside], payload[inside]
        slots = (sync - self.sync) // self.descriptor.period
        cols = self._columns
        cols.vsync[slots] = sync
        cols.duration[slots] = duration
        cols.payload[slots] = payload.reshape(len(slots), -1)
        cols.bitvector[slots] = True
        return int(slots.shape[0])

    def write_batch(self, batch: EventBatch) -> int:
        return self.write(batch.sync, batch.duration, batch.payload)

    def copy_slots(self, source: FWindow, start: int) -> None:
        """Copy ``self.capacity`` slots of source beginning at slot ``start`` into this window."""
        stop = start + self.capacity
        src = source._columns
        dst = self._columns
        np.copyto(dst.payload, src.payload[start:stop])
        np.copyto(dst.vsync, src.vsync[start:stop])
        np.copyto(dst.duration, src.duration[start:stop])
        np.copyto(dst.bitvector, src.bitvector[start:stop])

    def load_tail(self, source: FWindow) -> None:
        """Copy a whole window into the trailing slots of this (longer) window."""
        n = source.capacity
        dst = self._columns
        src = source._columns
        np.copyto(dst.payload[-n:], src.payload)
        np.copyto(dst.vsync[-n:], src.vsync)
        np.copyto(dst.duration[-n:], src.duration)
        np.copyto(dst.bitvector[-n:], src.bitvector)

    # ---------- Invariants ----------

    def validate(self) -> None:
        """Raise InvariantViolation when the window breaks a stream-model invariant."""
        cols = self._columns
        idx = np.flatnonzero(cols.bitvector)
        label = self.name or repr(self)
        if idx.shape[0] > self.capacity:
            raise InvariantViolation(f"{label}: {idx.shape[0]} present events exceed capacity {self.capacity}")
        if idx.shape[0] == 0:
            return
        vsync = cols.vsync[idx]
        duration = cols.duration[idx]
        lower = self.sync + idx * self.descriptor.period
        if np.any(vsync < lower) or np.any(vsync >= lower + self.descriptor.period):
            raise InvariantViolation(f"{label}: vsync outside its slot")
        if np.any(duration <= 0):
            raise InvariantViolation(f"{label}: present event with non-positive duration")
        if np.any(vsync[:-1] + duration[:-1] > vsync[1:]):
            raise InvariantViolation(f"{label}: overlapping events")

    def __repr__(self) -> str:
        return f"FWindow{self.descriptor.label()}[{self.dimension}]@{self.sync}"

# src/cadence/model/buffers.py
from __future__ import annotations

import logging
from typing import Any, NamedTuple

import numpy as np
import numpy.typing as npt

from .event import PAYLOAD_DTYPE, TIME_DTYPE

logger = logging.getLogger(__name__)


class ColumnSet(NamedTuple):
    """The four parallel columns behind one FWindow."""

    payload: npt.NDArray[Any]
    vsync: npt.NDArray[np.int64]
    duration: npt.NDArray[np.int64]
    bitvector: npt.NDArray[np.bool_]

    @property
    def nbytes(self) -> int:
        return int(self.payload.nbytes + self.vsync.nbytes + self.duration.nbytes + self.bitvector.nbytes)


class BufferPool:
    """Hands out FWindow column sets and counts every fresh allocation.

    Released sets are kept per (capacity, width) and handed back out before
    anything new is allocated, so a plan that acquires all of its buffers up
    front performs no allocations once execution starts.
    """

    def __init__(self) -> None:
        self.allocations = 0
        self.bytes_allocated = 0
        self._free: dict[tuple[int, int], list[ColumnSet]] = {}
        self._mark = 0

    def acquire(self, capacity: int, width: int = 1) -> ColumnSet:
        free = self._free.get((capacity, width))
        if free:
            return free.pop()

        columns = ColumnSet(
            payload=np.zeros((capacity, width), dtype=PAYLOAD_DTYPE),
            vsync=np.zeros(capacity, dtype=TIME_DTYPE),
            duration=np.zeros(capacity, dtype=TIME_DTYPE),
            bitvector=np.zeros(capacity, dtype=np.bool_),
        )
        self.allocations += 1
        self.bytes_allocated += columns.nbytes
        logger.debug(f"Allocated column set capacity={capacity} width={width} ({columns.nbytes} bytes)")
        return columns

    def release(self, columns: ColumnSet) -> None:
        key = (int(columns.bitvector.shape[0]), int(columns.payload.shape[1]))
        self._free.setdefault(key, []).append(columns)

    def mark_steady(self) -> None:
        """Record the allocation count at the end of plan setup."""
        self._mark = self.allocations

    @property
    def steady_state_allocations(self) -> int:
        """FWindow column sets allocated after ``mark_steady``.

        Only pool acquisitions are counted. Temporaries the kernels create with
        numpy (join pairs, transform rows, DTW cost bands) do not show up here,
        so 0 means the window buffers stayed fixed, not that nothing was allocated.
        """
        return self.allocations - self._mark

    @property
    def pool_size(self) -> int:
        return sum(len(v) for v in self._free.values())

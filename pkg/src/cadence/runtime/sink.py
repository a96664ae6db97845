# src/cadence/runtime/sink.py
from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..errors import InvariantViolation, UsageError
from ..model import EventBatch, FWindow

logger = logging.getLogger(__name__)


def _row_bytes(batch: EventBatch) -> bytes:
    """Event-major bytes so the digest does not depend on how events were batched."""
    rows = np.empty(
        len(batch), dtype=[("sync", "<i8"), ("duration", "<i8"), ("payload", "<f4", (batch.width,))]
    )
    rows["sync"] = batch.sync
    rows["duration"] = batch.duration
    rows["payload"] = batch.payload
    return rows.tobytes()


def _frame(batch: EventBatch, width: int) -> pd.DataFrame:
    payload_cols = ["payload"] if width == 1 else [f"payload_{i}" for i in range(width)]
    frame = pd.DataFrame({"sync": batch.sync, "duration": batch.duration})
    for i, col in enumerate(payload_cols):
        frame[col] = batch.payload[:, i]
    return frame


def _to_csv(frame: pd.DataFrame, path: Path, header: bool) -> None:
    frame.to_csv(
        path, mode="w" if header else "a", header=header, index=False, float_format="%.9g", lineterminator="\n"
    )


class MemorySink:
    """Checks sync order and keeps a running digest and count of every event.

    Batches are only kept when ``retain`` is set; otherwise memory stays flat
    however much output the plan produces.
    """

    def __init__(self, width: int = 1, retain: bool = False) -> None:
        self.width = width
        self.retain = retain
        self._batches: list[EventBatch] = []
        self._last_sync: int | None = None
        self._hash = hashlib.blake2b(digest_size=16)
        self.count = 0

    def consume(self, window: FWindow) -> int:
        return self.append(window.events())

    def append(self, batch: EventBatch) -> int:
        n = len(batch)
        if n == 0:
            return 0
        if np.any(np.diff(batch.sync) < 0) or (self._last_sync is not None and batch.sync[0] < self._last_sync):
            raise InvariantViolation(f"sink received events out of sync order near t={int(batch.sync[0])}")
        self._last_sync = int(batch.sync[-1])
        if self.retain:
            self._batches.append(batch)
        self._hash.update(_row_bytes(batch))
        self.count += n
        self.emit(batch)
        return n

    def emit(self, batch: EventBatch) -> None:
        """Hook for sinks that forward each ordered batch."""

    @property
    def checksum(self) -> str:
        return self._hash.hexdigest()

    @property
    def retained_batches(self) -> int:
        return len(self._batches)

    def events(self) -> EventBatch:
        if not self.retain:
            raise UsageError("this sink does not retain events; create it with retain=True")
        return EventBatch.concat(self._batches, self.width)

    def __len__(self) -> int:
        return self.count


class CsvSink(MemorySink):
    """Streams every batch to a CSV file as it arrives; the file matches ``sink_csv`` of the whole output."""

    def __init__(self, path: Union[str, Path], width: int = 1) -> None:
        super().__init__(width)
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        _to_csv(_frame(EventBatch.empty(width), width), self.path, header=True)

    def emit(self, batch: EventBatch) -> None:
        _to_csv(_frame(batch, self.width), self.path, header=False)


def sink_csv(batch: EventBatch, path: Union[str, Path]) -> Path:
    """Write events as ``sync,duration,payload`` rows (``payload_0..`` for composite payloads)."""
    path = Path(path)
    if len(batch) and np.any(np.diff(batch.sync) < 0):
        raise InvariantViolation(f"refusing to write out-of-order events to {path}")
    path.parent.mkdir(parents=True, exist_ok=True)
    _to_csv(_frame(batch, batch.width), path, header=True)
    logger.info(f"Wrote {len(batch)} events to {path}")
    return path

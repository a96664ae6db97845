# src/cadence/runtime/sources.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
from pydantic import BaseModel, Field

from ..config import get_config
from ..errors import IngestionError
from ..model import PAYLOAD_DTYPE, TIME_DTYPE, EventBatch, FWindow, StreamDescriptor
from ..operators import Interval
from .availability import AvailabilityIndex

logger = logging.getLogger(__name__)


class IngestReport(BaseModel):
    """Row accounting for one ingested CSV file."""

    path: str
    rows: int = Field(default=0, description="Data rows read (header excluded)")
    accepted: int = Field(default=0, description="Rows stored as events")
    rejected_off_grid: int = Field(default=0, description="Rows whose timestamp is off the descriptor grid")
    duplicates: int = Field(default=0, description="Rows overwritten by a later row with the same timestamp")
    gap_slots: int = Field(default=0, description="Absent slots between the first and last event")
    segments: int = Field(default=0, description="Availability segments after gap bridging")


class SourceData:
    """Dense in-memory source: one float32 value and presence flag per grid slot from ``start``."""

    def __init__(
        self,
        name: str,
        descriptor: StreamDescriptor,
        values: npt.ArrayLike,
        present: Optional[npt.ArrayLike] = None,
        start: Optional[int] = None,
        gap_ms: Optional[int] = None,
    ) -> None:
        self.name = name
        self.descriptor = descriptor
        self.start = descriptor.offset if start is None else start
        if not descriptor.on_grid(self.start):
            raise IngestionError(f"source {name}: start {self.start} is off the grid of {descriptor.label()}")

        self.values = np.array(values, dtype=PAYLOAD_DTYPE).reshape(-1)
        if present is None:
            self.present = ~np.isnan(self.values)
        else:
            self.present = np.array(present, dtype=np.bool_).reshape(-1) & ~np.isnan(self.values)
        if self.present.shape != self.values.shape:
            raise IngestionError(f"source {name}: {self.values.size} values but {self.present.size} presence flags")
        self.values[~self.present] = 0

        gap = get_config().segment_gap_ms if gap_ms is None else gap_ms
        self.availability = AvailabilityIndex.from_presence(self.start, descriptor.period, self.present, gap)
        self.report: Optional[IngestReport] = None

    @classmethod
    def from_arrays(
        cls,
        name: str,
        descriptor: StreamDescriptor,
        values: npt.ArrayLike,
        present: Optional[npt.ArrayLike] = None,
        start: Optional[int] = None,
        gap_ms: Optional[int] = None,
    ) -> SourceData:
        return cls(name, descriptor, values, present, start, gap_ms)

    @property
    def period(self) -> int:
        return self.descriptor.period

    @property
    def event_count(self) -> int:
        return int(np.count_nonzero(self.present))

    @property
    def data_span(self) -> Optional[Interval]:
        """[first present sync, last present sync + period), or None when empty."""
        idx = np.flatnonzero(self.present)
        if idx.size == 0:
            return None
        p = self.period
        return Interval(start=self.start + int(idx[0]) * p, end=self.start + (int(idx[-1]) + 1) * p)

    def load(self, window: FWindow) -> int:
        """Fill a freshly cleared window with the slots it overlaps; returns events loaded."""
        i0 = (window.sync - self.start) // self.period
        lo = max(i0, 0)
        hi = min(i0 + window.capacity, self.values.size)
        if lo >= hi:
            return 0
        w0, w1 = lo - i0, hi - i0
        np.copyto(window.payload[w0:w1, 0], self.values[lo:hi])
        np.copyto(window.bitvector[w0:w1], self.present[lo:hi])
        np.multiply(self.present[lo:hi], self.period, out=window.duration[w0:w1])
        return int(np.count_nonzero(window.bitvector[w0:w1]))

    def to_batch(self) -> EventBatch:
        idx = np.flatnonzero(self.present)
        sync = self.start + idx.astype(TIME_DTYPE) * self.period
        return EventBatch(sync, np.full(idx.size, self.period, dtype=TIME_DTYPE), self.values[idx].reshape(-1, 1))

    def __repr__(self) -> str:
        return f"SourceData({self.name}, {self.descriptor.label()}, {self.event_count} events)"


def _read_rows(path: Path) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    try:
        frame = pd.read_csv(path, header=None, names=["timestamp", "value"], usecols=[0, 1], skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        return np.empty(0), np.empty(0)
    except (OSError, ValueError) as e:
        raise IngestionError(f"cannot read {path}: {e}") from e

    ts = pd.to_numeric(frame["timestamp"], errors="coerce")
    vals = pd.to_numeric(frame["value"], errors="coerce")
    if len(frame) and pd.isna(ts.iloc[0]):
        # header row
        ts, vals = ts.iloc[1:], vals.iloc[1:]
    bad = ts.isna()
    if bad.any():
        raise IngestionError(f"{path}: malformed timestamp on data row {int(np.flatnonzero(bad.to_numpy())[0]) + 1}")
    return ts.to_numpy(dtype=np.float64), vals.to_numpy(dtype=np.float64)


def ingest_csv(
    path: Union[str, Path],
    descriptor: StreamDescriptor,
    name: Optional[str] = None,
    gap_ms: Optional[int] = None,
) -> tuple[SourceData, AvailabilityIndex]:
    """Load a ``timestamp,value`` CSV onto the descriptor's slot grid.

    Off-grid rows are rejected and counted, repeated timestamps keep the last
    row, and a timestamp smaller than its predecessor aborts the ingest.
    """
    path = Path(path)
    name = name or path.stem
    ts, vals = _read_rows(path)
    report = IngestReport(path=str(path), rows=int(ts.size))

    if ts.size > 1:
        back = np.flatnonzero(np.diff(ts) < 0)
        if back.size:
            row = int(back[0]) + 2
            raise IngestionError(f"{path}: timestamp decreases at data row {row} ({ts[row - 2]:g} -> {ts[row - 1]:g})")

    integral = ts == np.floor(ts)
    on_grid = integral & ((ts - descriptor.offset) % descriptor.period == 0)
    report.rejected_off_grid = int(ts.size - np.count_nonzero(on_grid))
    if report.rejected_off_grid:
        logger.warning(f"{path}: rejected {report.rejected_off_grid} off-grid row(s) for {descriptor.label()}")
    ts, vals = ts[on_grid].astype(np.int64), vals[on_grid]

    last_of_run = np.append(ts[1:] != ts[:-1], True) if ts.size else np.empty(0, dtype=np.bool_)
    report.duplicates = int(ts.size - np.count_nonzero(last_of_run))
    if report.duplicates:
        logger.warning(f"{path}: {report.duplicates} duplicate timestamp(s); kept the last row of each")
    ts, vals = ts[last_of_run], vals[last_of_run]

    if ts.size == 0:
        source = SourceData(name, descriptor, np.empty(0), start=descriptor.offset, gap_ms=gap_ms)
    else:
        start = int(ts[0])
        n = (int(ts[-1]) - start) // descriptor.period + 1
        values = np.zeros(n, dtype=PAYLOAD_DTYPE)
        present = np.zeros(n, dtype=np.bool_)
        slots = (ts - start) // descriptor.period
        values[slots] = vals
        present[slots] = ~np.isnan(vals)
        source = SourceData(name, descriptor, values, present, start=start, gap_ms=gap_ms)

    report.accepted = source.event_count
    report.gap_slots = int(source.values.size - source.event_count)
    report.segments = len(source.availability)
    source.report = report
    logger.info(
        f"Ingested {name}: {report.accepted} events, {report.gap_slots} gap slot(s), {report.segments} segment(s)"
    )
    return source, source.availability

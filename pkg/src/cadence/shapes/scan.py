# src/cadence/shapes/scan.py
from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import UsageError
from ..model import FWindow
from ..operators import Interval, WhereShape
from ..runtime import SourceData
from .dtw import cdtw_batch

logger = logging.getLogger(__name__)


class ShapeTemplate(BaseModel):
    """Representative shape to search for, one value per stream slot."""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]

    @field_validator("values")
    @classmethod
    def _check_values(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(v) < 2:
            raise ValueError(f"a template needs at least 2 samples, got {len(v)}")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("template values must be finite")
        return v

    @property
    def m(self) -> int:
        return len(self.values)

    def array(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.values, dtype=np.float64)


class MatchParams(BaseModel):
    """Matching knobs; band radius and hop default from the template length."""

    model_config = ConfigDict(frozen=True)

    threshold: float = Field(gt=0, description="Normalised cDTW distance below which a start matches")
    band_radius: Optional[int] = Field(default=None, ge=0, description="Sakoe-Chiba band radius in slots")
    hop: Optional[int] = Field(default=None, ge=1, description="Slots between evaluated alignments")
    normalize: bool = Field(default=True, description="z-normalise template and candidates")

    def radius_for(self, m: int) -> int:
        if self.band_radius is None:
            return min(max(5, math.ceil(0.1 * m)), m - 1)
        if self.band_radius >= m:
            raise UsageError(f"band radius {self.band_radius} must be smaller than the template length {m}")
        return self.band_radius

    def hop_for(self, m: int) -> int:
        return self.hop if self.hop is not None else max(1, m // 4)


def znormalize(rows: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Row-wise standard scores; constant rows become all zeros."""
    mean = rows.mean(axis=-1, keepdims=True)
    std = rows.std(axis=-1, keepdims=True)
    safe = np.where(std > 0, std, 1.0)
    return np.where(std > 0, (rows - mean) / safe, 0.0)


def merge_matches(intervals: Iterable[Interval]) -> list[Interval]:
    """Merge intervals that strictly overlap; touching intervals stay apart."""
    merged: list[Interval] = []
    for iv in sorted(intervals, key=lambda x: x.start):
        if merged and iv.start < merged[-1].end:
            merged[-1] = merged[-1].hull(iv)
        else:
            merged.append(iv)
    return merged


class ShapeScanner:
    """Streaming shape search that carries the last m-1 samples between chunks."""

    def __init__(self, template: ShapeTemplate, params: MatchParams, period: int, origin: int = 0) -> None:
        self.template = template
        self.params = params
        self.period = period
        self.origin = origin
        self.m = template.m
        self.radius = params.radius_for(self.m)
        self.hop = params.hop_for(self.m)
        t = template.array()[None, :]
        self._target = znormalize(t)[0] if params.normalize else t[0]

        self._values = np.empty(0, dtype=np.float64)
        self._present = np.empty(0, dtype=np.bool_)
        self._next: Optional[int] = None
        self._found: list[Interval] = []
        self.evaluated = 0

    def feed(self, values: npt.ArrayLike, present: npt.ArrayLike, start: int) -> list[Interval]:
        """Scan one contiguous chunk starting at slot time ``start``; returns raw matching alignments."""
        vals = np.asarray(values, dtype=np.float64).reshape(-1)
        pres = np.asarray(present, dtype=np.bool_).reshape(-1)
        if self._next is not None and start != self._next:
            self._values = self._values[:0]
            self._present = self._present[:0]

        buf_vals = np.concatenate([self._values, vals])
        buf_pres = np.concatenate([self._present, pres])
        buf_start = start - self._values.size * self.period
        self._next = start + vals.size * self.period
        keep = self.m - 1
        self._values = buf_vals[-keep:] if buf_vals.size > keep else buf_vals
        self._present = buf_pres[-keep:] if buf_pres.size > keep else buf_pres

        n = buf_vals.size - self.m + 1
        if n <= 0:
            return []
        first_slot = (buf_start - self.origin) // self.period
        offsets = np.arange(n)
        absent = np.concatenate([[0], np.cumsum(~buf_pres)])
        full = absent[offsets + self.m] - absent[offsets] == 0
        starts = offsets[((first_slot + offsets) % self.hop == 0) & full]
        if starts.size == 0:
            return []

        rows = buf_vals[starts[:, None] + np.arange(self.m)]
        if self.params.normalize:
            rows = znormalize(rows)
        cost, length = cdtw_batch(self._target, rows, self.radius)
        self.evaluated += int(starts.size)
        hits = starts[cost / length < self.params.threshold]
        found = [
            Interval(start=buf_start + int(s) * self.period, end=buf_start + (int(s) + self.m) * self.period)
            for s in hits
        ]
        self._found.extend(found)
        return found

    def feed_window(self, window: FWindow) -> list[Interval]:
        return self.feed(window.values, window.bitvector, window.sync)

    def matches(self) -> list[Interval]:
        return merge_matches(self._found)


def scan_stream(windows: Iterable[FWindow], template: ShapeTemplate, params: MatchParams) -> list[Interval]:
    """Scan a sequence of consecutive FWindows of one stream."""
    scanner: Optional[ShapeScanner] = None
    for window in windows:
        if scanner is None:
            scanner = ShapeScanner(template, params, window.period, window.descriptor.offset)
        scanner.feed_window(window)
    return scanner.matches() if scanner is not None else []


def scan_array(
    values: npt.ArrayLike,
    present: npt.ArrayLike,
    start: int,
    period: int,
    template: ShapeTemplate,
    params: MatchParams,
    origin: int = 0,
) -> list[Interval]:
    """Single-pass scan over a dense slot array beginning at ``start``."""
    scanner = ShapeScanner(template, params, period, origin)
    scanner.feed(values, present, start)
    return scanner.matches()


def where_shape(window: FWindow, matches: Iterable[Interval], mode: Literal["drop", "keep"] = "drop") -> FWindow:
    """Copy of ``window`` with events inside (drop) or outside (keep) the matches made absent."""
    out = FWindow(window.descriptor, window.dimension, window.sync, name=window.name)
    WhereShape(matches=tuple(matches), mode=mode).compute([window], out)
    return out


def detect_shapes(source: SourceData, template: ShapeTemplate, params: MatchParams) -> list[Interval]:
    """Run the scan separately over each availability segment of a source."""
    found: list[Interval] = []
    p = source.period
    for seg in source.availability.segments:
        lo = (seg.start - source.start) // p
        hi = (seg.end - source.start) // p
        found.extend(
            scan_array(
                source.values[lo:hi], source.present[lo:hi], seg.start, p, template, params, source.descriptor.offset
            )
        )
    matches = merge_matches(found)
    logger.info(f"Shape scan of {source.name}: {len(matches)} match(es) over {len(source.availability)} segment(s)")
    return matches


def load_template(path: Union[str, Path]) -> ShapeTemplate:
    """Read a template file holding one float per line."""
    path = Path(path)
    try:
        lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as e:
        raise UsageError(f"cannot read template {path}: {e}") from e
    if not lines:
        raise UsageError(f"template file {path} is empty")
    try:
        values = tuple(float(ln) for ln in lines)
    except ValueError as e:
        raise UsageError(f"template file {path} has a non-numeric line: {e}") from e
    if len(values) < 2:
        raise UsageError(f"template file {path} needs at least 2 values")
    return ShapeTemplate(values=values)


def line_zero_template(m: int = 50, baseline: float = 100.0) -> ShapeTemplate:
    """Pressure trace dropping to zero during calibration, holding, then recovering."""
    if m < 2:
        raise UsageError(f"template length must be at least 2, got {m}")
    knots = [0.0, 0.15, 0.3, 0.7, 0.85, 1.0]
    levels = [baseline, baseline, 0.0, 0.0, baseline, baseline]
    values = np.interp(np.linspace(0.0, 1.0, m), knots, levels)
    return ShapeTemplate(values=tuple(float(v) for v in values))

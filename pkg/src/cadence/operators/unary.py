# src/cadence/operators/unary.py
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from fractions import Fraction
from typing import Any, ClassVar, Literal, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import Field

from ..errors import ContractViolation, PlanningError
from ..model import FWindow, StreamDescriptor
from .base import (
    EdgeShape,
    Operator,
    aligned_start,
    as_rows,
    copy_frame,
    payload_arg,
    require_multiple,
    require_scalar,
)
from .lineage import AffineSpan, Interval

logger = logging.getLogger(__name__)


class Select(Operator):
    """Apply ``fn`` to the payload of every present event.

    ``fn`` receives the present payloads as one array (flat for scalar
    streams) and, with ``with_sync``, the matching sync times first.
    """

    kind: ClassVar[str] = "select"

    fn: Callable[..., Any]
    width: Optional[int] = Field(default=None, description="Output payload width; defaults to the input's")
    with_sync: bool = False

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        width = self.width or src.descriptor.width
        if width < 1:
            raise PlanningError(f"select width must be >= 1, got {width}")
        desc = StreamDescriptor.composite(src.descriptor.offset, src.descriptor.period, width)
        return EdgeShape(descriptor=desc, max_duration=src.max_duration)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        start = aligned_start(view, out.sync)
        copy_frame(view, out, start)
        idx = np.flatnonzero(out.bitvector)
        if idx.size == 0:
            return
        arg = payload_arg(view.payload[start + idx])
        result = self.fn(out.vsync[idx], arg) if self.with_sync else self.fn(arg)
        out.payload[idx] = as_rows(result, idx.size, out.descriptor.width, "select function")


class Where(Operator):
    """Keep only events whose payload satisfies ``pred``."""

    kind: ClassVar[str] = "where"

    pred: Callable[..., Any]
    with_sync: bool = False

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        return inputs[0]

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        out.copy_slots(view, aligned_start(view, out.sync))
        idx = np.flatnonzero(out.bitvector)
        if idx.size == 0:
            return
        arg = payload_arg(out.payload[idx])
        keep = np.asarray(self.pred(out.vsync[idx], arg) if self.with_sync else self.pred(arg), dtype=np.bool_)
        if keep.shape != idx.shape:
            raise ContractViolation(f"where predicate returned shape {keep.shape}, expected ({idx.size},)")
        dropped = idx[~keep]
        out.bitvector[dropped] = False
        out.duration[dropped] = 0


class Shift(Operator):
    """Move every event ``delta`` ms along the time axis."""

    kind: ClassVar[str] = "shift"

    delta: int

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        desc = src.descriptor.model_copy(update={"offset": src.descriptor.offset + self.delta})
        return EdgeShape(descriptor=desc, max_duration=src.max_duration)

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        return AffineSpan(translate=-self.delta)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        out.copy_slots(view, view.index_of(out.sync - self.delta))
        np.add(out.vsync, self.delta, out=out.vsync)

    def params(self) -> str:
        return str(self.delta)


class AlterPeriod(Operator):
    """Re-stamp slot ``i`` of the input grid onto slot ``i`` of a new period."""

    kind: ClassVar[str] = "alter_period"

    period: int

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        if self.period < 1:
            raise PlanningError(f"new period must be >= 1 ms, got {self.period}")
        desc = src.descriptor.model_copy(update={"period": self.period})
        return EdgeShape(descriptor=desc, max_duration=min(src.max_duration, self.period))

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        src = inputs[0].descriptor
        return AffineSpan(scale=Fraction(src.period, self.period), origin=src.offset)

    def unify_dimensions(
        self, in_dims: list[int], out_dims: list[int], inputs: list[EdgeShape], output: EdgeShape
    ) -> tuple[list[int], list[int]]:
        p_in = inputs[0].descriptor.period
        slots = math.lcm(*(d // p_in for d in in_dims), *(d // self.period for d in out_dims))
        return [slots * p_in] * len(in_dims), [slots * self.period] * len(out_dims)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        src = view.descriptor
        t_in = src.offset + out.descriptor.slot_index(out.sync) * src.period
        out.copy_slots(view, view.index_of(t_in))
        out.reset_vsync()
        np.minimum(out.duration, self.period, out=out.duration)

    def params(self) -> str:
        return str(self.period)


class AlterDuration(Operator):
    """Set every present event's duration to ``duration``."""

    kind: ClassVar[str] = "alter_duration"

    duration: int

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        if not 1 <= self.duration <= src.descriptor.period:
            raise PlanningError(
                f"duration {self.duration} ms must lie in [1, {src.descriptor.period}] for period "
                f"{src.descriptor.period} ms"
            )
        return EdgeShape(descriptor=src.descriptor, max_duration=self.duration)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        out.copy_slots(view, aligned_start(view, out.sync))
        out.duration[out.bitvector] = self.duration

    def params(self) -> str:
        return str(self.duration)


class Chop(Operator):
    """Split events at every ``boundary`` ms mark counted from the stream offset."""

    kind: ClassVar[str] = "chop"

    boundary: int

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        if self.boundary <= 0:
            raise PlanningError(f"chop boundary must be positive, got {self.boundary}")
        desc = src.descriptor.model_copy(update={"period": math.gcd(src.descriptor.period, self.boundary)})
        return EdgeShape(descriptor=desc, max_duration=min(src.max_duration, self.boundary))

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        return AffineSpan(back=inputs[0].reach_back())

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        ev = view.events()
        if len(ev) == 0:
            return
        c = self.boundary
        origin = view.descriptor.offset
        start, end = ev.sync, ev.end
        next_mark = origin + ((start - origin) // c + 1) * c
        pieces = 1 + np.where(next_mark < end, (end - next_mark + c - 1) // c, 0)

        rep = np.repeat(np.arange(len(ev)), pieces)
        first = np.cumsum(pieces) - pieces
        q = np.arange(rep.size) - first[rep]
        sync = np.where(q == 0, start[rep], next_mark[rep] + (q - 1) * c)
        stop = np.minimum(np.where(q == 0, next_mark[rep], sync + c), end[rep])
        out.write(sync, stop - sync, ev.payload[rep])

    def params(self) -> str:
        return str(self.boundary)


class Transform(Operator):
    """Run a whole-slice function over fixed ``slice_ms`` chunks of a scalar stream.

    ``fn(values, present)`` receives one row per slice. Each row holds
    ``history`` samples before the slice, the slice itself and ``lookahead``
    samples after it, and ``fn`` returns the slice's new values and
    presence as two ``(rows, slice_ms // period)`` arrays.
    """

    kind: ClassVar[str] = "transform"

    slice_ms: int
    fn: Callable[..., tuple[Any, Any]]
    history: int = Field(default=0, ge=0, description="Samples of history per row")
    lookahead: int = Field(default=0, ge=0, description="Samples of lookahead per row")

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        require_scalar(src, "transform")
        require_multiple(self.slice_ms, src.descriptor.period, "transform slice")
        return EdgeShape(descriptor=src.descriptor, max_duration=max(src.max_duration, src.descriptor.period))

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        p = inputs[0].descriptor.period
        spill = self.slice_ms - p
        return AffineSpan(back=spill + self.history * p, ahead=spill + self.lookahead * p)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        p = view.period
        w = self.slice_ms
        per_slice = w // p
        off = view.descriptor.offset
        first = (out.sync - off) // w
        last = -((off - out.end) // w)
        n = last - first
        slice0 = off + first * w

        center = view.index_of(slice0)
        lo = center - self.history
        row_len = self.history + per_slice + self.lookahead
        hi = lo + (n - 1) * per_slice + row_len
        values = sliding_window_view(view.values[lo:hi].astype(np.float64), row_len)[::per_slice]
        present = sliding_window_view(view.bitvector[lo:hi], row_len)[::per_slice]

        new_values, new_present = self.fn(values, present)
        new_values = np.asarray(new_values, dtype=np.float64)
        new_present = np.asarray(new_present, dtype=np.bool_)
        if new_values.shape != (n, per_slice) or new_present.shape != (n, per_slice):
            raise ContractViolation(
                f"transform function returned {new_values.shape}/{new_present.shape}, expected ({n}, {per_slice})"
            )

        times = slice0 + np.arange(n * per_slice, dtype=np.int64) * p
        duration = view.duration[center : center + n * per_slice]
        duration = np.where(duration > 0, duration, p)
        keep = new_present.reshape(-1) & (times >= out.sync) & (times < out.end)
        out.write(times[keep], duration[keep], new_values.reshape(-1)[keep])

    def params(self) -> str:
        return f"{self.slice_ms},h={self.history},l={self.lookahead}"


class WhereShape(Operator):
    """Drop (or keep only) events inside matched shape intervals."""

    kind: ClassVar[str] = "where_shape"

    matches: tuple[Interval, ...]
    mode: Literal["drop", "keep"] = "drop"

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        return inputs[0]

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        out.copy_slots(view, aligned_start(view, out.sync))
        idx = np.flatnonzero(out.bitvector)
        if idx.size == 0 or (not self.matches and self.mode == "drop"):
            return
        starts = np.array([m.start for m in self.matches], dtype=np.int64)
        ends = np.array([m.end for m in self.matches], dtype=np.int64)
        t = out.vsync[idx]
        j = np.searchsorted(starts, t, side="right") - 1
        inside = (j >= 0) & (t < ends[np.maximum(j, 0)]) if starts.size else np.zeros(idx.size, dtype=np.bool_)
        dropped = idx[inside] if self.mode == "drop" else idx[~inside]
        out.bitvector[dropped] = False
        out.duration[dropped] = 0

    def params(self) -> str:
        return f"{len(self.matches)} {self.mode}"

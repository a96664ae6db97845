# src/cadence/operators/join.py
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from enum import Enum
from typing import Any, ClassVar, Optional

import numpy as np
import numpy.typing as npt
from pydantic import Field

from ..errors import PlanningError
from ..model import PAYLOAD_DTYPE, EventBatch, FWindow, StreamDescriptor
from .base import EdgeShape, Operator, as_rows, payload_arg
from .lineage import AffineSpan

logger = logging.getLogger(__name__)

_FAR = np.iinfo(np.int64).max


class JoinMode(str, Enum):
    """Which unmatched event lifetimes survive a temporal join."""

    INNER = "inner"
    LEFT = "left"
    OUTER = "outer"


class _Pieces:
    """Output fragments gathered before they are merged into one sorted batch."""

    def __init__(self, left_width: int, right_width: int) -> None:
        self.left_width = left_width
        self.right_width = right_width
        self.sync: list[npt.NDArray[np.int64]] = []
        self.end: list[npt.NDArray[np.int64]] = []
        self.left: list[npt.NDArray[Any]] = []
        self.right: list[npt.NDArray[Any]] = []

    def add(self, sync: npt.NDArray[np.int64], end: npt.NDArray[np.int64], left: Any, right: Any) -> None:
        n = sync.shape[0]
        if n == 0:
            return
        self.sync.append(sync)
        self.end.append(end)
        self.left.append(left if left is not None else np.full((n, self.left_width), np.nan, dtype=PAYLOAD_DTYPE))
        self.right.append(right if right is not None else np.full((n, self.right_width), np.nan, dtype=PAYLOAD_DTYPE))

    def merged(self, lo: int, hi: int) -> tuple[npt.NDArray[np.int64], ...] | None:
        if not self.sync:
            return None
        sync = np.concatenate(self.sync)
        keep = (sync >= lo) & (sync < hi)
        order = np.argsort(sync[keep], kind="stable")
        return (
            sync[keep][order],
            np.concatenate(self.end)[keep][order],
            np.concatenate(self.left)[keep][order],
            np.concatenate(self.right)[keep][order],
        )


def overlapping_pairs(a: EventBatch, b: EventBatch) -> tuple[npt.NDArray[np.int64], ...]:
    """Index pairs (i, j) where event a[i] and event b[j] are both active at some instant.

    Returns (j0, j1, ai, bj): for each a-event the half-open range of
    overlapping b-events, then the flattened pairs.
    """
    j0 = np.searchsorted(b.end, a.sync, side="right")
    j1 = np.searchsorted(b.sync, a.end, side="left")
    counts = np.maximum(j1 - j0, 0)
    ai = np.repeat(np.arange(len(a)), counts)
    first = np.cumsum(counts) - counts
    bj = j0[ai] + (np.arange(ai.size) - first[ai])
    return j0, j1, ai, bj


def unmatched_spans(
    a: EventBatch, b: EventBatch, grid: StreamDescriptor
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Parts of each a-event's lifetime that no b-event covers.

    A part starting off ``grid`` is moved up to the next grid point; parts left
    with no length are dropped. Returns (a-index, start, end).
    """
    j0, j1, ai, bj = overlapping_pairs(a, b)
    b_sync = np.append(b.sync, _FAR)
    matched = j1 > j0

    head_start = a.sync
    head_end = np.minimum(np.where(matched, b_sync[j0], a.end), a.end)

    nxt = bj + 1
    tail_start = np.maximum(b.end[bj], a.sync[ai])
    tail_end = np.minimum(np.where(nxt < j1[ai], b_sync[nxt], a.end[ai]), a.end[ai])

    idx = np.concatenate([np.arange(len(a)), ai])
    start = grid.align_up(np.concatenate([head_start, tail_start]))
    end = np.concatenate([head_end, tail_end])
    keep = end > start
    return idx[keep], start[keep], end[keep]


class Join(Operator):
    """Temporal join: one output event for every instant both inputs are active.

    Output events carry both payloads side by side (or ``combine(left, right)``
    when given). LEFT also keeps the uncovered parts of left events and OUTER
    those of both sides, with NaN standing in for the missing payload.
    """

    kind: ClassVar[str] = "join"
    arity: ClassVar[int] = 2

    mode: JoinMode = JoinMode.INNER
    combine: Optional[Callable[[Any, Any], Any]] = None
    width: Optional[int] = Field(default=None, description="Width of combine's result")

    def _grid(self, inputs: list[EdgeShape]) -> tuple[int, int]:
        left, right = inputs[0].descriptor, inputs[1].descriptor
        g = math.gcd(left.period, right.period)
        if (left.offset - right.offset) % g != 0:
            raise PlanningError(
                f"join inputs {left.label()} and {right.label()} never align: offsets differ by "
                f"{left.offset - right.offset} ms, not a multiple of {g} ms"
            )
        return min(left.offset, right.offset) % g, g

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        left, right = inputs
        offset, g = self._grid(inputs)
        width = (self.width or 1) if self.combine is not None else left.descriptor.width + right.descriptor.width
        if self.mode is JoinMode.INNER:
            max_duration = min(left.max_duration, right.max_duration)
        elif self.mode is JoinMode.LEFT:
            max_duration = left.max_duration
        else:
            max_duration = max(left.max_duration, right.max_duration)
        return EdgeShape(descriptor=StreamDescriptor.composite(offset, g, width), max_duration=max_duration)

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        mine, other = inputs[port], inputs[1 - port]
        ahead = 0
        # unmatched parts of the other side's events depend on what follows them here
        if (self.mode is JoinMode.LEFT and port == 1) or self.mode is JoinMode.OUTER:
            ahead = other.reach_ahead(mine.descriptor.period)
        return AffineSpan(back=mine.reach_back(), ahead=ahead)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        left, right = views[0].events(), views[1].events()
        pieces = _Pieces(left.width, right.width)

        _, _, li, rj = overlapping_pairs(left, right)
        pieces.add(
            np.maximum(left.sync[li], right.sync[rj]),
            np.minimum(left.end[li], right.end[rj]),
            left.payload[li],
            right.payload[rj],
        )
        if self.mode is not JoinMode.INNER:
            idx, start, end = unmatched_spans(left, right, out.descriptor)
            pieces.add(start, end, left.payload[idx], None)
        if self.mode is JoinMode.OUTER:
            idx, start, end = unmatched_spans(right, left, out.descriptor)
            pieces.add(start, end, None, right.payload[idx])

        merged = pieces.merged(out.sync, out.end)
        if merged is None or merged[0].size == 0:
            return
        sync, end, lpay, rpay = merged
        if self.combine is not None:
            payload = as_rows(
                self.combine(payload_arg(lpay), payload_arg(rpay)), sync.size, out.descriptor.width, "join combine"
            )
        else:
            payload = np.hstack([lpay, rpay])
        out.write(sync, end - sync, payload)

    def params(self) -> str:
        return self.mode.value


class ClipJoin(Operator):
    """Pair each left event with the next right event starting within one window.

    A right event that starts while the left event is still active cuts the
    left event short. Left events without a partner keep NaN on the right.
    """

    kind: ClassVar[str] = "clip_join"
    arity: ClassVar[int] = 2

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        left, right = inputs
        d = left.descriptor
        return EdgeShape(
            descriptor=StreamDescriptor.composite(d.offset, d.period, d.width + right.descriptor.width),
            max_duration=left.max_duration,
        )

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        return AffineSpan(ahead=dimension) if port == 1 else AffineSpan()

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        left, right = views[0].events(), views[1].events()
        keep = (left.sync >= out.sync) & (left.sync < out.end)
        if not keep.any():
            return
        left = left.take(keep)

        j = np.searchsorted(right.sync, left.sync, side="left")
        r_sync = np.append(right.sync, _FAR)[j]
        matched = r_sync < left.sync + out.dimension
        clip = matched & (r_sync > left.sync) & (r_sync < left.end)
        duration = np.where(clip, r_sync - left.sync, left.duration)

        r_payload = np.full((len(left), right.width), np.nan, dtype=PAYLOAD_DTYPE)
        r_payload[matched] = right.payload[j[matched]]
        out.write(left.sync, duration, np.hstack([left.payload, r_payload]))


__all__ = ["ClipJoin", "Join", "JoinMode", "overlapping_pairs", "unmatched_spans"]

# src/cadence/runtime/availability.py
from __future__ import annotations

import logging
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt

from ..operators import Interval

logger = logging.getLogger(__name__)


class Segment(NamedTuple):
    start: int
    end: int


class AvailabilityIndex:
    """Sorted, disjoint, non-adjacent time ranges in which a source has data.

    Gaps no longer than the bridging tolerance are folded into the
    surrounding segment and only show up as absent slots in FWindows.
    """

    def __init__(self, segments: list[Segment]) -> None:
        self.segments = segments
        self._ends = np.array([s.end for s in segments], dtype=np.int64)

    @classmethod
    def from_presence(
        cls, start: int, period: int, present: npt.NDArray[np.bool_], gap_ms: int = 0
    ) -> AvailabilityIndex:
        padded = np.concatenate([[False], present.astype(np.bool_), [False]])
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        run_starts, run_ends = edges[::2], edges[1::2]

        segments: list[Segment] = []
        for s, e in zip(run_starts, run_ends, strict=True):
            seg = Segment(start + int(s) * period, start + int(e) * period)
            if segments and seg.start - segments[-1].end <= gap_ms:
                segments[-1] = Segment(segments[-1].start, seg.end)
            else:
                segments.append(seg)
        return cls(segments)

    def next_segment(self, t: int) -> Optional[Segment]:
        """First segment still open after time t."""
        i = int(np.searchsorted(self._ends, t, side="right"))
        return self.segments[i] if i < len(self.segments) else None

    def intersects(self, interval: Interval) -> bool:
        seg = self.next_segment(interval.start)
        return seg is not None and seg.start < interval.end

    @property
    def span(self) -> Optional[Interval]:
        if not self.segments:
            return None
        return Interval(start=self.segments[0].start, end=self.segments[-1].end)

    @property
    def covered_ms(self) -> int:
        return sum(s.end - s.start for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __repr__(self) -> str:
        shown = ", ".join(f"[{s.start},{s.end})" for s in self.segments[:4])
        more = "" if len(self.segments) <= 4 else f", ... {len(self.segments) - 4} more"
        return f"AvailabilityIndex({shown}{more})"

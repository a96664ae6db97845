# src/cadence/operators/lineage.py
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class Interval(BaseModel):
    """Half-open time interval [start, end) in milliseconds."""

    model_config = ConfigDict(frozen=True)

    start: int
    end: int

    @property
    def length(self) -> int:
        return max(0, self.end - self.start)

    @property
    def empty(self) -> bool:
        return self.end <= self.start

    def intersects(self, other: Interval) -> bool:
        return self.start < other.end and other.start < self.end

    def hull(self, other: Optional[Interval]) -> Interval:
        """Smallest interval covering both."""
        if other is None:
            return self
        return Interval(start=min(self.start, other.start), end=max(self.end, other.end))

    def __str__(self) -> str:
        return f"[{self.start},{self.end})"


class AffineSpan(BaseModel):
    """Affine map from an output interval to the input interval a kernel reads.

    ``[a, b)`` maps to
    ``[origin + floor((a - origin) * scale) + translate - back,
       origin + ceil((b - origin) * scale) + translate + ahead)``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: Fraction = Field(default=Fraction(1), description="Time rescale factor")
    origin: int = Field(default=0, description="Fixed point of the rescale")
    translate: int = Field(default=0, description="Shift applied to both endpoints (ms)")
    back: int = Field(default=0, ge=0, description="History read before the mapped start (ms)")
    ahead: int = Field(default=0, ge=0, description="Lookahead read past the mapped end (ms)")

    def apply(self, interval: Interval) -> Interval:
        lo = self.origin + math.floor((interval.start - self.origin) * self.scale) + self.translate - self.back
        hi = self.origin + math.ceil((interval.end - self.origin) * self.scale) + self.translate + self.ahead
        return Interval(start=lo, end=hi)

    @property
    def is_identity(self) -> bool:
        return self.scale == 1 and self.translate == 0 and self.back == 0 and self.ahead == 0


IDENTITY = AffineSpan()

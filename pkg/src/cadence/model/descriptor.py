# src/cadence/model/descriptor.py
from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import IngestionError, PlanningError

logger = logging.getLogger(__name__)

# Milliseconds since an epoch; durations and periods share the unit
Timestamp = int


class PayloadKind(str, Enum):
    """Payload tag carried by a stream descriptor."""

    SCALAR = "scalar"
    COMPOSITE = "composite"


class StreamDescriptor(BaseModel):
    """Symbolic (offset, period) identity of a periodic stream.

    Only ``offset mod period`` matters for the slot grid; the raw offset is kept
    so descriptor transforms stay affine (a shift of -2 yields offset -2).
    """

    model_config = ConfigDict(frozen=True)

    offset: int = Field(default=0, description="Sync time of the first slot (ms)")
    period: int = Field(description="Spacing between consecutive slots (ms)")
    payload_kind: PayloadKind = Field(default=PayloadKind.SCALAR, description="Payload tag")
    width: int = Field(default=1, description="Payload cells per event")

    @model_validator(mode="after")
    def _check_shape(self) -> StreamDescriptor:
        if self.period < 1:
            raise ValueError(f"period must be >= 1 ms, got {self.period}")
        if self.width < 1:
            raise ValueError(f"payload width must be >= 1, got {self.width}")
        if self.payload_kind is PayloadKind.SCALAR and self.width != 1:
            raise ValueError("scalar payloads have width 1")
        return self

    @classmethod
    def composite(cls, offset: int, period: int, width: int) -> StreamDescriptor:
        kind = PayloadKind.SCALAR if width == 1 else PayloadKind.COMPOSITE
        return cls(offset=offset, period=period, payload_kind=kind, width=width)

    def on_grid(self, t: Timestamp) -> bool:
        return (t - self.offset) % self.period == 0

    def align_up(self, t: Timestamp) -> Timestamp:
        """Smallest slot time >= t."""
        return t + (self.offset - t) % self.period

    def align_down(self, t: Timestamp) -> Timestamp:
        """Largest slot time <= t."""
        return t - (t - self.offset) % self.period

    def slot_index(self, t: Timestamp) -> int:
        """Global slot number of t counted from the offset."""
        return (t - self.offset) // self.period

    def same_grid(self, other: StreamDescriptor) -> bool:
        return self.period == other.period and (self.offset - other.offset) % self.period == 0

    def label(self) -> str:
        return f"({self.offset},{self.period})"

    def __str__(self) -> str:
        suffix = "" if self.width == 1 else f"x{self.width}"
        return f"{self.label()}{suffix}"


def capacity(descriptor: StreamDescriptor, dimension: int, edge: str | None = None) -> int:
    """Slot count of an FWindow of the given dimension."""
    if dimension <= 0 or dimension % descriptor.period != 0:
        where = f" on edge {edge}" if edge else ""
        raise PlanningError(
            f"dimension {dimension} ms{where} is not a positive multiple of period {descriptor.period} ms"
        )
    return dimension // descriptor.period


def period_from_hz(frequency_hz: float) -> int:
    """Convert a sampling frequency to an integer millisecond period."""
    if frequency_hz <= 0:
        raise IngestionError(f"frequency must be positive, got {frequency_hz} Hz")
    period = Fraction(1000) / Fraction(frequency_hz).limit_denominator(1_000_000)
    if period.denominator != 1:
        raise IngestionError(f"{frequency_hz} Hz does not have an integer millisecond period ({float(period):.4f} ms)")
    return int(period)


def descriptor_from_hz(frequency_hz: float, offset: int = 0) -> StreamDescriptor:
    return StreamDescriptor(offset=offset, period=period_from_hz(frequency_hz))

# src/cadence/model/event.py
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, field_validator, model_validator

PAYLOAD_DTYPE = np.float32
TIME_DTYPE = np.int64


class Event(BaseModel):
    """One timestamped measurement."""

    sync: int = Field(description="Activation time (ms)")
    duration: int = Field(default=0, ge=0, description="Active lifetime (ms)")
    payload: tuple[float, ...] = Field(default=(), description="Payload cells; NaN marks a null join side")
    present: bool = Field(default=True, description="Presence flag")

    @field_validator("payload", mode="before")
    @classmethod
    def _coerce_payload(cls, v: Any) -> Any:
        if isinstance(v, (int, float, np.floating, np.integer)):
            return (float(v),)
        return tuple(float(x) for x in v)

    @model_validator(mode="after")
    def _check_duration(self) -> Event:
        if self.present and self.duration <= 0:
            raise ValueError("present events need a positive duration")
        return self

    @property
    def end(self) -> int:
        return self.sync + self.duration

    @property
    def value(self) -> float:
        return self.payload[0]


@dataclass(slots=True)
class EventBatch:
    """Compacted present events in sync order, stored column-wise."""

    sync: npt.NDArray[np.int64]
    duration: npt.NDArray[np.int64]
    payload: npt.NDArray[Any]

    @classmethod
    def empty(cls, width: int = 1) -> EventBatch:
        return cls(
            np.empty(0, dtype=TIME_DTYPE),
            np.empty(0, dtype=TIME_DTYPE),
            np.empty((0, width), dtype=PAYLOAD_DTYPE),
        )

    @classmethod
    def from_events(cls, events: Iterable[Event], width: int = 1) -> EventBatch:
        rows = [e for e in events if e.present]
        if not rows:
            return cls.empty(width)
        return cls(
            np.array([e.sync for e in rows], dtype=TIME_DTYPE),
            np.array([e.duration for e in rows], dtype=TIME_DTYPE),
            np.array([e.payload for e in rows], dtype=PAYLOAD_DTYPE).reshape(len(rows), -1),
        )

    @classmethod
    def concat(cls, batches: Iterable[EventBatch], width: int = 1) -> EventBatch:
        parts = list(batches)
        if not parts:
            return cls.empty(width)
        return cls(
            np.concatenate([b.sync for b in parts]),
            np.concatenate([b.duration for b in parts]),
            np.concatenate([b.payload for b in parts]),
        )

    def __len__(self) -> int:
        return int(self.sync.shape[0])

    @property
    def width(self) -> int:
        return int(self.payload.shape[1])

    @property
    def end(self) -> npt.NDArray[np.int64]:
        return self.sync + self.duration

    @property
    def values(self) -> npt.NDArray[Any]:
        """Payload as a flat column for scalar streams, rows otherwise."""
        return self.payload[:, 0] if self.width == 1 else self.payload

    def take(self, index: Any) -> EventBatch:
        return EventBatch(self.sync[index], self.duration[index], self.payload[index])

    def to_events(self) -> list[Event]:
        return [
            Event(sync=int(s), duration=int(d), payload=tuple(float(x) for x in p))
            for s, d, p in zip(self.sync, self.duration, self.payload, strict=True)
        ]

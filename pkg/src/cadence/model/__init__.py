# src/cadence/model/__init__.py
from __future__ import annotations

from .buffers import BufferPool, ColumnSet
from .descriptor import PayloadKind, StreamDescriptor, Timestamp, capacity, descriptor_from_hz, period_from_hz
from .event import PAYLOAD_DTYPE, TIME_DTYPE, Event, EventBatch
from .fwindow import FWindow

__all__ = [
    "BufferPool",
    "ColumnSet",
    "Event",
    "EventBatch",
    "FWindow",
    "PAYLOAD_DTYPE",
    "PayloadKind",
    "StreamDescriptor",
    "TIME_DTYPE",
    "Timestamp",
    "capacity",
    "descriptor_from_hz",
    "period_from_hz",
]

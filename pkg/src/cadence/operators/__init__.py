# src/cadence/operators/__init__.py
from __future__ import annotations

from .aggregate import Aggregate, AggregateName, Reducer
from .base import EdgeShape, Operator
from .join import ClipJoin, Join, JoinMode
from .lineage import IDENTITY, AffineSpan, Interval
from .routing import Multicast, Source
from .unary import AlterDuration, AlterPeriod, Chop, Select, Shift, Transform, Where, WhereShape

__all__ = [
    "AffineSpan",
    "Aggregate",
    "AggregateName",
    "AlterDuration",
    "AlterPeriod",
    "Chop",
    "ClipJoin",
    "EdgeShape",
    "IDENTITY",
    "Interval",
    "Join",
    "JoinMode",
    "Multicast",
    "Operator",
    "Reducer",
    "Select",
    "Shift",
    "Source",
    "Transform",
    "Where",
    "WhereShape",
]

# src/cadence/compiler/__init__.py
from __future__ import annotations

from .graph import SINK, Edge, Node, QueryGraph, TraceStep, build_graph
from .layout import Layout, ViewSpec, plan_layout
from .lineage import LineageMap, derive_lineage
from .memory import MemoryPlan, plan_memory, plan_report, slot_bytes
from .plan import CompiledPlan, compile_query
from .query import NodeSpec, Query, QueryDescription, Stream, WindowedStream
from .tracing import locality_trace

__all__ = [
    "CompiledPlan",
    "Edge",
    "Layout",
    "LineageMap",
    "MemoryPlan",
    "Node",
    "NodeSpec",
    "Query",
    "QueryDescription",
    "QueryGraph",
    "SINK",
    "Stream",
    "TraceStep",
    "ViewSpec",
    "WindowedStream",
    "build_graph",
    "compile_query",
    "derive_lineage",
    "locality_trace",
    "plan_layout",
    "plan_memory",
    "plan_report",
    "slot_bytes",
]

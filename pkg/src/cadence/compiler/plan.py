# src/cadence/compiler/plan.py
from __future__ import annotations

import logging
from typing import Optional

from ..config import CadenceConfig, get_config
from .graph import QueryGraph, build_graph
from .layout import Layout, plan_layout
from .lineage import LineageMap, derive_lineage
from .memory import MemoryPlan, plan_memory, plan_report
from .query import QueryDescription
from .tracing import locality_trace

logger = logging.getLogger(__name__)


class CompiledPlan:
    """Traced graph plus everything the executors need; never mutated after compilation."""

    def __init__(self, graph: QueryGraph, lineage: LineageMap, layout: Layout, memory: MemoryPlan) -> None:
        self.graph = graph
        self.lineage = lineage
        self.layout = layout
        self.memory = memory

    @property
    def sink(self) -> str:
        return self.graph.sink

    @property
    def sink_dimension(self) -> int:
        return self.layout.dimension[self.graph.sink]

    def report(self, trace: bool = False) -> str:
        return plan_report(self.graph, self.memory, trace=trace)

    def __repr__(self) -> str:
        return f"CompiledPlan(sink={self.sink}, D={self.sink_dimension}, bytes={self.memory.total_bytes})"


def compile_query(query: QueryDescription, config: Optional[CadenceConfig] = None) -> CompiledPlan:
    """build_graph -> locality_trace -> derive_lineage -> layout -> plan_memory."""
    config = config or get_config()
    graph = build_graph(query)
    locality_trace(graph, config)
    lineage = derive_lineage(graph)
    layout = plan_layout(graph, lineage)
    memory = plan_memory(graph, layout, config)
    plan = CompiledPlan(graph, lineage, layout, memory)
    logger.info(f"Compiled {plan!r}")
    return plan

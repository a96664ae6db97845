# src/cadence/compiler/memory.py
from __future__ import annotations

import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import BITVECTOR_BYTES, DURATION_BYTES, VSYNC_BYTES, CadenceConfig, get_config
from ..errors import PlanningError
from ..model import StreamDescriptor, capacity
from .graph import QueryGraph
from .layout import Layout

logger = logging.getLogger(__name__)


def slot_bytes(descriptor: StreamDescriptor, payload_bytes: int = 4) -> int:
    """Bytes of one FWindow slot across the payload, vsync, duration and bitvector columns."""
    return descriptor.width * payload_bytes + VSYNC_BYTES + DURATION_BYTES + BITVECTOR_BYTES


class EdgeBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    edge: str
    notation: str
    buffer: int
    capacity: int
    bytes: int


class StateBudget(BaseModel):
    """Carry view owned by a consumer port."""

    model_config = ConfigDict(frozen=True)

    node: str
    port: int
    capacity: int
    bytes: int


class MemoryPlan(BaseModel):
    """Static footprint of a compiled plan, fixed before any data flows."""

    model_config = ConfigDict(frozen=True)

    edges: list[EdgeBudget] = Field(default_factory=list)
    states: list[StateBudget] = Field(default_factory=list)

    @property
    def buffer_bytes(self) -> int:
        """Bytes of distinct buffers; multicast branches share their producer's."""
        seen: dict[int, int] = {}
        for e in self.edges:
            seen[e.buffer] = e.bytes
        return sum(seen.values())

    @property
    def state_bytes(self) -> int:
        return sum(s.bytes for s in self.states)

    @property
    def total_bytes(self) -> int:
        return self.buffer_bytes + self.state_bytes

    def state_by_node(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.states:
            out[s.node] = out.get(s.node, 0) + s.bytes
        return out


def plan_memory(graph: QueryGraph, layout: Layout, config: Optional[CadenceConfig] = None) -> MemoryPlan:
    """Size every buffer and carry view, assigning one buffer id per producing node."""
    config = config or get_config()
    buffer_ids: dict[str, int] = {}
    edges: list[EdgeBudget] = []
    for edge in graph.edges:
        producer = graph.producer(edge.src)
        buffer_id = buffer_ids.setdefault(producer, len(buffer_ids))
        edge.buffer = buffer_id
        cap = capacity(edge.descriptor, edge.dimension, edge.label)
        edges.append(
            EdgeBudget(
                edge=edge.label,
                notation=edge.notation(),
                buffer=buffer_id,
                capacity=cap,
                bytes=cap * slot_bytes(edge.descriptor, config.payload_bytes),
            )
        )

    states: list[StateBudget] = []
    for name, specs in layout.views.items():
        for spec in specs:
            if spec.aliased:
                continue
            desc = graph.nodes[spec.producer].shape.descriptor
            cap = capacity(desc, spec.length, f"{spec.producer}->{name}")
            states.append(
                StateBudget(node=name, port=spec.port, capacity=cap, bytes=cap * slot_bytes(desc, config.payload_bytes))
            )

    plan = MemoryPlan(edges=edges, states=states)
    budget = config.memory_budget_bytes
    if budget is not None and plan.total_bytes > budget:
        raise PlanningError(
            f"plan needs {plan.total_bytes} bytes, over the memory budget of {budget} bytes; "
            "shrink window parameters or raise the budget"
        )
    logger.info(f"Memory plan: {plan.buffer_bytes} buffer bytes + {plan.state_bytes} state bytes")
    return plan


def plan_report(graph: QueryGraph, memory: MemoryPlan, trace: bool = False) -> str:
    """Deterministic one-line-per-edge plan dump."""
    lines: list[str] = []
    if trace:
        lines.append("# locality trace")
        lines.extend(str(step) for step in graph.trace_log)
        lines.append("# plan")
    for e in memory.edges:
        lines.append(f"{e.edge} {e.notation} capacity={e.capacity} bytes={e.bytes} buffer={e.buffer}")
    for s in memory.states:
        lines.append(f"state {s.node}[{s.port}] capacity={s.capacity} bytes={s.bytes}")
    lines.append(f"total bytes={memory.total_bytes}")
    return "\n".join(lines)

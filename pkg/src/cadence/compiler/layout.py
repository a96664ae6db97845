# src/cadence/compiler/layout.py
from __future__ import annotations

import logging
import math

from pydantic import BaseModel, ConfigDict, Field

from ..errors import PlanningError
from ..operators import Interval
from .graph import QueryGraph
from .lineage import LineageMap

logger = logging.getLogger(__name__)


class ViewSpec(BaseModel):
    """How one consumer port sees its producer's buffer.

    With ``carry == 0`` the view is the producer window itself. Otherwise the
    consumer owns a longer window that keeps ``carry`` ms of earlier producer
    output ahead of the current producer window.
    """

    model_config = ConfigDict(frozen=True)

    consumer: str
    port: int
    producer: str
    length: int = Field(description="View length in ms")
    carry: int = Field(description="History kept beyond the producer window (ms)")

    @property
    def aliased(self) -> bool:
        return self.carry == 0


class Layout(BaseModel):
    """Where every buffer sits at step k: window end ``dimension * k + end``."""

    model_config = ConfigDict(frozen=True)

    dimension: dict[str, int]
    end: dict[str, int]
    views: dict[str, list[ViewSpec]]
    ready: dict[str, int]

    def window(self, node: str, k: int) -> Interval:
        d = self.dimension[node]
        e = d * k + self.end[node]
        return Interval(start=e - d, end=e)

    @property
    def warmup_steps(self) -> int:
        return max(self.ready.values(), default=0)


def plan_layout(graph: QueryGraph, lineage: LineageMap) -> Layout:
    """Position every buffer so each consumer's lineage falls inside what it can see.

    Runs from the sink toward the sources: a producer's window end is the
    furthest point any consumer reads at step 0, rounded up onto its grid.
    """
    sink = graph.sink
    dimension: dict[str, int] = {}
    end: dict[str, int] = {}

    sink_desc = graph.nodes[sink].shape.descriptor
    dimension[sink] = graph.dimension(sink)
    end[sink] = sink_desc.align_up(sink_desc.offset) + dimension[sink]

    reads: dict[tuple[str, int], tuple[Interval, Interval]] = {}
    for name in reversed(graph.order):
        node = graph.nodes[name]
        if node.is_multicast:
            continue
        if name != sink:
            dimension[name] = graph.dimension(name)
            his = []
            for consumer, port in graph.consumers(name):
                span = lineage.spans[consumer][port]
                dc, ec = dimension[consumer], end[consumer]
                at0 = span.apply(Interval(start=ec - dc, end=ec))
                at1 = span.apply(Interval(start=ec, end=ec + dc))
                if at1.start - at0.start != dimension[name] or at1.end - at0.end != dimension[name]:
                    raise PlanningError(
                        f"{consumer} reads {name} at a rate that does not match its window dimension "
                        f"{dimension[name]} ms"
                    )
                reads[(consumer, port)] = (at0, at1)
                his.append(at0.end)
            end[name] = node.shape.descriptor.align_up(max(his))

    views: dict[str, list[ViewSpec]] = {}
    ready: dict[str, int] = {}
    for name in graph.order:
        node = graph.nodes[name]
        if node.is_multicast:
            continue
        specs: list[ViewSpec] = []
        ready[name] = 0
        for port, src in enumerate(node.inputs):
            producer = graph.producer(src)
            desc = graph.nodes[producer].shape.descriptor
            dp, ep = dimension[producer], end[producer]
            at0, _ = reads[(name, port)]
            start = min(desc.align_down(at0.start), ep - dp)
            spec = ViewSpec(consumer=name, port=port, producer=producer, length=ep - start, carry=ep - start - dp)
            specs.append(spec)
            ready[name] = max(ready[name], ready[producer] + math.ceil(spec.carry / dp))
        views[name] = specs

    layout = Layout(dimension=dimension, end=end, views=views, ready=ready)
    logger.debug(f"Layout needs {layout.warmup_steps} warm-up step(s) after a jump")
    return layout

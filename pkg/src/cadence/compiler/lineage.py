# src/cadence/compiler/lineage.py
from __future__ import annotations

import logging
from typing import Optional

from ..errors import PlanningError
from ..operators import AffineSpan, Interval
from .graph import QueryGraph

logger = logging.getLogger(__name__)


class LineageMap:
    """Per-node affine input spans, composed on demand from the sink back to the sources."""

    def __init__(self, graph: QueryGraph, spans: dict[str, list[AffineSpan]]) -> None:
        self._graph = graph
        self.spans = spans

    def resolve_all(self, sink_interval: Interval) -> dict[str, Interval]:
        """Interval every node must produce so the sink can produce ``sink_interval``.

        A node read by several consumers needs the hull of their requests.
        """
        graph = self._graph
        needed: dict[str, Interval] = {graph.sink: sink_interval}
        for name in reversed(graph.order):
            out = needed.get(name)
            if out is None:
                continue
            node = graph.nodes[name]
            for port, src in enumerate(node.inputs):
                span = self.spans[name][port]
                required = span.apply(out)
                previous: Optional[Interval] = needed.get(src)
                needed[src] = required.hull(previous)
        return needed

    def resolve(self, sink_interval: Interval) -> dict[str, Interval]:
        """Source intervals the sink interval depends on."""
        needed = self.resolve_all(sink_interval)
        return {s: needed[s] for s in self._graph.sources if s in needed}

    def source_affine(self, sink_dimension: int, sink_origin: int) -> dict[str, tuple[int, int, int]]:
        """Per source, (slope, lo0, hi0) with lo(k) = slope*k + lo0 for sink window k.

        Sink window k covers ``[sink_origin + k*D, sink_origin + (k+1)*D)``.
        """
        d = sink_dimension
        at0 = self.resolve(Interval(start=sink_origin, end=sink_origin + d))
        at1 = self.resolve(Interval(start=sink_origin + d, end=sink_origin + 2 * d))
        result: dict[str, tuple[int, int, int]] = {}
        for src, iv0 in at0.items():
            iv1 = at1[src]
            slope = iv1.start - iv0.start
            if slope != iv1.end - iv0.end or slope <= 0:
                raise PlanningError(f"lineage of source {src} is not a fixed-width sliding interval")
            result[src] = (slope, iv0.start, iv0.end)
        return result


def derive_lineage(graph: QueryGraph) -> LineageMap:
    """Collect each operator's lineage span per input at its traced dimension."""
    spans: dict[str, list[AffineSpan]] = {}
    for name in graph.order:
        node = graph.nodes[name]
        if not node.inputs:
            continue
        shapes = [e.shape for e in graph.in_edges(name)]
        dim = graph.dimension(name)
        spans[name] = [node.op.lineage(port, shapes, dim) for port in range(len(node.inputs))]
    logger.debug(f"Derived lineage for {len(spans)} operator(s)")
    return LineageMap(graph, spans)

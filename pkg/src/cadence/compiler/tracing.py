# src/cadence/compiler/tracing.py
from __future__ import annotations

import logging
import math
from typing import Optional

from ..config import CadenceConfig, get_config
from ..errors import PlanningError
from .graph import QueryGraph, TraceStep

logger = logging.getLogger(__name__)


def _adjust_node(graph: QueryGraph, name: str, sweep: int, cap: int) -> Optional[TraceStep]:
    node = graph.nodes[name]
    ins = graph.in_edges(name)
    outs = graph.out_edges(name)
    if not ins:
        return None

    in_dims = [e.dimension for e in ins]
    out_dims = [e.dimension for e in outs]
    new_in, new_out = node.op.unify_dimensions(in_dims, out_dims, [e.shape for e in ins], node.shape)
    if new_in == in_dims and new_out == out_dims:
        return None

    if max([*new_in, *new_out]) > cap:
        periods = sorted({e.descriptor.period for e in (*ins, *outs)})
        raise PlanningError(
            f"locality tracing at {name} exceeded the dimension cap of {cap} ms; "
            f"periods {periods} and window parameters have no practical common multiple"
        )

    for edge, dim in zip(ins, new_in, strict=True):
        edge.dimension = dim
    for edge, dim in zip(outs, new_out, strict=True):
        edge.dimension = dim
    step = TraceStep(sweep=sweep, node=name, before=(*in_dims, *out_dims), after=(*new_in, *new_out))
    logger.info(str(step))
    return step


def locality_trace(graph: QueryGraph, config: Optional[CadenceConfig] = None) -> QueryGraph:
    """Unify every node's input and output FWindow dimensions to a fixed point.

    Sweeps run from the sink toward the sources; each mismatched node gets its
    edges set to the least common multiple of their dimensions. Running it on
    an already traced graph changes nothing.
    """
    config = config or get_config()
    cap = config.dimension_cap_ms

    if config.dimension_floor_ms > 0:
        sink = graph.sink_edge
        floor = math.lcm(sink.dimension, config.dimension_floor_ms)
        if floor != sink.dimension:
            logger.info(f"Sink dimension raised from {sink.dimension} to floor {floor}")
            sink.dimension = floor

    max_sweeps = max(1, len(graph.nodes) ** 2)
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for name in reversed(graph.order):
            step = _adjust_node(graph, name, sweep, cap)
            if step is not None:
                graph.trace_log.append(step)
                changed = True
        if not changed:
            graph.traced = True
            logger.debug(f"Locality tracing reached a fixed point after {sweep} sweep(s)")
            return graph

    raise PlanningError(f"locality tracing did not converge within {max_sweeps} sweeps")

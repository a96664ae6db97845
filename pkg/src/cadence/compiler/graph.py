# src/cadence/compiler/graph.py
from __future__ import annotations

import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..errors import PlanningError
from ..model import StreamDescriptor
from ..operators import EdgeShape, Multicast, Operator, Source
from .query import QueryDescription

logger = logging.getLogger(__name__)

SINK = "<sink>"


class Node(BaseModel):
    """Operator instance placed in the graph."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    op: Operator
    inputs: tuple[str, ...] = ()
    shape: EdgeShape = Field(description="Shape of the node's output stream")

    @property
    def kind(self) -> str:
        return self.op.kind

    @property
    def is_source(self) -> bool:
        return isinstance(self.op, Source)

    @property
    def is_multicast(self) -> bool:
        return isinstance(self.op, Multicast)


class Edge(BaseModel):
    """Directed stream edge; ``dimension`` is rewritten by locality tracing."""

    src: str
    dst: str
    port: int = 0
    shape: EdgeShape
    dimension: int
    buffer: Optional[int] = Field(default=None, description="Buffer id assigned by the memory planner")

    @property
    def descriptor(self) -> StreamDescriptor:
        return self.shape.descriptor

    @property
    def label(self) -> str:
        return f"{self.src}->{self.dst}"

    def notation(self) -> str:
        return f"{self.descriptor.label()}[{self.dimension}]"


class TraceStep(BaseModel):
    """One locality-tracing adjustment of a node's edge dimensions."""

    model_config = ConfigDict(frozen=True)

    sweep: int
    node: str
    before: tuple[int, ...]
    after: tuple[int, ...]

    def __str__(self) -> str:
        before = "{" + ", ".join(str(d) for d in self.before) + "}"
        after = sorted(set(self.after))
        shown = str(after[0]) if len(after) == 1 else "{" + ", ".join(str(d) for d in self.after) + "}"
        return f"{self.node}: dims {before} -> {shown}"


class QueryGraph:
    """Operator DAG with per-edge descriptors and FWindow dimensions."""

    def __init__(self, nodes: list[Node], edges: list[Edge], sink: str) -> None:
        self.nodes: dict[str, Node] = {n.name: n for n in nodes}
        self.order: list[str] = [n.name for n in nodes]
        self.edges = edges
        self.sink = sink
        self.trace_log: list[TraceStep] = []
        self.traced = False

    def in_edges(self, name: str) -> list[Edge]:
        return sorted((e for e in self.edges if e.dst == name), key=lambda e: e.port)

    def out_edges(self, name: str) -> list[Edge]:
        return [e for e in self.edges if e.src == name]

    @property
    def sink_edge(self) -> Edge:
        return next(e for e in self.edges if e.dst == SINK)

    @property
    def sources(self) -> list[str]:
        return [n for n in self.order if self.nodes[n].is_source]

    def consumers(self, name: str) -> list[tuple[str, int]]:
        """(consumer, port) pairs reading ``name``'s buffer, looking through multicasts."""
        found: list[tuple[str, int]] = []
        for edge in self.out_edges(name):
            if edge.dst == SINK:
                continue
            if self.nodes[edge.dst].is_multicast:
                found.extend(self.consumers(edge.dst))
            else:
                found.append((edge.dst, edge.port))
        return found

    def producer(self, name: str) -> str:
        """The node owning the buffer ``name`` exposes."""
        node = self.nodes[name]
        while node.is_multicast:
            node = self.nodes[node.inputs[0]]
        return node.name

    def dimension(self, name: str) -> int:
        """Output dimension of a node (all its output edges agree once traced)."""
        return self.out_edges(name)[0].dimension

    def dimensions(self) -> dict[str, int]:
        return {e.label: e.dimension for e in self.edges}

    def __repr__(self) -> str:
        return f"QueryGraph({len(self.nodes)} nodes, {len(self.edges)} edges, sink={self.sink})"


# ---------- Construction ----------


def _topological_order(query: QueryDescription) -> list[str]:
    """Kahn's algorithm, breaking ties by declaration order."""
    pending = {n.name: len(n.inputs) for n in query.nodes}
    consumers: dict[str, list[str]] = {n.name: [] for n in query.nodes}
    for n in query.nodes:
        for src in n.inputs:
            consumers[src].append(n.name)

    position = {n.name: i for i, n in enumerate(query.nodes)}
    ready = [n.name for n in query.nodes if pending[n.name] == 0]
    order: list[str] = []
    while ready:
        ready.sort(key=position.__getitem__)
        name = ready.pop(0)
        order.append(name)
        for c in consumers[name]:
            pending[c] -= 1
            if pending[c] == 0:
                ready.append(c)

    if len(order) != len(query.nodes):
        stuck = sorted(name for name, count in pending.items() if count > 0)
        raise PlanningError(f"query graph has a cycle through {', '.join(stuck)}")
    return order


def _live_nodes(query: QueryDescription) -> set[str]:
    live: set[str] = set()
    stack = [query.sink]
    while stack:
        name = stack.pop()
        if name in live:
            continue
        live.add(name)
        stack.extend(query.node(name).inputs)
    return live


def build_graph(query: QueryDescription) -> QueryGraph:
    """Validate a query description and lay it out as a DAG of FWindow edges.

    Every edge starts with a dimension equal to its stream period.
    """
    names = [n.name for n in query.nodes]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise PlanningError(f"duplicate node names: {', '.join(dupes)}")
    known = set(names)
    if query.sink not in known:
        raise PlanningError(f"sink '{query.sink}' is not a declared node")

    for spec in query.nodes:
        for src in spec.inputs:
            if src not in known:
                raise PlanningError(f"{spec.name}: unknown input '{src}'")
        if len(spec.inputs) != spec.op.arity:
            raise PlanningError(f"{spec.name}: {spec.op.kind} takes {spec.op.arity} input(s), got {len(spec.inputs)}")

    order = _topological_order(query)
    live = _live_nodes(query)
    for name in order:
        if name not in live:
            logger.warning(f"Node {name} does not reach the sink and is dropped")
    order = [n for n in order if n in live]

    fanout: dict[str, int] = {n: 0 for n in order}
    for name in order:
        for src in query.node(name).inputs:
            fanout[src] += 1
    for name in order:
        spec = query.node(name)
        if isinstance(spec.op, Multicast):
            if name == query.sink:
                raise PlanningError(f"{name}: a multicast cannot be the query sink")
            if fanout[name] < 2:
                logger.warning(f"Multicast {name} has {fanout[name]} consumer(s)")
        elif fanout[name] > 1:
            raise PlanningError(f"{name}: output feeds {fanout[name]} operators; fan-out needs a multicast")
    if fanout[query.sink] > 0:
        raise PlanningError(f"sink '{query.sink}' feeds other operators")

    nodes: list[Node] = []
    shapes: dict[str, EdgeShape] = {}
    paths: dict[str, str] = {}
    for name in order:
        spec = query.node(name)
        paths[name] = f"{paths[spec.inputs[0]]} -> {name}" if spec.inputs else name
        try:
            shape = spec.op.describe([shapes[src] for src in spec.inputs])
        except PlanningError as e:
            raise PlanningError(f"{paths[name]}: {e}") from e
        shapes[name] = shape
        nodes.append(Node(name=name, op=spec.op, inputs=spec.inputs, shape=shape))

    edges: list[Edge] = []
    for node in nodes:
        for port, src in enumerate(node.inputs):
            shape = shapes[src]
            edges.append(Edge(src=src, dst=node.name, port=port, shape=shape, dimension=shape.descriptor.period))
    sink_shape = shapes[query.sink]
    edges.append(Edge(src=query.sink, dst=SINK, shape=sink_shape, dimension=sink_shape.descriptor.period))

    graph = QueryGraph(nodes, edges, query.sink)
    logger.debug(f"Built {graph!r}")
    return graph

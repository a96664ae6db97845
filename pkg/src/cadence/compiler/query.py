# src/cadence/compiler/query.py
from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Sequence
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..errors import PlanningError
from ..model import StreamDescriptor
from ..operators import (
    Aggregate,
    AlterDuration,
    AlterPeriod,
    Chop,
    ClipJoin,
    EdgeShape,
    Interval,
    Join,
    JoinMode,
    Multicast,
    Operator,
    Reducer,
    Select,
    Shift,
    Source,
    Transform,
    Where,
    WhereShape,
)

logger = logging.getLogger(__name__)


class NodeSpec(BaseModel):
    """One declared node: an operator and the names of the nodes feeding it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    op: Operator
    inputs: tuple[str, ...] = ()


class QueryDescription(BaseModel):
    """Declarative query: nodes in declaration order plus the sink node's name."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: tuple[NodeSpec, ...]
    sink: str = Field(description="Name of the node whose output is the query result")

    def node(self, name: str) -> NodeSpec:
        for spec in self.nodes:
            if spec.name == name:
                return spec
        raise PlanningError(f"query has no node named '{name}'")

    @property
    def sources(self) -> list[NodeSpec]:
        return [n for n in self.nodes if isinstance(n.op, Source)]


class Query:
    """Fluent builder for a QueryDescription.

    Example:
        q = Query()
        ecg = q.source("ecg", StreamDescriptor(period=2))
        out = ecg.select(lambda v: v * 2).tumbling_window(100).mean()
        description = q.build(out)
    """

    def __init__(self) -> None:
        self._nodes: dict[str, NodeSpec] = {}
        self._counters: Counter[str] = Counter()

    def _add(self, op: Operator, inputs: Sequence[Stream], name: Optional[str] = None) -> Stream:
        for stream in inputs:
            if stream.query is not self:
                raise PlanningError(f"stream '{stream.name}' belongs to a different query")
        if name is None:
            self._counters[op.kind] += 1
            name = f"{op.kind}_{self._counters[op.kind]}"
        if name in self._nodes:
            raise PlanningError(f"duplicate node name '{name}'")
        self._nodes[name] = NodeSpec(name=name, op=op, inputs=tuple(s.name for s in inputs))
        return Stream(self, name)

    def source(
        self, name: str, descriptor: Union[StreamDescriptor, tuple[int, int]], max_duration: Optional[int] = None
    ) -> Stream:
        if isinstance(descriptor, tuple):
            descriptor = StreamDescriptor(offset=descriptor[0], period=descriptor[1])
        return self._add(Source(descriptor=descriptor, max_duration=max_duration), [], name=name)

    def shape_of(self, name: str) -> EdgeShape:
        """Output shape of a declared node, derived from its inputs."""
        spec = self._nodes[name]
        return spec.op.describe([self.shape_of(src) for src in spec.inputs])

    def build(self, sink: Stream) -> QueryDescription:
        if sink.name not in self._nodes:
            raise PlanningError(f"sink '{sink.name}' is not part of this query")
        return QueryDescription(nodes=tuple(self._nodes.values()), sink=sink.name)


class Stream:
    """Handle on one node of a Query under construction."""

    def __init__(self, query: Query, name: str) -> None:
        self.query = query
        self.name = name

    @property
    def shape(self) -> EdgeShape:
        return self.query.shape_of(self.name)

    @property
    def descriptor(self) -> StreamDescriptor:
        return self.shape.descriptor

    def _then(self, op: Operator, *others: Stream, name: Optional[str] = None) -> Stream:
        return self.query._add(op, [self, *others], name=name)

    # ---------- Per-event operators ----------

    def select(
        self, fn: Callable[..., Any], width: Optional[int] = None, with_sync: bool = False, name: Optional[str] = None
    ) -> Stream:
        return self._then(Select(fn=fn, width=width, with_sync=with_sync), name=name)

    def where(self, pred: Callable[..., Any], with_sync: bool = False, name: Optional[str] = None) -> Stream:
        return self._then(Where(pred=pred, with_sync=with_sync), name=name)

    def shift(self, delta: int, name: Optional[str] = None) -> Stream:
        return self._then(Shift(delta=delta), name=name)

    def alter_period(self, period: int, name: Optional[str] = None) -> Stream:
        return self._then(AlterPeriod(period=period), name=name)

    def alter_duration(self, duration: int, name: Optional[str] = None) -> Stream:
        return self._then(AlterDuration(duration=duration), name=name)

    def chop(self, boundary: int, name: Optional[str] = None) -> Stream:
        return self._then(Chop(boundary=boundary), name=name)

    # ---------- Windowed operators ----------

    def aggregate(self, window: int, stride: int, fn: Reducer = "sum", name: Optional[str] = None) -> Stream:
        return self._then(Aggregate(window=window, stride=stride, fn=fn), name=name)

    def tumbling_window(self, window: int) -> WindowedStream:
        return WindowedStream(self, window, window)

    def sliding_window(self, window: int, stride: int) -> WindowedStream:
        return WindowedStream(self, window, stride)

    def transform(
        self,
        slice_ms: int,
        fn: Callable[..., tuple[Any, Any]],
        history: int = 0,
        lookahead: int = 0,
        name: Optional[str] = None,
    ) -> Stream:
        return self._then(Transform(slice_ms=slice_ms, fn=fn, history=history, lookahead=lookahead), name=name)

    def where_shape(
        self, matches: Sequence[Interval], mode: Literal["drop", "keep"] = "drop", name: Optional[str] = None
    ) -> Stream:
        return self._then(WhereShape(matches=tuple(matches), mode=mode), name=name)

    # ---------- Multi-stream operators ----------

    def join(
        self,
        other: Stream,
        mode: Union[JoinMode, str] = JoinMode.INNER,
        combine: Optional[Callable[[Any, Any], Any]] = None,
        width: Optional[int] = None,
        name: Optional[str] = None,
    ) -> Stream:
        return self._then(Join(mode=JoinMode(mode), combine=combine, width=width), other, name=name)

    def clip_join(self, other: Stream, name: Optional[str] = None) -> Stream:
        return self._then(ClipJoin(), other, name=name)

    def multicast(self, fn: Callable[[Stream], Stream], name: Optional[str] = None) -> Stream:
        """Share this stream with every use inside ``fn`` and return fn's result."""
        shared = self._then(Multicast(), name=name)
        return fn(shared)

    def __repr__(self) -> str:
        return f"Stream({self.name})"


class WindowedStream:
    """Pending window over a stream; pick a reducer to get a Stream back."""

    def __init__(self, stream: Stream, window: int, stride: int) -> None:
        self.stream = stream
        self.window = window
        self.stride = stride

    def reduce(self, fn: Reducer, name: Optional[str] = None) -> Stream:
        return self.stream.aggregate(self.window, self.stride, fn, name=name)

    def sum(self, name: Optional[str] = None) -> Stream:
        return self.reduce("sum", name)

    def mean(self, name: Optional[str] = None) -> Stream:
        return self.reduce("mean", name)

    def max(self, name: Optional[str] = None) -> Stream:
        return self.reduce("max", name)

    def min(self, name: Optional[str] = None) -> Stream:
        return self.reduce("min", name)

    def count(self, name: Optional[str] = None) -> Stream:
        return self.reduce("count", name)

    def std(self, name: Optional[str] = None) -> Stream:
        return self.reduce("std", name)

# src/cadence/runtime/executor.py
from __future__ import annotations

import logging
import time
from collections.abc import Iterator, Mapping, Sequence
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field
from pydantic.alias_generators import to_camel

from ..compiler import CompiledPlan, QueryDescription, compile_query
from ..config import CadenceConfig, get_config
from ..errors import DataError, UsageError
from ..model import BufferPool, EventBatch, FWindow
from ..operators import ClipJoin, Interval, Join, JoinMode
from .availability import AvailabilityIndex
from .sink import MemorySink
from .sources import SourceData

logger = logging.getLogger(__name__)


class Engine(str, Enum):
    EAGER = "eager"
    TARGETED = "targeted"


class ExecutionStats(BaseModel):
    """Per-run counters; serialises with camelCase keys."""

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    windows_processed: dict[str, int] = Field(default_factory=dict, description="Kernel runs per node")
    sink_windows_processed: int = 0
    windows_skipped: int = 0
    warmup_windows: int = 0
    events_in: int = 0
    events_out: int = 0
    wall_time: float = Field(default=0.0, description="Seconds spent in the step loop")
    steady_state_allocations: int = 0
    peak_buffer_bytes: int = Field(default=0, description="Bytes held by FWindow buffers and carry views")
    total_windows: int = 0

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)


class ExecutionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    events: EventBatch
    stats: ExecutionStats
    checksum: str


SourceMap = Mapping[str, SourceData]


# ---------- Skip expressions ----------


class _Need:
    """Sink step k can only produce output if this source has data in its lineage at k."""

    def __init__(self, index: AvailabilityIndex, slope: int, lo0: int, hi0: int) -> None:
        self.index = index
        self.slope = slope
        self.lo0 = lo0
        self.hi0 = hi0

    def candidate(self, k: int) -> Optional[int]:
        while True:
            seg = self.index.next_segment(self.slope * k + self.lo0)
            if seg is None:
                return None
            if seg.start < self.slope * k + self.hi0:
                return k
            k = max(k + 1, (seg.start - self.hi0) // self.slope + 1)


class _All:
    def __init__(self, *children: _Expr) -> None:
        self.children = children

    def candidate(self, k: int) -> Optional[int]:
        while True:
            found = [c.candidate(k) for c in self.children]
            if any(f is None for f in found):
                return None
            best = max(f for f in found if f is not None)
            if best == k:
                return k
            k = best


class _Any:
    def __init__(self, *children: _Expr) -> None:
        self.children = children

    def candidate(self, k: int) -> Optional[int]:
        found = [f for f in (c.candidate(k) for c in self.children) if f is not None]
        return min(found) if found else None


_Expr = Union[_Need, _All, _Any]


# ---------- Runner ----------


class _Runner:
    """Buffers, views and memoised step evaluation for one execution of a plan."""

    def __init__(self, plan: CompiledPlan, sources: SourceMap, config: CadenceConfig) -> None:
        self.plan = plan
        self.graph = plan.graph
        self.layout = plan.layout
        self.config = config
        self.sources = self._bind_sources(sources)
        self.k_start, self.k_end = self._span()

        self.pool = BufferPool()
        self.buffers: dict[str, FWindow] = {}
        self.views: dict[tuple[str, int], FWindow] = {}
        self.last_step: dict[str, Optional[int]] = {}
        self.processed: dict[str, int] = {}
        self.events_in = 0

        for name in self.graph.order:
            node = self.graph.nodes[name]
            if node.is_multicast:
                continue
            first = self.layout.window(name, self.k_start)
            self.buffers[name] = FWindow(
                node.shape.descriptor, self.layout.dimension[name], first.start, pool=self.pool, name=name
            )
            self.last_step[name] = None
            self.processed[name] = 0
            for spec in self.layout.views[name]:
                if spec.aliased:
                    continue
                producer = self.graph.nodes[spec.producer].shape.descriptor
                end = self.layout.window(spec.producer, self.k_start).end
                self.views[(name, spec.port)] = FWindow(
                    producer, spec.length, end - spec.length, pool=self.pool, name=f"{name}[{spec.port}]"
                )
        self.pool.mark_steady()
        logger.debug(f"Acquired {self.pool.allocations} buffers ({self.pool.bytes_allocated} bytes)")

    def _bind_sources(self, sources: SourceMap) -> dict[str, SourceData]:
        bound: dict[str, SourceData] = {}
        for name in self.graph.sources:
            data = sources.get(name)
            if data is None:
                raise DataError(f"no data supplied for source '{name}'")
            want = self.graph.nodes[name].shape.descriptor
            if not want.same_grid(data.descriptor):
                raise DataError(
                    f"source '{name}' data is on grid {data.descriptor.label()}, the query expects {want.label()}"
                )
            bound[name] = data
        return bound

    def _span(self) -> tuple[int, int]:
        """First and last sink step that can see any source data."""
        starts: list[int] = []
        ends: list[int] = []
        affine = self.source_affine()
        for name, data in self.sources.items():
            span = data.data_span
            if span is None:
                continue
            d, e = self.layout.dimension[name], self.layout.end[name]
            starts.append((span.start - e) // d + 1)
            slope, lo0, _ = affine[name]
            ends.append(-((lo0 - span.end) // slope) - 1)
        if not starts:
            return 0, -1
        return min(starts), max(ends)

    def source_affine(self) -> dict[str, tuple[int, int, int]]:
        sink_start = self.layout.window(self.graph.sink, 0).start
        return self.plan.lineage.source_affine(self.layout.dimension[self.graph.sink], sink_start)

    @property
    def total_windows(self) -> int:
        return max(0, self.k_end - self.k_start + 1)

    # ---------- Step evaluation ----------

    def _view(self, consumer: str, port: int) -> FWindow:
        spec = self.layout.views[consumer][port]
        window = self.buffers[spec.producer]
        if spec.aliased:
            return window
        view = self.views[(consumer, port)]
        view.advance(window.end - spec.length)
        view.load_tail(window)
        return view

    def pull(self, name: str, k: int) -> FWindow:
        """Evaluate ``name`` at step k, evaluating each upstream node at most once per step."""
        window = self.buffers[name]
        if self.last_step[name] == k:
            return window

        node = self.graph.nodes[name]
        window.slide(self.layout.window(name, k).start)
        if node.is_source:
            self.events_in += self.sources[name].load(window)
        else:
            for spec in self.layout.views[name]:
                self.pull(spec.producer, k)
            views = [self._view(name, port) for port in range(len(node.inputs))]
            node.op.compute(views, window)
        if self.config.check_invariants:
            window.validate()

        self.last_step[name] = k
        self.processed[name] += 1
        return window

    def step(self, k: int) -> FWindow:
        return self.pull(self.graph.sink, k)

    # ---------- Skipping ----------

    def skip_expression(self) -> Optional[_Expr]:
        affine = self.source_affine()

        def build(name: str) -> Optional[_Expr]:
            node = self.graph.nodes[name]
            if node.is_source:
                if name not in affine:
                    return None
                slope, lo0, hi0 = affine[name]
                return _Need(self.sources[name].availability, slope, lo0, hi0)
            op = node.op
            if isinstance(op, Join):
                left, right = build(node.inputs[0]), build(node.inputs[1])
                if op.mode is JoinMode.INNER:
                    return None if left is None or right is None else _All(left, right)
                if op.mode is JoinMode.LEFT:
                    return left
                if left is None or right is None:
                    return left or right
                return _Any(left, right)
            if isinstance(op, ClipJoin):
                return build(node.inputs[0])
            return build(node.inputs[0])

        return build(self.graph.sink)


def _targets(runner: _Runner, expr: Optional[_Expr]) -> Iterator[int]:
    """Sink steps whose lineage reaches source data, in increasing order."""
    k = runner.k_start
    while expr is not None and k <= runner.k_end:
        target = expr.candidate(k)
        if target is None or target > runner.k_end:
            return
        if target > k:
            logger.debug(f"Skipping sink steps [{k}, {target})")
        yield target
        k = target + 1


def _finish(runner: _Runner, sink: MemorySink, sink_done: int, warmup: int, started: float) -> ExecutionStats:
    stats = ExecutionStats(
        windows_processed=dict(runner.processed),
        sink_windows_processed=sink_done,
        windows_skipped=runner.total_windows - sink_done,
        warmup_windows=warmup,
        events_in=runner.events_in,
        events_out=sink.count,
        wall_time=time.perf_counter() - started,
        steady_state_allocations=runner.pool.steady_state_allocations,
        peak_buffer_bytes=runner.pool.bytes_allocated,
        total_windows=runner.total_windows,
    )
    return stats


def run_eager(
    plan: CompiledPlan, sources: SourceMap, sink: Optional[MemorySink] = None, config: Optional[CadenceConfig] = None
) -> ExecutionStats:
    """Evaluate every sink step of the queried span in order."""
    config = config or get_config()
    runner = _Runner(plan, sources, config)
    sink = sink if sink is not None else MemorySink(plan.graph.nodes[plan.sink].shape.descriptor.width)
    logger.info(f"Eager run over steps [{runner.k_start}, {runner.k_end}] of {plan.sink_dimension} ms")

    started = time.perf_counter()
    for k in range(runner.k_start, runner.k_end + 1):
        sink.consume(runner.step(k))
    stats = _finish(runner, sink, runner.total_windows, 0, started)
    logger.info(f"Eager run done: {stats.events_out} events out in {stats.wall_time:.3f}s")
    return stats


def run_targeted(
    plan: CompiledPlan, sources: SourceMap, sink: Optional[MemorySink] = None, config: Optional[CadenceConfig] = None
) -> ExecutionStats:
    """Evaluate only sink steps whose lineage reaches available source data.

    After a jump, the steps just before the target are replayed with their
    output discarded so every carry view holds the same history an eager run
    would have given it.
    """
    config = config or get_config()
    runner = _Runner(plan, sources, config)
    sink = sink if sink is not None else MemorySink(plan.graph.nodes[plan.sink].shape.descriptor.width)
    expr = runner.skip_expression()
    warmup_depth = plan.layout.warmup_steps
    logger.info(
        f"Targeted run over steps [{runner.k_start}, {runner.k_end}] of {plan.sink_dimension} ms, "
        f"warm-up depth {warmup_depth}"
    )

    started = time.perf_counter()
    sink_done = warmup = 0
    last: Optional[int] = None
    for target in _targets(runner, expr):
        first = max(target - warmup_depth, runner.k_start if last is None else last + 1)
        for j in range(first, target):
            runner.step(j)
            warmup += 1
        sink.consume(runner.step(target))
        sink_done += 1
        last = target

    stats = _finish(runner, sink, sink_done, warmup, started)
    logger.info(
        f"Targeted run done: {stats.sink_windows_processed}/{stats.total_windows} windows, "
        f"{stats.events_out} events out in {stats.wall_time:.3f}s"
    )
    return stats


def _as_source_map(sources: Union[SourceMap, Sequence[SourceData]]) -> SourceMap:
    if isinstance(sources, Mapping):
        return sources
    return {s.name: s for s in sources}


def execute(
    query: Union[QueryDescription, CompiledPlan],
    sources: Union[SourceMap, Sequence[SourceData]],
    engine: Union[Engine, str] = Engine.EAGER,
    config: Optional[CadenceConfig] = None,
    collect: bool = True,
) -> ExecutionResult:
    """Compile if needed, run with the chosen engine and collect the sink output.

    With ``collect=False`` only the digest and counters are kept and ``events`` comes back empty.
    """
    config = config or get_config()
    plan = query if isinstance(query, CompiledPlan) else compile_query(query, config)
    try:
        engine = Engine(engine)
    except ValueError as e:
        raise UsageError(f"unknown engine '{engine}' (expected eager or targeted)") from e

    width = plan.graph.nodes[plan.sink].shape.descriptor.width
    sink = MemorySink(width, retain=collect)
    runner = run_eager if engine is Engine.EAGER else run_targeted
    stats = runner(plan, _as_source_map(sources), sink, config)
    events = sink.events() if collect else EventBatch.empty(width)
    return ExecutionResult(events=events, stats=stats, checksum=sink.checksum)


def targeted_steps(
    plan: CompiledPlan, sources: Union[SourceMap, Sequence[SourceData]], config: Optional[CadenceConfig] = None
) -> list[int]:
    """Sink steps the targeted engine evaluates; every other step of the span is skipped."""
    runner = _Runner(plan, _as_source_map(sources), config or get_config())
    return list(_targets(runner, runner.skip_expression()))


def sink_windows(
    plan: CompiledPlan, sources: Union[SourceMap, Sequence[SourceData]], config: Optional[CadenceConfig] = None
) -> Iterator[tuple[int, FWindow]]:
    """Evaluate every sink step of the span in order, yielding each step with its sink window.

    The window is reused by the next step; copy what you need before advancing.
    """
    runner = _Runner(plan, _as_source_map(sources), config or get_config())
    for k in range(runner.k_start, runner.k_end + 1):
        yield k, runner.step(k)


def sink_interval(plan: CompiledPlan, k: int) -> Interval:
    """Time range covered by sink step k."""
    return plan.layout.window(plan.sink, k)

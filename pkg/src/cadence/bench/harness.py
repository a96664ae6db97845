# src/cadence/bench/harness.py
from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from pydantic.alias_generators import to_camel

from ..compiler import CompiledPlan, Query, QueryDescription, compile_query
from ..config import CadenceConfig, get_config
from ..errors import UsageError
from ..model import StreamDescriptor
from ..operators import Interval
from ..runtime import CsvSink, Engine, MemorySink, SourceData, run_eager, run_targeted
from ..toolkit import ToolkitParams, end_to_end_query, listing_query, single_stream_query
from .generator import Dataset, GenSpec, generate, generate_pair

logger = logging.getLogger(__name__)

TOOLKIT_BENCHES = ("normalize", "passfilter", "fillconst", "fillmean", "resample", "endtoend")
MICRO_BENCHES = ("select", "where", "aggregate", "join", "clipjoin", "chop", "shift")
BENCH_NAMES = TOOLKIT_BENCHES + MICRO_BENCHES
PAIR_BENCHES = frozenset({"endtoend", "join", "clipjoin"})
PLAN_QUERIES = ("listing1", "listing1-sliding", "endtoend", "identity", *TOOLKIT_BENCHES[:-1])

# Sink dimension floor for bench runs unless the configuration sets a larger one
BENCH_DIMENSION_FLOOR_MS = 1000


class _Camel(BaseModel):
    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)


class TrialMetrics(_Camel):
    """One benchmark repetition."""

    bench: str
    engine: str
    trial: int = 0
    events: int = Field(description="Source events read")
    events_out: int = 0
    wall_ms: float
    throughput_events_per_sec: float
    windows_processed: int = Field(description="Sink windows evaluated")
    windows_skipped: int
    total_windows: int = 0
    steady_state_allocations: int
    output_checksum: str


class BenchSummary(_Camel):
    """Mean and population std over the trials of one benchmark."""

    bench: str
    engine: str
    summary: bool = True
    trials: int
    events: int
    events_out: int
    wall_ms_mean: float
    wall_ms_std: float
    throughput_mean: float
    throughput_std: float
    windows_processed: int
    windows_skipped: int
    output_checksum: str
    minutes: Optional[float] = Field(default=None, description="Generated dataset length of a sweep point")


class ParallelSummary(_Camel):
    """Aggregate of independent shards run side by side."""

    bench: str
    engine: str
    summary: bool = True
    shards: int
    events: int
    wall_ms: float
    throughput_events_per_sec: float
    shard_checksums: list[str]


class DetectionScore(_Camel):
    matches: int
    truth: int
    recall: float
    false_positive_fraction: float = Field(description="Matched duration outside the truth over covered duration")


# ---------- Named queries ----------


def _double(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return v * 2.0


def _above_half(v: npt.NDArray[np.float64]) -> npt.NDArray[np.bool_]:
    return v > 0.5


def _micro_query(name: str, descriptors: Mapping[str, StreamDescriptor], params: ToolkitParams) -> QueryDescription:
    q = Query()
    if name in PAIR_BENCHES:
        ecg = q.source("ecg", descriptors["ecg"])
        abp = q.source("abp", descriptors["abp"])
        return q.build(ecg.join(abp) if name == "join" else ecg.clip_join(abp))

    src = q.source("signal", descriptors["signal"])
    p = src.descriptor.period
    if name == "select":
        out = src.select(_double)
    elif name == "where":
        out = src.where(_above_half)
    elif name == "aggregate":
        out = src.tumbling_window(params.window).mean()
    elif name == "chop":
        out = src.tumbling_window(10 * p).mean().chop(p)
    else:
        out = src.shift(3 * p)
    return q.build(out)


def bench_query(
    name: str, descriptors: Mapping[str, StreamDescriptor], params: Optional[ToolkitParams] = None
) -> QueryDescription:
    """Query a benchmark runs; pair benches read ``ecg``/``abp``, the rest ``signal``."""
    params = params or ToolkitParams()
    if name not in BENCH_NAMES:
        raise UsageError(f"unknown bench '{name}' (expected one of: {', '.join(BENCH_NAMES)})")
    if name == "endtoend":
        return end_to_end_query(descriptors["ecg"], descriptors["abp"], params)
    if name in TOOLKIT_BENCHES:
        return single_stream_query(name, descriptors["signal"], params)
    return _micro_query(name, descriptors, params)


def named_query(name: str, params: Optional[ToolkitParams] = None) -> QueryDescription:
    """Built-in queries for plan inspection."""
    params = params or ToolkitParams()
    if name == "listing1":
        return listing_query()
    if name == "listing1-sliding":
        return listing_query(sliding=True)
    if name == "identity":
        q = Query()
        return q.build(q.source("signal", (0, 1)))
    if name == "endtoend":
        return end_to_end_query((0, 2), (0, 8), params)
    if name in TOOLKIT_BENCHES:
        return single_stream_query(name, StreamDescriptor(period=2), params)
    raise UsageError(f"unknown query '{name}' (expected one of: {', '.join(PLAN_QUERIES)})")


def bench_dataset(name: str, spec: GenSpec) -> Dataset:
    return generate_pair(spec) if name in PAIR_BENCHES else generate(spec)


def bench_config(config: Optional[CadenceConfig] = None) -> CadenceConfig:
    config = config or get_config()
    floor = max(config.dimension_floor_ms, BENCH_DIMENSION_FLOOR_MS)
    return config.model_copy(update={"dimension_floor_ms": floor})


# ---------- Trials ----------


def run_trial(
    name: str,
    plan: CompiledPlan,
    sources: Mapping[str, SourceData],
    engine: Union[Engine, str],
    config: CadenceConfig,
    trial: int = 0,
    sink_path: Optional[Path] = None,
) -> tuple[TrialMetrics, MemorySink]:
    """Run one repetition; output is only digested unless ``sink_path`` streams it to CSV."""
    engine = Engine(engine)
    width = plan.graph.nodes[plan.sink].shape.descriptor.width
    sink = CsvSink(sink_path, width) if sink_path is not None else MemorySink(width)
    runner = run_eager if engine is Engine.EAGER else run_targeted
    started = time.perf_counter()
    stats = runner(plan, sources, sink, config)
    wall = time.perf_counter() - started
    metrics = TrialMetrics(
        bench=name,
        engine=engine.value,
        trial=trial,
        events=stats.events_in,
        events_out=stats.events_out,
        wall_ms=wall * 1000.0,
        throughput_events_per_sec=stats.events_in / wall if wall > 0 else 0.0,
        windows_processed=stats.sink_windows_processed,
        windows_skipped=stats.windows_skipped,
        total_windows=stats.total_windows,
        steady_state_allocations=stats.steady_state_allocations,
        output_checksum=sink.checksum,
    )
    return metrics, sink


def summarize(trials: list[TrialMetrics]) -> BenchSummary:
    if not trials:
        raise UsageError("no trials to summarize")
    walls = [t.wall_ms for t in trials]
    rates = [t.throughput_events_per_sec for t in trials]
    first = trials[0]
    return BenchSummary(
        bench=first.bench,
        engine=first.engine,
        trials=len(trials),
        events=first.events,
        events_out=first.events_out,
        wall_ms_mean=statistics.fmean(walls),
        wall_ms_std=statistics.pstdev(walls),
        throughput_mean=statistics.fmean(rates),
        throughput_std=statistics.pstdev(rates),
        windows_processed=first.windows_processed,
        windows_skipped=first.windows_skipped,
        output_checksum=first.output_checksum,
    )


def run_bench(
    name: str,
    sources: Mapping[str, SourceData],
    engine: Union[Engine, str] = Engine.EAGER,
    params: Optional[ToolkitParams] = None,
    trials: Optional[int] = None,
    config: Optional[CadenceConfig] = None,
    sink_path: Optional[Path] = None,
) -> tuple[list[TrialMetrics], BenchSummary, MemorySink]:
    """Compile once, run ``trials`` times; returns per-trial metrics, their summary and the last sink.

    With ``sink_path`` the last trial streams its output events to that CSV file.
    """
    config = bench_config(config)
    trials = trials or config.trials
    descriptors = {n: s.descriptor for n, s in sources.items()}
    plan = compile_query(bench_query(name, descriptors, params), config)

    results: list[TrialMetrics] = []
    sink: Optional[MemorySink] = None
    for i in range(trials):
        path = sink_path if i == trials - 1 else None
        metrics, sink = run_trial(name, plan, sources, engine, config, trial=i, sink_path=path)
        logger.info(f"{name}/{metrics.engine} trial {i}: {metrics.wall_ms:.1f} ms, {metrics.events_out} events out")
        results.append(metrics)
    assert sink is not None
    return results, summarize(results), sink


def run_sweep(
    name: str,
    spec: GenSpec,
    minutes: list[float],
    engine: Union[Engine, str] = Engine.EAGER,
    params: Optional[ToolkitParams] = None,
    trials: Optional[int] = None,
    config: Optional[CadenceConfig] = None,
) -> list[BenchSummary]:
    """Benchmark generated datasets of growing length; one summary per size."""
    if not minutes:
        raise UsageError("--sweep needs at least one dataset size")
    summaries: list[BenchSummary] = []
    for size in minutes:
        if size <= 0:
            raise UsageError(f"sweep sizes must be positive, got {size:g} minutes")
        point = spec.model_copy(update={"minutes": size, "seconds": None})
        _, summary, _ = run_bench(name, bench_dataset(name, point).sources, engine, params, trials, config)
        logger.info(f"{name}/{summary.engine} at {size:g} min: {summary.events} events, {summary.wall_ms_mean:.1f} ms")
        summaries.append(summary.model_copy(update={"minutes": size}))
    return summaries


# ---------- Parallel shards ----------


def _shard(job: tuple[str, str, dict[str, Any], dict[str, Any], dict[str, Any]]) -> dict[str, Any]:
    name, engine, spec_data, params_data, config_data = job
    spec = GenSpec.model_validate(spec_data)
    config = CadenceConfig.model_validate(config_data)
    dataset = bench_dataset(name, spec)
    descriptors = {n: s.descriptor for n, s in dataset.sources.items()}
    plan = compile_query(bench_query(name, descriptors, ToolkitParams.model_validate(params_data)), config)
    metrics, _ = run_trial(name, plan, dataset.sources, engine, config)
    return metrics.model_dump()


def run_parallel(
    name: str,
    spec: GenSpec,
    shards: int,
    engine: Union[Engine, str] = Engine.EAGER,
    params: Optional[ToolkitParams] = None,
    config: Optional[CadenceConfig] = None,
) -> tuple[list[TrialMetrics], ParallelSummary]:
    """Run ``shards`` independent datasets (seeds ``seed``, ``seed+1``, ...) in separate processes."""
    if shards < 1:
        raise UsageError(f"--parallel needs at least 1 shard, got {shards}")
    if name not in BENCH_NAMES:
        raise UsageError(f"unknown bench '{name}'")
    config = bench_config(config)
    params = params or ToolkitParams()
    engine = Engine(engine)
    config_data = config.model_dump(exclude={"slot_bytes", "resolved_output_dir"})
    jobs = [
        (name, engine.value, spec.model_copy(update={"seed": spec.seed + i}).model_dump(exclude={"span_ms"}),
         params.model_dump(), config_data)
        for i in range(shards)
    ]

    started = time.perf_counter()
    with ProcessPoolExecutor(max_workers=shards) as pool:
        results = [TrialMetrics.model_validate(r) for r in pool.map(_shard, jobs)]
    wall = time.perf_counter() - started

    events = sum(r.events for r in results)
    summary = ParallelSummary(
        bench=name,
        engine=engine.value,
        shards=shards,
        events=events,
        wall_ms=wall * 1000.0,
        throughput_events_per_sec=events / wall if wall > 0 else 0.0,
        shard_checksums=[r.output_checksum for r in results],
    )
    logger.info(f"{name}/{engine.value} x{shards}: {summary.throughput_events_per_sec:,.0f} events/s aggregate")
    return results, summary


# ---------- Detection scoring ----------


def score_matches(matches: list[Interval], truth: list[Interval], covered_ms: int) -> DetectionScore:
    """Recall over truth intervals and the share of covered time matched outside any truth interval."""
    found = sum(1 for t in truth if any(m.intersects(t) for m in matches))
    outside = 0
    for m in matches:
        inside = sum(max(0, min(m.end, t.end) - max(m.start, t.start)) for t in truth)
        outside += m.length - inside
    return DetectionScore(
        matches=len(matches),
        truth=len(truth),
        recall=found / len(truth) if truth else 1.0,
        false_positive_fraction=outside / covered_ms if covered_ms else 0.0,
    )


__all__ = [
    "BENCH_NAMES",
    "BenchSummary",
    "DetectionScore",
    "MICRO_BENCHES",
    "PAIR_BENCHES",
    "PLAN_QUERIES",
    "ParallelSummary",
    "TOOLKIT_BENCHES",
    "TrialMetrics",
    "bench_config",
    "bench_dataset",
    "bench_query",
    "named_query",
    "run_bench",
    "run_parallel",
    "run_sweep",
    "run_trial",
    "score_matches",
    "summarize",
]

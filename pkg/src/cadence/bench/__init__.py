# src/cadence/bench/__init__.py
from __future__ import annotations

from .generator import (
    Dataset,
    GenSpec,
    generate,
    generate_pair,
    measured_overlap,
    pair_layout,
    read_intervals_csv,
    truth_path,
    write_dataset,
    write_intervals_csv,
    write_source_csv,
)
from .harness import (
    BENCH_NAMES,
    PLAN_QUERIES,
    BenchSummary,
    DetectionScore,
    ParallelSummary,
    TrialMetrics,
    bench_dataset,
    bench_query,
    named_query,
    run_bench,
    run_parallel,
    run_sweep,
    score_matches,
)

__all__ = [
    "BENCH_NAMES",
    "PLAN_QUERIES",
    "BenchSummary",
    "Dataset",
    "DetectionScore",
    "GenSpec",
    "ParallelSummary",
    "TrialMetrics",
    "bench_dataset",
    "bench_query",
    "generate",
    "generate_pair",
    "measured_overlap",
    "named_query",
    "pair_layout",
    "read_intervals_csv",
    "run_bench",
    "run_parallel",
    "run_sweep",
    "score_matches",
    "truth_path",
    "write_dataset",
    "write_intervals_csv",
    "write_source_csv",
]

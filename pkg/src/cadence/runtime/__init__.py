# src/cadence/runtime/__init__.py
from __future__ import annotations

from .availability import AvailabilityIndex, Segment
from .executor import (
    Engine,
    ExecutionResult,
    ExecutionStats,
    execute,
    run_eager,
    run_targeted,
    sink_interval,
    sink_windows,
    targeted_steps,
)
from .sink import CsvSink, MemorySink, sink_csv
from .sources import IngestReport, SourceData, ingest_csv

__all__ = [
    "AvailabilityIndex",
    "CsvSink",
    "Engine",
    "ExecutionResult",
    "ExecutionStats",
    "IngestReport",
    "MemorySink",
    "Segment",
    "SourceData",
    "execute",
    "ingest_csv",
    "run_eager",
    "run_targeted",
    "sink_csv",
    "sink_interval",
    "sink_windows",
    "targeted_steps",
]

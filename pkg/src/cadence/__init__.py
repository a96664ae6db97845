# src/cadence/__init__.py
from __future__ import annotations

from .compiler import CompiledPlan, Query, QueryDescription, Stream, compile_query, plan_report
from .config import CadenceConfig, get_config, reset_config, set_config
from .dependencies import check_rich, check_typer, get_console
from .errors import (
    CadenceError,
    ContractViolation,
    DataError,
    IngestionError,
    InvariantViolation,
    MonotonicityError,
    OutOfRangeError,
    PlanningError,
    UsageError,
)
from .model import EventBatch, FWindow, StreamDescriptor, descriptor_from_hz
from .runtime import Engine, ExecutionResult, SourceData, execute, ingest_csv, run_eager, run_targeted, sink_csv
from .shapes import MatchParams, ShapeTemplate, cdtw_distance, detect_shapes, line_zero_template
from .toolkit import end_to_end, fill_const, fill_mean, listing_query, normalize, pass_filter, resample

__all__ = [
    # Query building and planning
    "Query",
    "QueryDescription",
    "Stream",
    "CompiledPlan",
    "compile_query",
    "plan_report",
    # Configuration management
    "CadenceConfig",
    "get_config",
    "set_config",
    "reset_config",
    # Dependency management
    "check_rich",
    "check_typer",
    "get_console",
    # Errors
    "CadenceError",
    "ContractViolation",
    "DataError",
    "IngestionError",
    "InvariantViolation",
    "MonotonicityError",
    "OutOfRangeError",
    "PlanningError",
    "UsageError",
    # Stream model
    "EventBatch",
    "FWindow",
    "StreamDescriptor",
    "descriptor_from_hz",
    # Execution
    "Engine",
    "ExecutionResult",
    "SourceData",
    "execute",
    "ingest_csv",
    "run_eager",
    "run_targeted",
    "sink_csv",
    # Shape matching
    "MatchParams",
    "ShapeTemplate",
    "cdtw_distance",
    "detect_shapes",
    "line_zero_template",
    # Signal toolkit
    "end_to_end",
    "fill_const",
    "fill_mean",
    "listing_query",
    "normalize",
    "pass_filter",
    "resample",
]

__version__ = "0.1.0"

# src/cadence/shapes/__init__.py
from __future__ import annotations

from .dtw import cdtw_batch, cdtw_cost, cdtw_distance
from .scan import (
    MatchParams,
    ShapeScanner,
    ShapeTemplate,
    detect_shapes,
    line_zero_template,
    load_template,
    merge_matches,
    scan_array,
    scan_stream,
    where_shape,
    znormalize,
)

__all__ = [
    "MatchParams",
    "ShapeScanner",
    "ShapeTemplate",
    "cdtw_batch",
    "cdtw_cost",
    "cdtw_distance",
    "detect_shapes",
    "line_zero_template",
    "load_template",
    "merge_matches",
    "scan_array",
    "scan_stream",
    "where_shape",
    "znormalize",
]

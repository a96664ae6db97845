# src/cadence/toolkit/__init__.py
from __future__ import annotations

from .fir import FirKernel, design_lowpass
from .ops import fill_const, fill_mean, gap_bounds, lowpass, normalize, pass_filter, resample, rolling_mean
from .pipelines import (
    FillMethod,
    ToolkitParams,
    default_stride,
    end_to_end,
    end_to_end_query,
    impute,
    line_zero_pipeline,
    listing_query,
    single_stream_query,
)

__all__ = [
    "FillMethod",
    "FirKernel",
    "ToolkitParams",
    "default_stride",
    "design_lowpass",
    "end_to_end",
    "end_to_end_query",
    "fill_const",
    "fill_mean",
    "gap_bounds",
    "impute",
    "line_zero_pipeline",
    "listing_query",
    "lowpass",
    "normalize",
    "pass_filter",
    "resample",
    "rolling_mean",
    "single_stream_query",
]

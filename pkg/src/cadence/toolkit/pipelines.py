# src/cadence/toolkit/pipelines.py
from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Literal, Optional, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..compiler import Query, QueryDescription, Stream
from ..errors import PlanningError
from ..model import StreamDescriptor
from ..operators import Interval
from .fir import design_lowpass
from .ops import fill_const, fill_mean, normalize, pass_filter, resample

logger = logging.getLogger(__name__)

FillMethod = Literal["const", "mean"]


class ToolkitParams(BaseModel):
    """Parameter surface shared by the toolkit pipelines and the bench commands."""

    model_config = ConfigDict(frozen=True)

    window: int = Field(default=60_000, ge=1, description="Normalize / fill-mean window in ms")
    gap_limit: int = Field(default=40, ge=1, description="Longest gap filled by fill_const, in ms")
    fill_value: float = Field(default=0.0, description="Payload written into filled gaps")
    fill: FillMethod = Field(default="const", description="Imputation used by the end-to-end pipeline")
    target_period: Optional[int] = Field(default=None, ge=1, description="Resample target period in ms")
    taps: Optional[tuple[float, ...]] = Field(default=None, description="Explicit FIR taps")
    cutoff_hz: float = Field(default=40.0, gt=0, description="Low-pass cutoff for designed taps")
    num_taps: int = Field(default=31, ge=1, description="Designed filter length (odd)")

    @model_validator(mode="after")
    def _check_taps(self) -> ToolkitParams:
        if self.taps is None and self.num_taps % 2 == 0:
            raise ValueError(f"num_taps must be odd, got {self.num_taps}")
        return self

    def filter_taps(self, period: int) -> list[float]:
        if self.taps is not None:
            return list(self.taps)
        return design_lowpass(self.cutoff_hz, self.num_taps, period).tolist()


def _identity(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return v


def _minus(val: npt.NDArray[np.float64], mean: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return val - mean


def listing_query(sliding: bool = False, window: int = 100) -> QueryDescription:
    """Running example: de-mean a 500 Hz signal over 100 ms windows and join it with a 200 Hz signal.

    ``sliding`` swaps the tumbling mean for a rolling mean advancing one period at a time.
    """
    q = Query()
    sig500 = q.source("sig500", (0, 2))
    sig200 = q.source("sig200", (0, 5))

    def demean(s: Stream) -> Stream:
        windowed = s.sliding_window(window, 2) if sliding else s.tumbling_window(window)
        return s.select(_identity, name="select_1").join(windowed.mean(), combine=_minus, name="join_1")

    left = sig500.multicast(demean)
    right = sig200.select(_identity, name="select_2")
    return q.build(left.join(right, name="join_2"))


def default_stride(window: int, period: int) -> int:
    half = window // 2
    return half if half > 0 and half % period == 0 else window


def line_zero_pipeline(
    stream: Stream, matches: Sequence[Interval], window: int, stride: Optional[int] = None
) -> Stream:
    """Remove matched artifact intervals, then normalize over a sliding window."""
    period = stream.descriptor.period
    cleaned = stream.where_shape(matches, mode="drop")
    return normalize(cleaned, window, stride or default_stride(window, period))


def impute(stream: Stream, method: FillMethod, gap_limit: int, fill_value: float = 0.0) -> Stream:
    if method == "const":
        return fill_const(stream, gap_limit, fill_value)
    if method == "mean":
        return fill_mean(stream, gap_limit)
    raise PlanningError(f"unknown fill method '{method}'")


def end_to_end(
    ecg: Stream,
    abp: Stream,
    window: int,
    gap_limit: int,
    fill: FillMethod = "const",
    fill_value: float = 0.0,
) -> Stream:
    """Impute both signals, bring ABP onto the ECG grid, normalize both and pair strictly overlapping samples."""
    target = ecg.descriptor.period
    ecg_clean = normalize(impute(ecg, fill, gap_limit, fill_value), window)
    abp_clean = normalize(resample(impute(abp, fill, gap_limit, fill_value), target), window)
    return ecg_clean.alter_duration(1).join(abp_clean.alter_duration(1))


def end_to_end_query(
    ecg: Union[StreamDescriptor, tuple[int, int]] = (0, 2),
    abp: Union[StreamDescriptor, tuple[int, int]] = (0, 8),
    params: Optional[ToolkitParams] = None,
) -> QueryDescription:
    params = params or ToolkitParams()
    q = Query()
    out = end_to_end(
        q.source("ecg", ecg),
        q.source("abp", abp),
        params.window,
        params.gap_limit,
        params.fill,
        params.fill_value,
    )
    return q.build(out)


def single_stream_query(
    name: str, descriptor: Union[StreamDescriptor, tuple[int, int]], params: Optional[ToolkitParams] = None
) -> QueryDescription:
    """One toolkit operation over a source called ``signal``."""
    params = params or ToolkitParams()
    q = Query()
    src = q.source("signal", descriptor)
    period = src.descriptor.period
    if name == "normalize":
        out = normalize(src, params.window)
    elif name == "passfilter":
        out = pass_filter(src, params.filter_taps(period))
    elif name == "fillconst":
        out = fill_const(src, params.gap_limit, params.fill_value)
    elif name == "fillmean":
        out = fill_mean(src, params.window)
    elif name == "resample":
        out = resample(src, params.target_period or max(1, period // 4))
    else:
        raise PlanningError(f"no toolkit operation named '{name}'")
    return q.build(out)


__all__ = [
    "FillMethod",
    "ToolkitParams",
    "default_stride",
    "end_to_end",
    "end_to_end_query",
    "impute",
    "line_zero_pipeline",
    "listing_query",
    "single_stream_query",
]

# src/cadence/toolkit/ops.py
from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..compiler import Stream
from ..errors import PlanningError
from .fir import FirKernel, design_lowpass

logger = logging.getLogger(__name__)

Rows = npt.NDArray[np.float64]
Mask = npt.NDArray[np.bool_]


def _require_multiple(value: int, period: int, what: str) -> None:
    if value < period or value % period != 0:
        raise PlanningError(f"{what} {value} ms must be a positive multiple of the {period} ms period")


# ---------- Normalize ----------


def _zscore(rows: Rows) -> Rows:
    x = rows[:, 0].astype(np.float64)
    mean = rows[:, 1].astype(np.float64)
    std = rows[:, 2].astype(np.float64)
    safe = np.where(std > 0, std, 1.0)
    return np.where(std > 0, (x - mean) / safe, 0.0)


def normalize(stream: Stream, window: int, stride: Optional[int] = None) -> Stream:
    """Standard scores against the mean and population std of each window.

    With the default tumbling layout every event is scored against the window
    it falls in. A smaller ``stride`` scores each event against the window
    starting at the stride boundary at or before it.
    """
    period = stream.descriptor.period
    stride = stride or window
    _require_multiple(window, period, "normalize window")
    _require_multiple(stride, period, "normalize stride")

    def body(s: Stream) -> Stream:
        mean = s.sliding_window(window, stride).mean()
        std = s.sliding_window(window, stride).std()
        return s.join(mean.join(std)).select(_zscore, width=1)

    return stream.multicast(body)


def rolling_mean(stream: Stream, window: int, stride: Optional[int] = None) -> Stream:
    """Mean over a window sliding by ``stride`` (one period by default)."""
    return stream.sliding_window(window, stride or stream.descriptor.period).mean()


# ---------- Pass filter ----------


def pass_filter(stream: Stream, taps: Sequence[float]) -> Stream:
    """FIR filter ``out[t] = sum(taps[j] * x[t - j*period])``.

    Slots without a full run of present history stay absent.
    """
    kernel = FirKernel(taps)
    p = stream.descriptor.period
    return stream.transform(p, kernel, history=kernel.history)


def lowpass(stream: Stream, cutoff_hz: float, num_taps: int) -> Stream:
    return pass_filter(stream, design_lowpass(cutoff_hz, num_taps, stream.descriptor.period).tolist())


# ---------- Gap filling ----------


def gap_bounds(present: Mask) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Column of the nearest present slot strictly before and after each cell of every row.

    Missing neighbours are reported as -1 (before) and the row length (after).
    """
    n, length = present.shape
    idx = np.arange(length, dtype=np.int64)
    last = np.maximum.accumulate(np.where(present, idx, -1), axis=1)
    first = np.minimum.accumulate(np.where(present, idx, length)[:, ::-1], axis=1)[:, ::-1]
    prev = np.full((n, length), -1, dtype=np.int64)
    prev[:, 1:] = last[:, :-1]
    nxt = np.full((n, length), length, dtype=np.int64)
    nxt[:, :-1] = first[:, 1:]
    return prev, nxt


class GapFill:
    """Transform body filling short absent runs bounded by present slots on both sides.

    Rows are ``reach`` slots of history, ``per_slice`` slice slots and
    ``reach`` slots of lookahead; ``reach`` is also the longest run filled.
    """

    def __init__(self, reach: int, per_slice: int, fill: Callable[[Rows, Mask], tuple[Rows, Mask]]) -> None:
        self.reach = reach
        self.per_slice = per_slice
        self.fill = fill

    def __call__(self, values: Rows, present: Mask) -> tuple[Rows, Mask]:
        lo, hi = self.reach, self.reach + self.per_slice
        prev, nxt = gap_bounds(present)
        length = present.shape[1]
        fillable = ~present & (prev >= 0) & (nxt < length) & (nxt - prev - 1 <= self.reach)
        fillable = fillable[:, lo:hi]
        slice_values, slice_present = values[:, lo:hi], present[:, lo:hi]
        fill_values, has_fill = self.fill(slice_values, slice_present)
        fillable &= has_fill
        return np.where(fillable, fill_values, slice_values), slice_present | fillable


def fill_const(stream: Stream, gap_limit: int, fill_value: float) -> Stream:
    """Fill absent runs no longer than ``gap_limit`` ms with ``fill_value``."""
    p = stream.descriptor.period
    _require_multiple(gap_limit, p, "gap limit")
    value = float(fill_value)

    def constant(vals: Rows, pres: Mask) -> tuple[Rows, Mask]:
        return np.full_like(vals, value), np.ones_like(pres)

    reach = gap_limit // p
    return stream.transform(p, GapFill(reach, 1, constant), history=reach, lookahead=reach)


def _slice_mean(vals: Rows, pres: Mask) -> tuple[Rows, Mask]:
    count = pres.sum(axis=1)
    total = np.where(pres, vals, 0.0).sum(axis=1)
    mean = total / np.maximum(count, 1)
    return np.broadcast_to(mean[:, None], vals.shape), np.broadcast_to((count > 0)[:, None], pres.shape)


def fill_mean(stream: Stream, window: int) -> Stream:
    """Fill absent runs no longer than ``window`` ms with the mean of their tumbling window."""
    p = stream.descriptor.period
    _require_multiple(window, p, "fill window")
    reach = window // p
    return stream.transform(window, GapFill(reach, reach, _slice_mean), history=reach, lookahead=reach)


# ---------- Resample ----------


class _Interpolate:
    def __init__(self, origin: int, period: int) -> None:
        self.origin = origin
        self.period = period

    def __call__(self, sync: npt.NDArray[np.int64], rows: Rows) -> Rows:
        v1 = rows[:, 0].astype(np.float64)
        v2 = rows[:, 1].astype(np.float64)
        t1 = self.origin + ((sync - self.origin) // self.period) * self.period
        hit = sync == t1
        frac = (sync - t1) / self.period
        return np.where(hit, v1, v1 + (v2 - v1) * frac)


def resample(stream: Stream, target_period: int) -> Stream:
    """Linear interpolation onto ``(offset, target_period)``.

    Slots bracketed by a gap get no event; exact hits copy the input value.
    """
    if target_period < 1:
        raise PlanningError(f"target period must be >= 1 ms, got {target_period}")
    desc = stream.descriptor
    if desc.width != 1:
        raise PlanningError(f"resample needs a scalar stream, got width {desc.width}")
    off, p_in = desc.offset, desc.period
    g = int(np.gcd(p_in, target_period))

    def pairs(s: Stream) -> Stream:
        return s.join(s.shift(-p_in), mode="left")

    fine = (
        stream.multicast(pairs)
        .chop(g)
        .select(_Interpolate(off, p_in), width=1, with_sync=True)
        .where(lambda v: ~np.isnan(v))
    )
    if target_period == g:
        return fine

    def on_target(sync: npt.NDArray[np.int64], _: Rows) -> Mask:
        return (sync - off) % target_period == 0

    picked = fine.where(on_target, with_sync=True).aggregate(target_period, target_period, "sum")
    delta = (off - picked.descriptor.offset) % target_period
    if delta:
        picked = picked.shift(delta)
    logger.debug(f"Resample {p_in} -> {target_period} ms via {g} ms grid, shift {delta}")
    return picked


__all__ = [
    "GapFill",
    "fill_const",
    "fill_mean",
    "gap_bounds",
    "lowpass",
    "normalize",
    "pass_filter",
    "resample",
    "rolling_mean",
]

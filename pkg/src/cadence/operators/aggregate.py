# src/cadence/operators/aggregate.py
from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import Any, ClassVar, Literal, Union

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import PlanningError
from ..model import FWindow
from .base import EdgeShape, Operator, aligned_start, require_multiple, require_scalar
from .lineage import AffineSpan

logger = logging.getLogger(__name__)

AggregateName = Literal["sum", "max", "min", "mean", "count", "std"]
Reducer = Union[AggregateName, Callable[[npt.NDArray[np.float64]], float]]


def _reduce(
    name: AggregateName, values: npt.NDArray[np.float64], present: npt.NDArray[np.bool_], counts: npt.NDArray[np.int64]
) -> npt.NDArray[np.float64]:
    if name == "count":
        return counts.astype(np.float64)
    if name == "max":
        return np.where(present, values, -np.inf).max(axis=1)
    if name == "min":
        return np.where(present, values, np.inf).min(axis=1)

    total = np.where(present, values, 0.0).sum(axis=1)
    if name == "sum":
        return total
    safe = np.maximum(counts, 1)
    mean = total / safe
    if name == "mean":
        return mean
    dev = np.where(present, values - mean[:, None], 0.0)
    # population standard deviation
    return np.sqrt((dev * dev).sum(axis=1) / safe)


class Aggregate(Operator):
    """Reduce each ``window`` ms of a scalar stream into one event every ``stride`` ms.

    The event at time t summarises input events with sync in ``[t, t + window)``
    and lasts ``stride`` ms. A window with no present input yields no event.
    """

    kind: ClassVar[str] = "aggregate"

    window: int
    stride: int
    fn: Reducer = "sum"

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        src = inputs[0]
        require_scalar(src, "aggregate")
        p = src.descriptor.period
        require_multiple(self.window, p, "aggregate window")
        require_multiple(self.stride, p, "aggregate stride")
        if self.window < self.stride:
            raise PlanningError(f"aggregate window {self.window} ms is shorter than its stride {self.stride} ms")
        desc = src.descriptor.model_copy(update={"period": self.stride})
        return EdgeShape(descriptor=desc, max_duration=self.stride)

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        return AffineSpan(ahead=self.window - self.stride)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        view = views[0]
        p = view.period
        size, step = self.window // p, self.stride // p
        start = aligned_start(view, out.sync)
        stop = start + (out.capacity - 1) * step + size

        values = sliding_window_view(view.values[start:stop].astype(np.float64), size)[::step]
        present = sliding_window_view(view.bitvector[start:stop], size)[::step]
        counts = present.sum(axis=1)
        emit = counts > 0
        if not emit.any():
            return

        if callable(self.fn):
            result = np.zeros(out.capacity, dtype=np.float64)
            for i in np.flatnonzero(emit):
                result[i] = float(self.fn(values[i][present[i]]))
        else:
            result = _reduce(self.fn, values, present, counts)

        out.payload[emit, 0] = result[emit]
        out.duration[emit] = self.stride
        out.bitvector[emit] = True

    def params(self) -> str:
        name = self.fn if isinstance(self.fn, str) else getattr(self.fn, "__name__", "fn")
        return f"{self.window},{self.stride},{name}"


__all__ = ["Aggregate", "AggregateName", "Reducer"]

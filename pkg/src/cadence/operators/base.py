# src/cadence/operators/base.py
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ContractViolation, PlanningError
from ..model import FWindow, StreamDescriptor
from .lineage import IDENTITY, AffineSpan

logger = logging.getLogger(__name__)


class EdgeShape(BaseModel):
    """What the planner knows statically about the stream on one edge."""

    model_config = ConfigDict(frozen=True)

    descriptor: StreamDescriptor
    max_duration: int = Field(description="Upper bound on any event duration on the edge (ms)")

    @classmethod
    def of(cls, descriptor: StreamDescriptor, max_duration: int | None = None) -> EdgeShape:
        return cls(descriptor=descriptor, max_duration=max_duration or descriptor.period)

    def reach_back(self) -> int:
        """How far before a time an on-grid event can start and still be active at it."""
        p = self.descriptor.period
        return (math.ceil(self.max_duration / p) - 1) * p

    def reach_ahead(self, period: int) -> int:
        """max_duration rounded up to a multiple of ``period``."""
        return math.ceil(self.max_duration / period) * period


class Operator(BaseModel, ABC):
    """Base class for every temporal operator kernel.

    An operator declares three things to the planner: the descriptor of its
    output (``describe``), the input interval each output interval depends on
    (``lineage``) and how locality tracing unifies its FWindow dimensions
    (``unify_dimensions``). At run time ``compute`` fills one output window
    from one view per input; a view always covers the lineage of that window.
    """

    kind: ClassVar[str] = "operator"
    arity: ClassVar[int] = 1

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @abstractmethod
    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        """Output edge shape, raising PlanningError on invalid parameters."""

    def lineage(self, port: int, inputs: list[EdgeShape], dimension: int) -> AffineSpan:
        """Input span read on ``port`` for an output window of ``dimension``."""
        return IDENTITY

    def unify_dimensions(
        self, in_dims: list[int], out_dims: list[int], inputs: list[EdgeShape], output: EdgeShape
    ) -> tuple[list[int], list[int]]:
        """Dimensions after one locality-tracing adjustment of this node."""
        target = math.lcm(*in_dims, *out_dims)
        return [target] * len(in_dims), [target] * len(out_dims)

    @abstractmethod
    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        """Fill ``out`` (already cleared and positioned) from the input views."""

    def label(self) -> str:
        params = self.params()
        return f"{self.kind}({params})" if params else self.kind

    def params(self) -> str:
        return ""


# ---------- Kernel helpers ----------


def aligned_start(view: FWindow, t: int) -> int:
    """Slot of ``view`` holding on-grid time t."""
    if not view.descriptor.on_grid(t):
        raise PlanningError(f"time {t} is off the grid of {view!r}")
    return view.index_of(t)


def copy_frame(view: FWindow, out: FWindow, start: int) -> None:
    """Copy timing and presence columns of ``out.capacity`` view slots, leaving payload alone."""
    stop = start + out.capacity
    np.copyto(out.vsync, view.vsync[start:stop])
    np.copyto(out.duration, view.duration[start:stop])
    np.copyto(out.bitvector, view.bitvector[start:stop])


def payload_arg(payload: npt.NDArray[Any]) -> npt.NDArray[Any]:
    """Hand scalar payloads to user functions as a flat column."""
    return payload[:, 0] if payload.shape[1] == 1 else payload


def as_rows(result: Any, n: int, width: int, who: str) -> npt.NDArray[np.float64]:
    """Coerce a user function result into an (n, width) float array."""
    arr = np.asarray(result, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    rows = arr.reshape(n, -1) if n else arr.reshape(0, width)
    if rows.shape != (n, width):
        raise ContractViolation(f"{who} returned shape {arr.shape}, expected {n} rows of width {width}")
    return rows


def require_scalar(shape: EdgeShape, who: str) -> None:
    if shape.descriptor.width != 1:
        raise PlanningError(f"{who} needs a scalar stream, got payload width {shape.descriptor.width}")


def require_multiple(value: int, period: int, what: str) -> None:
    if value <= 0 or value % period != 0:
        raise PlanningError(f"{what} {value} ms must be a positive multiple of the input period {period} ms")

# src/cadence/operators/routing.py
from __future__ import annotations

from collections.abc import Sequence
from typing import ClassVar, Optional

from ..errors import InvariantViolation, PlanningError
from ..model import FWindow, StreamDescriptor
from .base import EdgeShape, Operator


class Source(Operator):
    """Leaf of a query; its window is loaded by the executor, never computed."""

    kind: ClassVar[str] = "source"
    arity: ClassVar[int] = 0

    descriptor: StreamDescriptor
    max_duration: Optional[int] = None

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        if inputs:
            raise PlanningError("a source takes no inputs")
        md = self.max_duration or self.descriptor.period
        if md < 1:
            raise PlanningError(f"source max duration must be positive, got {md}")
        return EdgeShape(descriptor=self.descriptor, max_duration=md)

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        raise InvariantViolation("source windows are loaded, not computed")

    def params(self) -> str:
        return self.descriptor.label()


class Multicast(Operator):
    """Fan one stream out to several consumers that read the same buffer."""

    kind: ClassVar[str] = "multicast"

    def describe(self, inputs: list[EdgeShape]) -> EdgeShape:
        return inputs[0]

    def compute(self, views: Sequence[FWindow], out: FWindow) -> None:
        raise InvariantViolation("multicast branches alias their producer's window")

# src/cadence/errors.py
from __future__ import annotations


class CadenceError(Exception):
    """Base exception for the cadence engine."""

    pass


class PlanningError(CadenceError):
    """A query cannot be compiled into a valid plan."""

    pass


class MonotonicityError(CadenceError):
    """An FWindow was asked to move backward in time."""

    pass


class OutOfRangeError(CadenceError):
    """A timestamp falls outside a window or off its slot grid."""

    pass


class DataError(CadenceError):
    """Input data violates the stream contract."""

    pass


class IngestionError(DataError):
    """A source file or frequency cannot be ingested."""

    pass


class InvariantViolation(CadenceError):
    """An engine invariant was broken at run time."""

    pass


class ContractViolation(InvariantViolation):
    """A user-supplied function broke its kernel contract."""

    pass


class UsageError(CadenceError):
    """Invalid arguments from the command line or library caller."""

    pass

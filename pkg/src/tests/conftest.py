# src/tests/conftest.py
from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Optional, Union

import numpy as np
import pytest

from cadence.compiler import Stream
from cadence.config import CadenceConfig, reset_config
from cadence.model import EventBatch, StreamDescriptor
from cadence.runtime import Engine, SourceData, execute

SourceFactory = Callable[..., SourceData]


@pytest.fixture(autouse=True)
def reset_global_config():
    """Reset global config before each test."""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def make_source() -> SourceFactory:
    """Seeded source with small integer payloads, random absent slots and long holes."""

    def _make(
        name: str,
        descriptor: Union[StreamDescriptor, tuple[int, int]],
        n: int = 240,
        seed: int = 0,
        missing: float = 0.15,
        holes: Sequence[tuple[int, int]] = ((80, 130),),
        gap_ms: int = 4,
    ) -> SourceData:
        if isinstance(descriptor, tuple):
            descriptor = StreamDescriptor(offset=descriptor[0], period=descriptor[1])
        rng = np.random.default_rng(seed)
        values = rng.integers(0, 10, n).astype(np.float32)
        present = rng.random(n) >= missing
        for lo, hi in holes:
            present[lo:hi] = False
        return SourceData(name, descriptor, values, present, gap_ms=gap_ms)

    return _make


@pytest.fixture
def dense_source() -> Callable[[str, tuple[int, int], Sequence[float]], SourceData]:
    """Source holding exactly the given values from its offset on."""

    def _make(name: str, descriptor: tuple[int, int], values: Sequence[float]) -> SourceData:
        desc = StreamDescriptor(offset=descriptor[0], period=descriptor[1])
        return SourceData(name, desc, values)

    return _make


def run(
    out: Stream,
    *sources: SourceData,
    engine: Union[Engine, str] = Engine.EAGER,
    config: Optional[CadenceConfig] = None,
) -> EventBatch:
    """Build the query ending at ``out`` and return its sink events."""
    return execute(out.query.build(out), list(sources), engine, config).events


@pytest.fixture
def runner() -> Callable[..., EventBatch]:
    return run


@pytest.fixture(params=["eager", "targeted"])
def engine(request: pytest.FixtureRequest) -> str:
    """Every oracle comparison runs under both executors."""
    return str(request.param)

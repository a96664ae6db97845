# src/cadence/bench/generator.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

from ..errors import UsageError
from ..model import StreamDescriptor, descriptor_from_hz, period_from_hz
from ..operators import Interval
from ..runtime import SourceData
from ..shapes import ShapeTemplate, line_zero_template

logger = logging.getLogger(__name__)

Waveform = Literal["uniform", "sine"]
GapModel = Literal["none", "segments"]

# Two-stream mode mirrors the waveform database rates
ECG_HZ = 500.0
ABP_HZ = 125.0


class GenSpec(BaseModel):
    """Synthetic dataset recipe; everything is derived from ``seed``."""

    model_config = ConfigDict(frozen=True)

    frequency_hz: float = Field(default=1000.0, description="Sampling rate of single-stream data")
    minutes: float = Field(default=1.0, gt=0, description="Dataset length in minutes")
    seconds: Optional[float] = Field(default=None, gt=0, description="Dataset length in seconds (overrides minutes)")
    seed: int = Field(default=42, description="Generator seed")
    waveform: Waveform = Field(default="uniform", description="uniform random values or a noisy sine")
    gap_model: GapModel = Field(default="none", description="none or periodic availability segments")
    overlap: float = Field(default=1.0, ge=0.0, le=1.0, description="Present share (single) or overlap (pair)")
    segments: int = Field(default=10, ge=1, description="Blocks the timeline is cut into for gap construction")
    offset: int = Field(default=0, description="Offset of the first slot")
    artifacts: int = Field(default=0, ge=0, description="Line-zero artifacts injected into single-stream data")
    template_length: int = Field(default=50, ge=2, description="Artifact template length in slots")

    @field_validator("frequency_hz")
    @classmethod
    def _integral_period(cls, v: float) -> float:
        period_from_hz(v)
        return v

    @computed_field
    @property
    def span_ms(self) -> int:
        total = self.seconds * 1000 if self.seconds is not None else self.minutes * 60_000
        return int(round(total))

    def descriptor(self, frequency_hz: Optional[float] = None) -> StreamDescriptor:
        return descriptor_from_hz(frequency_hz or self.frequency_hz, self.offset)


# ---------- Values ----------


def waveform_values(spec: GenSpec, n: int, period: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    if spec.waveform == "uniform":
        return rng.uniform(0.0, 1.0, n)
    t_s = (spec.offset + np.arange(n, dtype=np.float64) * period) / 1000.0
    return 100.0 + 15.0 * np.sin(2 * np.pi * 1.2 * t_s) + rng.normal(0.0, 1.0, n)


def block_presence(n: int, period: int, blocks: list[Interval], offset: int) -> npt.NDArray[np.bool_]:
    """Slot mask that is True inside any of the given time ranges."""
    t = offset + np.arange(n, dtype=np.int64) * period
    mask = np.zeros(n, dtype=np.bool_)
    for iv in blocks:
        mask |= (t >= iv.start) & (t < iv.end)
    return mask


def _quantize(t: float, quantum: int) -> int:
    return int(round(t / quantum)) * quantum


def segment_layout(spec: GenSpec, quantum: int) -> list[Interval]:
    """Present ranges of a single gapped stream: the leading ``overlap`` share of each block."""
    if spec.gap_model == "none":
        return [Interval(start=spec.offset, end=spec.offset + spec.span_ms)]
    block = spec.span_ms / spec.segments
    ranges = []
    for b in range(spec.segments):
        start = spec.offset + _quantize(b * block, quantum)
        end = spec.offset + _quantize(b * block + spec.overlap * block, quantum)
        if end > start:
            ranges.append(Interval(start=start, end=end))
    return ranges


def pair_layout(spec: GenSpec, quantum: int) -> tuple[list[Interval], list[Interval]]:
    """Present ranges of the two streams; per block they share exactly the ``overlap`` share.

    The first stream covers the head of each block, the second its tail, and
    the two meet in the middle.
    """
    if spec.gap_model == "none" and spec.overlap >= 1.0:
        whole = [Interval(start=spec.offset, end=spec.offset + spec.span_ms)]
        return whole, list(whole)
    f = spec.overlap
    block = spec.span_ms / spec.segments
    first, second = [], []
    for b in range(spec.segments):
        b0 = b * block
        lo = spec.offset + _quantize(b0, quantum)
        hi = spec.offset + _quantize(b0 + block, quantum)
        first_end = spec.offset + _quantize(b0 + block * (1 + f) / 2, quantum)
        second_start = spec.offset + _quantize(b0 + block * (1 - f) / 2, quantum)
        if first_end > lo:
            first.append(Interval(start=lo, end=first_end))
        if hi > second_start:
            second.append(Interval(start=second_start, end=hi))
    return first, second


def measured_overlap(first: list[Interval], second: list[Interval], span_ms: int) -> float:
    shared = sum(max(0, min(a.end, b.end) - max(a.start, b.start)) for a in first for b in second)
    return shared / span_ms if span_ms else 0.0


# ---------- Artifacts ----------


def artifact_starts(n: int, count: int, m: int, hop: int) -> npt.NDArray[np.int64]:
    """Evenly spread, hop-aligned, non-overlapping artifact start slots."""
    if count == 0:
        return np.empty(0, dtype=np.int64)
    spacing = n // count
    if spacing < m + hop:
        raise UsageError(f"{count} artifacts of {m} slots do not fit in {n} slots")
    centers = np.arange(count, dtype=np.int64) * spacing + (spacing - m) // 2
    return (centers // hop) * hop


def inject_artifacts(
    values: npt.NDArray[np.float64],
    starts: npt.NDArray[np.int64],
    template: ShapeTemplate,
    rng: np.random.Generator,
) -> None:
    shape = template.array()
    for s in starts:
        values[s : s + shape.size] = shape + rng.normal(0.0, 1.0, shape.size)


# ---------- Datasets ----------


class Dataset(BaseModel):
    """Generated sources plus ground truth for any injected artifacts."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: GenSpec
    sources: dict[str, SourceData]
    truth: list[Interval] = Field(default_factory=list)
    overlap: float = Field(default=1.0, description="Measured availability overlap of a stream pair")

    @property
    def events(self) -> int:
        return sum(s.event_count for s in self.sources.values())


def _stream(
    spec: GenSpec, name: str, frequency_hz: float, ranges: list[Interval], rng: np.random.Generator
) -> SourceData:
    desc = spec.descriptor(frequency_hz)
    n = spec.span_ms // desc.period
    values = waveform_values(spec, n, desc.period, rng)
    present = block_presence(n, desc.period, ranges, spec.offset)
    return SourceData.from_arrays(name, desc, values, present, start=spec.offset)


def generate(spec: GenSpec, name: str = "signal") -> Dataset:
    """Single stream at ``spec.frequency_hz``, optionally gapped and carrying artifacts."""
    rng = np.random.default_rng(spec.seed)
    desc = spec.descriptor()
    p = desc.period
    n = spec.span_ms // p
    values = waveform_values(spec, n, p, rng)
    present = block_presence(n, p, segment_layout(spec, p), spec.offset)

    truth: list[Interval] = []
    if spec.artifacts:
        template = line_zero_template(spec.template_length)
        hop = max(1, template.m // 4)
        starts = artifact_starts(n, spec.artifacts, template.m, hop)
        inject_artifacts(values, starts, template, rng)
        present[(starts[:, None] + np.arange(template.m)).reshape(-1)] = True
        truth = [Interval(start=spec.offset + int(s) * p, end=spec.offset + (int(s) + template.m) * p) for s in starts]

    source = SourceData.from_arrays(name, desc, values, present, start=spec.offset)
    logger.info(f"Generated {name}: {source.event_count} events at {spec.frequency_hz:g} Hz, {len(truth)} artifact(s)")
    return Dataset(spec=spec, sources={name: source}, truth=truth)


def generate_pair(spec: GenSpec, names: tuple[str, str] = ("ecg", "abp")) -> Dataset:
    """ECG-rate and ABP-rate streams whose availability overlaps by ``spec.overlap``."""
    rng = np.random.default_rng(spec.seed)
    quantum = int(np.lcm(period_from_hz(ECG_HZ), period_from_hz(ABP_HZ)))
    first, second = pair_layout(spec, quantum)
    ecg = _stream(spec, names[0], ECG_HZ, first, rng)
    abp = _stream(spec, names[1], ABP_HZ, second, rng)
    overlap = measured_overlap(first, second, spec.span_ms)
    logger.info(f"Generated pair {names}: {ecg.event_count} + {abp.event_count} events, overlap {overlap:.3f}")
    return Dataset(spec=spec, sources={ecg.name: ecg, abp.name: abp}, overlap=overlap)


# ---------- Files ----------


def write_source_csv(source: SourceData, path: Union[str, Path]) -> Path:
    """Write present slots as ``timestamp,value`` rows."""
    path = Path(path)
    idx = np.flatnonzero(source.present)
    frame = pd.DataFrame(
        {"timestamp": source.start + idx.astype(np.int64) * source.period, "value": source.values[idx]}
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.9g", lineterminator="\n")
    return path


def truth_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.truth.csv")


def write_intervals_csv(intervals: list[Interval], path: Union[str, Path]) -> Path:
    """Write ``start,end`` rows, one per interval."""
    path = Path(path)
    frame = pd.DataFrame(
        {"start": [iv.start for iv in intervals], "end": [iv.end for iv in intervals]}, dtype=np.int64
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_intervals_csv(path: Union[str, Path]) -> list[Interval]:
    frame = pd.read_csv(path)
    return [Interval(start=int(s), end=int(e)) for s, e in zip(frame["start"], frame["end"])]


def write_dataset(dataset: Dataset, out_dir: Union[str, Path], stem: Optional[str] = None) -> list[Path]:
    """Write every source as ``<stem or name>.csv`` plus a truth sidecar when artifacts were injected."""
    out_dir = Path(out_dir)
    written = []
    for name, source in dataset.sources.items():
        file_stem = stem if stem and len(dataset.sources) == 1 else name
        written.append(write_source_csv(source, out_dir / f"{file_stem}.csv"))
    if dataset.spec.artifacts:
        written.append(write_intervals_csv(dataset.truth, truth_path(written[0])))
    return written


__all__ = [
    "ABP_HZ",
    "Dataset",
    "ECG_HZ",
    "GenSpec",
    "artifact_starts",
    "generate",
    "generate_pair",
    "measured_overlap",
    "pair_layout",
    "read_intervals_csv",
    "segment_layout",
    "truth_path",
    "write_dataset",
    "write_intervals_csv",
    "write_source_csv",
]

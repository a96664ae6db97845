# src/cadence/cli_main.py
from __future__ import annotations

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Literal, Optional

import click
import typer

from .bench import (
    BENCH_NAMES,
    PLAN_QUERIES,
    GenSpec,
    bench_dataset,
    named_query,
    read_intervals_csv,
    run_bench,
    run_parallel,
    run_sweep,
    score_matches,
    truth_path,
    write_dataset,
    write_intervals_csv,
)
from .bench.generator import ABP_HZ, ECG_HZ, generate, generate_pair
from .bench.harness import PAIR_BENCHES
from .compiler import Query, compile_query
from .config import CadenceConfig, get_config, set_config
from .dependencies import get_console, install_log_handler
from .errors import CadenceError, DataError, InvariantViolation, UsageError
from .model import descriptor_from_hz
from .runtime import Engine, SourceData, execute, ingest_csv, sink_csv
from .shapes import MatchParams, ShapeTemplate, detect_shapes, line_zero_template, load_template
from .toolkit import ToolkitParams

logger = logging.getLogger(__name__)

console = get_console()
app = typer.Typer(add_completion=False, help="Cadence temporal query engine CLI", no_args_is_help=True)


def exit_code_for(error: Exception) -> int:
    """1 usage/planning, 2 bad data, 3 broken engine invariant."""
    if isinstance(error, InvariantViolation):
        return 3
    if isinstance(error, DataError):
        return 2
    return 1


@contextmanager
def reporting_errors() -> Iterator[None]:
    """Turn engine exceptions into a one-line message and the matching exit code."""
    try:
        yield
    except CadenceError as e:
        code = exit_code_for(e)
        console.print(f"✗ {type(e).__name__}: {e}")
        logger.debug("Command failed", exc_info=e)
        raise typer.Exit(code) from e


@app.callback()
def _setup(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level (default from CADENCE_LOG_LEVEL)"),
) -> None:
    """Configure logging for every subcommand."""
    config = get_config()
    if log_level:
        config = config.model_copy(update={"log_level": log_level.upper()})
        set_config(config)
    install_log_handler(config.log_level)


def _gen_spec(
    hz: float,
    minutes: float,
    seconds: Optional[float],
    seed: Optional[int],
    waveform: str,
    gaps: str,
    overlap: float,
    segments: int,
    artifacts: int = 0,
) -> GenSpec:
    if waveform not in ("uniform", "sine"):
        raise UsageError(f"unknown waveform '{waveform}' (expected uniform or sine)")
    if gaps not in ("none", "segments"):
        raise UsageError(f"unknown gap model '{gaps}' (expected none or segments)")
    return GenSpec(
        frequency_hz=hz,
        minutes=minutes,
        seconds=seconds,
        seed=get_config().seed if seed is None else seed,
        waveform=waveform,  # type: ignore[arg-type]
        gap_model=gaps,  # type: ignore[arg-type]
        overlap=overlap,
        segments=segments,
        artifacts=artifacts,
    )


@app.command()
def gen(
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    name: str = typer.Option("signal", "--name", help="File stem for single-stream data"),
    hz: float = typer.Option(1000.0, "--hz", help="Sampling frequency (integer-ms period)"),
    minutes: float = typer.Option(1.0, "--minutes", help="Dataset length in minutes"),
    seconds: Optional[float] = typer.Option(None, "--seconds", help="Dataset length in seconds (overrides minutes)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Generator seed"),
    waveform: str = typer.Option("uniform", "--waveform", help="uniform or sine"),
    gaps: str = typer.Option("none", "--gaps", help="none or segments"),
    overlap: float = typer.Option(1.0, "--overlap", help="Present / overlap fraction of each block"),
    segments: int = typer.Option(10, "--segments", help="Blocks used by the gap model"),
    pair: bool = typer.Option(False, "--pair", help=f"Two-stream mode ({ECG_HZ:g} Hz ecg + {ABP_HZ:g} Hz abp)"),
    artifacts: int = typer.Option(0, "--artifacts", help="Inject N line-zero artifacts and write a truth sidecar"),
) -> None:
    """Generate synthetic CSV data."""
    with reporting_errors():
        if pair and artifacts:
            raise UsageError("--artifacts applies to single-stream data only")
        if artifacts and waveform == "uniform":
            waveform = "sine"
        spec = _gen_spec(hz, minutes, seconds, seed, waveform, gaps, overlap, segments, artifacts)
        dataset = generate_pair(spec) if pair else generate(spec, name=name)
        out_dir = out or get_config().resolved_output_dir
        for path in write_dataset(dataset, out_dir, stem=name):
            console.print(f"✓ Wrote {path}")
        if pair:
            console.print(f"  overlap fraction: {dataset.overlap:.4f}")
        console.print(f"  events: {dataset.events}")


def _load_sources(bench: str, data: Path, hz: float) -> dict[str, SourceData]:
    if bench in PAIR_BENCHES:
        files = {"ecg": (data / "ecg.csv", ECG_HZ), "abp": (data / "abp.csv", ABP_HZ)}
    else:
        files = {"signal": (data / "signal.csv", hz)}
    sources = {}
    for source_name, (path, freq) in files.items():
        if not path.exists():
            raise UsageError(f"bench {bench} needs {path}")
        source, _ = ingest_csv(path, descriptor_from_hz(freq), name=source_name)
        sources[source_name] = source
    return sources


def _sweep_sizes(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise UsageError(f"--sweep expects comma-separated minutes, got '{text}'") from e


@app.command()
def bench(
    name: str = typer.Argument(..., help=f"One of: {', '.join(BENCH_NAMES)}"),
    engine: str = typer.Option("eager", "--engine", "-e", help="eager or targeted"),
    data: Optional[Path] = typer.Option(None, "--data", help="Directory with signal.csv (or ecg.csv + abp.csv)"),
    hz: float = typer.Option(1000.0, "--hz", help="Frequency of single-stream data"),
    minutes: float = typer.Option(1.0, "--minutes", help="Generated dataset length in minutes"),
    seconds: Optional[float] = typer.Option(None, "--seconds", help="Generated dataset length in seconds"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Generator seed"),
    gaps: str = typer.Option("none", "--gaps", help="none or segments"),
    overlap: float = typer.Option(1.0, "--overlap", help="Availability overlap fraction of generated data"),
    segments: int = typer.Option(10, "--segments", help="Blocks used by the gap model"),
    window_ms: Optional[int] = typer.Option(None, "--window-ms", help="Normalize / fill window (ms)"),
    gap_ms: int = typer.Option(40, "--gap-ms", help="Longest gap filled by fillconst (ms)"),
    fill: str = typer.Option("const", "--fill", help="End-to-end imputation: const or mean"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Repetitions (default from config)"),
    parallel: int = typer.Option(1, "--parallel", help="Independent shards run in separate processes"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Append JSON lines here instead of stdout"),
    sink: Optional[Path] = typer.Option(None, "--sink", help="Write the last trial's output events as CSV"),
    sweep: Optional[str] = typer.Option(
        None, "--sweep", help="Comma-separated generated dataset sizes in minutes, one summary line per size"
    ),
) -> None:
    """Run a named benchmark and emit JSON-lines metrics."""
    with reporting_errors():
        if name not in BENCH_NAMES:
            raise UsageError(f"unknown bench '{name}' (expected one of: {', '.join(BENCH_NAMES)})")
        if fill not in ("const", "mean"):
            raise UsageError(f"unknown fill method '{fill}' (expected const or mean)")
        if engine not in {e.value for e in Engine}:
            raise UsageError(f"unknown engine '{engine}' (expected eager or targeted)")
        config = get_config()
        window = window_ms or config.window_ms
        params = ToolkitParams(window=window, gap_limit=gap_ms, fill=fill)  # type: ignore[arg-type]
        waveform = "sine" if name in PAIR_BENCHES else "uniform"
        spec = _gen_spec(hz, minutes, seconds, seed, waveform, gaps, overlap, segments)

        lines: list[str] = []
        if sweep is not None:
            if data is not None or parallel > 1 or sink is not None:
                raise UsageError("--sweep generates its own datasets; drop --data, --parallel and --sink")
            sizes = _sweep_sizes(sweep)
            lines.extend(s.to_json() for s in run_sweep(name, spec, sizes, engine, params, trials, config))
        elif parallel > 1:
            if data is not None:
                raise UsageError("--parallel generates its own shards; drop --data")
            shard_metrics, parallel_summary = run_parallel(name, spec, parallel, engine, params, config)
            lines.extend(m.to_json() for m in shard_metrics)
            lines.append(parallel_summary.to_json())
        else:
            sources = _load_sources(name, data, hz) if data is not None else bench_dataset(name, spec).sources
            trial_metrics, summary, last_sink = run_bench(name, sources, engine, params, trials, config, sink)
            lines.extend(m.to_json() for m in trial_metrics)
            lines.append(summary.to_json())
            if sink is not None:
                console.print(f"✓ Wrote {last_sink.count} events to {sink}")

        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            with out.open("a") as fh:
                fh.write("\n".join(lines) + "\n")
            console.print(f"✓ Appended {len(lines)} metric lines to {out}")
        else:
            for line in lines:
                typer.echo(line)


@app.command()
def detect(
    data: Path = typer.Argument(..., help="timestamp,value CSV to scan"),
    template: Optional[Path] = typer.Option(None, "--template", "-t", help="Template file, one float per line"),
    template_length: int = typer.Option(50, "--template-length", help="Length of the built-in line-zero template"),
    hz: float = typer.Option(1000.0, "--hz", help="Sampling frequency of the data"),
    threshold: float = typer.Option(5.0, "--threshold", help="Normalized cDTW distance cutoff"),
    radius: Optional[int] = typer.Option(None, "--radius", "-r", help="Band radius in slots"),
    hop: Optional[int] = typer.Option(None, "--hop", help="Slots between evaluated alignments"),
    normalize: bool = typer.Option(False, "--normalize/--no-normalize", help="z-normalize template and candidates"),
    mode: str = typer.Option("drop", "--mode", help="drop or keep matched events in --filtered output"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Matched intervals CSV"),
    filtered: Optional[Path] = typer.Option(None, "--filtered", help="Re-emit the filtered stream as CSV"),
) -> None:
    """Find template-shaped regions with banded DTW."""
    with reporting_errors():
        if mode not in ("drop", "keep"):
            raise UsageError(f"unknown mode '{mode}' (expected drop or keep)")
        where_mode: Literal["drop", "keep"] = "drop" if mode == "drop" else "keep"
        shape: ShapeTemplate = load_template(template) if template else line_zero_template(template_length)
        params = MatchParams(threshold=threshold, band_radius=radius, hop=hop, normalize=normalize)
        source, availability = ingest_csv(data, descriptor_from_hz(hz), name="signal")
        matches = detect_shapes(source, shape, params)

        if out is not None:
            write_intervals_csv(matches, out)
            console.print(f"✓ Wrote {len(matches)} matches to {out}")
        else:
            for m in matches:
                typer.echo(f"{m.start},{m.end}")

        sidecar = truth_path(data)
        if sidecar.exists():
            score = score_matches(matches, read_intervals_csv(sidecar), availability.covered_ms)
            typer.echo(score.to_json())

        if filtered is not None:
            q = Query()
            sig = q.source("signal", source.descriptor)
            result = execute(q.build(sig.where_shape(matches, mode=where_mode)), [source])
            sink_csv(result.events, filtered)
            console.print(f"✓ Wrote {len(result.events)} events to {filtered}")


@app.command()
def plan(
    name: str = typer.Argument(..., help=f"One of: {', '.join(PLAN_QUERIES)}"),
    trace: bool = typer.Option(False, "--trace", help="Include the locality-tracing log"),
    window_ms: Optional[int] = typer.Option(None, "--window-ms", help="Window used by toolkit queries"),
    floor: Optional[int] = typer.Option(None, "--floor", help="Minimum sink dimension (ms)"),
) -> None:
    """Print the compiled plan of a built-in query."""
    with reporting_errors():
        config: CadenceConfig = get_config()
        if floor is not None:
            config = config.model_copy(update={"dimension_floor_ms": floor})
        params = ToolkitParams(window=window_ms or config.window_ms)
        compiled = compile_query(named_query(name, params), config)
        typer.echo(compiled.report(trace=trace))


def main() -> None:
    """Main CLI entry point; command-line usage errors exit with 1 like library usage errors."""
    try:
        code = app(standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        sys.exit(1)
    except click.exceptions.ClickException as e:
        e.show()
        sys.exit(e.exit_code)
    except click.exceptions.Abort:
        console.print("Aborted")
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()

# src/tests/test_bench_cli.py
from __future__ import annotations

import json
import logging

import numpy as np
import pytest
from typer.testing import CliRunner

from cadence.bench import (
    GenSpec,
    bench_query,
    generate,
    generate_pair,
    measured_overlap,
    named_query,
    pair_layout,
    run_bench,
    run_parallel,
    score_matches,
)
from cadence.bench.harness import bench_config
from cadence.cli_main import app, exit_code_for
from cadence.compiler import compile_query
from cadence.config import CadenceConfig
from cadence.dependencies import check_rich, check_typer, get_console
from cadence.errors import (
    ContractViolation,
    DataError,
    IngestionError,
    InvariantViolation,
    PlanningError,
    UsageError,
)
from cadence.model import StreamDescriptor
from cadence.operators import Interval
from cadence.toolkit import ToolkitParams

logger = logging.getLogger(__name__)

cli = CliRunner()


def json_lines(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


class TestGenSpec:
    """Test dataset recipes."""

    def test_non_integral_period(self):
        """Test a frequency without an integer millisecond period is refused."""
        with pytest.raises(IngestionError, match="integer millisecond period"):
            GenSpec(frequency_hz=300)

    def test_span(self):
        """Test seconds override minutes."""
        assert GenSpec().span_ms == 60_000
        assert GenSpec(minutes=5, seconds=2).span_ms == 2000


class TestGenerate:
    """Test synthetic single and paired streams."""

    def test_deterministic(self):
        """Test the same seed gives the same data."""
        spec = GenSpec(seconds=1, seed=7)

        a, b = generate(spec).sources["signal"], generate(spec).sources["signal"]

        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.present, b.present)

    def test_dense_stream(self):
        """Test one event per slot without a gap model."""
        source = generate(GenSpec(seconds=1)).sources["signal"]

        assert source.event_count == 1000
        assert source.descriptor == StreamDescriptor(period=1)

    def test_segment_gaps(self):
        """Test each block keeps its leading present share."""
        spec = GenSpec(seconds=10, gap_model="segments", segments=10, overlap=0.5)

        source = generate(spec).sources["signal"]

        assert source.event_count == 5000
        assert source.present[:500].all()
        assert not source.present[500:1000].any()

    def test_artifact_truth(self):
        """Test injected artifacts come with one truth interval each."""
        spec = GenSpec(frequency_hz=125, seconds=40, waveform="sine", artifacts=5)

        dataset = generate(spec)

        assert len(dataset.truth) == 5
        assert all(iv.length == 50 * 8 for iv in dataset.truth)

    def test_too_many_artifacts(self):
        """Test artifacts must fit without overlapping."""
        spec = GenSpec(frequency_hz=125, seconds=1, waveform="sine", artifacts=10)

        with pytest.raises(UsageError, match="do not fit"):
            generate(spec)


class TestPairLayout:
    """Test availability overlap of generated stream pairs."""

    @pytest.mark.parametrize("overlap", [0.0, 0.25, 0.5, 1.0])
    def test_measured_overlap(self, overlap):
        """Test the shared share of time tracks the requested fraction."""
        spec = GenSpec(seconds=100, gap_model="segments", segments=10, overlap=overlap)

        first, second = pair_layout(spec, 8)

        assert measured_overlap(first, second, spec.span_ms) == pytest.approx(overlap, abs=0.01)

    def test_no_gaps_share_everything(self):
        """Test both streams cover the whole span without a gap model."""
        first, second = pair_layout(GenSpec(seconds=10), 8)

        assert first == second == [Interval(start=0, end=10_000)]

    def test_generate_pair(self):
        """Test the pair runs at 500 Hz and 125 Hz."""
        dataset = generate_pair(GenSpec(seconds=10, gap_model="segments", overlap=0.5))

        assert dataset.sources["ecg"].descriptor.period == 2
        assert dataset.sources["abp"].descriptor.period == 8
        assert dataset.overlap == pytest.approx(0.5, abs=0.01)


class TestScoreMatches:
    """Test detection scoring."""

    def test_partial_hit(self):
        """Test recall counts truth intervals hit and false positives count time outside them."""
        truth = [Interval(start=0, end=100), Interval(start=200, end=300)]

        score = score_matches([Interval(start=50, end=150)], truth, 1000)

        assert score.recall == 0.5
        assert score.false_positive_fraction == pytest.approx(0.05)

    def test_no_truth(self):
        """Test recall is vacuously perfect without truth."""
        assert score_matches([], [], 0).recall == 1.0


class TestHarness:
    """Test benchmark query selection and trials."""

    def test_unknown_bench(self):
        """Test bench names are checked."""
        with pytest.raises(UsageError, match="unknown bench"):
            bench_query("nope", {"signal": StreamDescriptor(period=1)})

    def test_unknown_plan_query(self):
        """Test plan names are checked."""
        with pytest.raises(UsageError, match="unknown query"):
            named_query("nope")

    def test_bench_floor(self):
        """Test bench runs plan at least a one second sink dimension."""
        assert bench_config(CadenceConfig()).dimension_floor_ms == 1000
        assert bench_config(CadenceConfig(dimension_floor_ms=5000)).dimension_floor_ms == 5000

    def test_trials(self):
        """Test every trial reports and agrees on the output."""
        sources = generate(GenSpec(seconds=2)).sources

        trials, summary, sink = run_bench("select", sources, "eager", trials=3)

        assert [t.trial for t in trials] == [0, 1, 2]
        assert {t.output_checksum for t in trials} == {summary.output_checksum}
        assert summary.trials == 3
        assert summary.events == 2000
        assert sink.count == 2000

    @pytest.mark.parametrize("name", ["fillconst", "normalize", "aggregate"])
    def test_engines_agree_on_gapped_data(self, name):
        """Test both engines produce the same output digest."""
        spec = GenSpec(seconds=10, gap_model="segments", segments=5, overlap=0.3)
        sources = generate(spec).sources

        _, eager, _ = run_bench(name, sources, "eager", trials=1)
        _, targeted, _ = run_bench(name, sources, "targeted", trials=1)

        assert targeted.output_checksum == eager.output_checksum
        assert targeted.windows_processed <= eager.windows_processed

    def test_pair_bench(self):
        """Test the join bench reads both streams of a pair."""
        sources = generate_pair(GenSpec(seconds=4)).sources

        trials, summary, _ = run_bench("join", sources, "targeted", trials=1)

        assert summary.events == 2000 + 500
        assert trials[0].events_out > 0

    def test_parallel_shards(self):
        """Test shards run on their own seeds."""
        _, summary = run_parallel("select", GenSpec(seconds=1), 2)

        assert summary.shards == 2
        assert summary.events == 2000
        assert len(summary.shard_checksums) == 2
        assert summary.shard_checksums[0] != summary.shard_checksums[1]


class TestExitCodes:
    """Test error to exit code mapping."""

    @pytest.mark.parametrize(
        "error,code",
        [
            (UsageError("x"), 1),
            (PlanningError("x"), 1),
            (DataError("x"), 2),
            (IngestionError("x"), 2),
            (InvariantViolation("x"), 3),
            (ContractViolation("x"), 3),
        ],
    )
    def test_codes(self, error, code):
        """Test each error family maps to its exit code."""
        assert exit_code_for(error) == code


class TestCli:
    """Test the command-line surface through typer's runner."""

    def test_gen_single(self, tmp_path):
        """Test gen writes one CSV with a header."""
        result = cli.invoke(app, ["gen", "--out", str(tmp_path), "--seconds", "1"])
        logger.info(f"gen output:\n{result.output}")

        assert result.exit_code == 0
        lines = (tmp_path / "signal.csv").read_text().splitlines()
        assert lines[0] == "timestamp,value"
        assert len(lines) == 1001

    def test_gen_pair(self, tmp_path):
        """Test pair mode writes both signals."""
        result = cli.invoke(app, ["gen", "--out", str(tmp_path), "--seconds", "1", "--pair"])

        assert result.exit_code == 0
        assert (tmp_path / "ecg.csv").exists()
        assert (tmp_path / "abp.csv").exists()

    def test_gen_artifacts_with_pair(self, tmp_path):
        """Test artifacts are single-stream only."""
        result = cli.invoke(app, ["gen", "--out", str(tmp_path), "--pair", "--artifacts", "3"])

        assert result.exit_code == 1

    def test_plan_identity(self):
        """Test the identity plan has a byte total."""
        result = cli.invoke(app, ["plan", "identity"])

        assert result.exit_code == 0
        assert "total bytes=" in result.stdout

    def test_plan_listing_with_trace(self):
        """Test the trace log precedes the edge lines."""
        result = cli.invoke(app, ["plan", "listing1", "--trace"])

        assert result.exit_code == 0
        out = result.stdout
        assert "join_2: dims" in out
        assert out.index("# locality trace") < out.index("# plan")
        assert "sig500->multicast_1 (0,2)[100] capacity=50 bytes=1050 buffer=0" in out

    def test_plan_floor(self):
        """Test the floor flag widens every edge."""
        result = cli.invoke(app, ["plan", "listing1", "--floor", "1000"])

        assert result.exit_code == 0
        assert "sig500->multicast_1 (0,2)[1000]" in result.stdout

    def test_plan_unknown(self):
        """Test unknown plan names exit with a usage error."""
        assert cli.invoke(app, ["plan", "nope"]).exit_code == 1

    def test_bench_json_lines(self):
        """Test a bench emits one line per trial plus a summary."""
        result = cli.invoke(app, ["bench", "select", "--seconds", "2", "--trials", "2"])
        logger.info(f"bench output:\n{result.output}")

        assert result.exit_code == 0
        rows = json_lines(result.stdout)
        assert len(rows) == 3
        assert [r.get("summary", False) for r in rows] == [False, False, True]
        assert rows[0]["bench"] == "select"
        assert rows[0]["engine"] == "eager"
        assert rows[0]["events"] == 2000
        assert {"wallMs", "throughputEventsPerSec", "windowsProcessed", "outputChecksum"} <= set(rows[0])

    def test_bench_engines_agree(self):
        """Test the CLI digest does not depend on the engine."""
        args = ["bench", "fillconst", "--seconds", "4", "--trials", "1", "--gaps", "segments", "--overlap", "0.5"]

        eager = json_lines(cli.invoke(app, args).stdout)[-1]
        targeted = json_lines(cli.invoke(app, [*args, "--engine", "targeted"]).stdout)[-1]

        assert targeted["outputChecksum"] == eager["outputChecksum"]

    def test_bench_from_files(self, tmp_path):
        """Test bench reads generated CSVs and writes the sink."""
        assert cli.invoke(app, ["gen", "--out", str(tmp_path), "--seconds", "1"]).exit_code == 0
        sink = tmp_path / "sink.csv"
        metrics = tmp_path / "metrics.jsonl"

        result = cli.invoke(
            app,
            ["bench", "select", "--data", str(tmp_path), "--trials", "1", "--sink", str(sink), "--out", str(metrics)],
        )

        assert result.exit_code == 0
        assert len(sink.read_text().splitlines()) == 1001
        assert len(json_lines(metrics.read_text())) == 2

    def test_bench_missing_files(self, tmp_path):
        """Test a data directory without the needed CSV is a usage error."""
        assert cli.invoke(app, ["bench", "join", "--data", str(tmp_path)]).exit_code == 1

    @pytest.mark.parametrize(
        "args",
        [["bench", "nope"], ["bench", "select", "--engine", "lazy"], ["bench", "select", "--fill", "linear"]],
    )
    def test_bench_bad_arguments(self, args):
        """Test unknown names exit with a usage error."""
        assert cli.invoke(app, args).exit_code == 1

    def test_detect_scores_generated_artifacts(self, tmp_path):
        """Test detect finds every artifact gen injected."""
        gen = cli.invoke(
            app, ["gen", "--out", str(tmp_path), "--seconds", "400", "--hz", "125", "--artifacts", "49"]
        )
        assert gen.exit_code == 0
        assert (tmp_path / "signal.truth.csv").exists()

        result = cli.invoke(app, ["detect", str(tmp_path / "signal.csv"), "--hz", "125"])
        logger.info(f"detect output:\n{result.output}")

        assert result.exit_code == 0
        score = json_lines(result.stdout)[-1]
        assert score["truth"] == 49
        assert score["recall"] == 1.0

    def test_detect_filtered(self, tmp_path):
        """Test the filtered stream keeps everything when nothing matches."""
        data = tmp_path / "flat.csv"
        data.write_text("timestamp,value\n" + "".join(f"{t},100\n" for t in range(200)))
        filtered = tmp_path / "filtered.csv"

        result = cli.invoke(app, ["detect", str(data), "--filtered", str(filtered)])

        assert result.exit_code == 0
        assert len(filtered.read_text().splitlines()) == 201

    def test_detect_bad_data(self, tmp_path):
        """Test decreasing timestamps exit with a data error."""
        data = tmp_path / "bad.csv"
        data.write_text("timestamp,value\n0,1\n2,1\n1,1\n")

        result = cli.invoke(app, ["detect", str(data)])

        assert result.exit_code == 2

    def test_detect_bad_mode(self, tmp_path):
        """Test the filter mode is checked."""
        data = tmp_path / "flat.csv"
        data.write_text("timestamp,value\n0,1\n")

        assert cli.invoke(app, ["detect", str(data), "--mode", "both"]).exit_code == 1


    def test_bench_sweep(self):
        """Test a sweep emits one summary per dataset size."""
        args = ["bench", "endtoend", "--sweep", "0.05,0.1", "--trials", "1", "--window-ms", "1000"]

        result = cli.invoke(app, args)

        assert result.exit_code == 0
        rows = json_lines(result.stdout)
        assert [r["minutes"] for r in rows] == [0.05, 0.1]
        assert [r["events"] for r in rows] == [1875, 3750]
        assert all(r["summary"] for r in rows)

    @pytest.mark.parametrize("extra", [["--sweep", "abc"], ["--sweep", "0.1,-1"], ["--sweep", "0.1", "--data", "."]])
    def test_bench_sweep_bad_arguments(self, extra):
        """Test malformed sizes and conflicting options are usage errors."""
        assert cli.invoke(app, ["bench", "endtoend", *extra]).exit_code == 1

    def test_bench_sink_is_byte_stable(self, tmp_path):
        """Test both engines write the same sink file byte for byte."""
        args = ["bench", "endtoend", "--seconds", "2", "--trials", "1", "--window-ms", "1000"]
        paths = {e: tmp_path / f"{e}.csv" for e in ("eager", "targeted")}

        for engine, path in paths.items():
            assert cli.invoke(app, [*args, "--engine", engine, "--sink", str(path)]).exit_code == 0

        assert paths["eager"].read_bytes() == paths["targeted"].read_bytes()
        assert len(paths["eager"].read_text().splitlines()) > 1

    def test_plan_dump_is_byte_stable(self):
        """Test repeated plan dumps agree with each other and with the compiled report."""
        args = ["plan", "endtoend", "--trace", "--window-ms", "1000"]

        first = cli.invoke(app, args).stdout
        second = cli.invoke(app, args).stdout
        report = compile_query(named_query("endtoend", ToolkitParams(window=1000))).report(trace=True)

        assert first == second
        assert report in first
        assert report == compile_query(named_query("endtoend", ToolkitParams(window=1000))).report(trace=True)


class TestDependencies:
    """Test optional CLI dependency probes."""

    def test_cli_extra_installed(self):
        """Test the test environment carries the cli extra."""
        assert check_rich() is True
        assert check_typer() is True

    def test_console(self):
        """Test the console can print."""
        assert callable(get_console().print)

# src/tests/test_operators.py
from __future__ import annotations

import numpy as np
import pytest

from cadence.compiler import Query, compile_query
from cadence.errors import ContractViolation, PlanningError
from cadence.operators import Interval
from cadence.runtime import execute

from . import oracles
from .oracles import NAN, assert_events_equal, source_events


class TestSelectWhere:
    """Per-event payload operators."""

    def test_select_leaves_absent_slots(self, dense_source, runner):
        """Test absent slots stay absent while present ones are mapped."""
        src = dense_source("s", (0, 2), [1.0, np.nan, 3.0])
        q = Query()
        out = q.source("s", (0, 2)).select(lambda v: v * 2)

        assert_events_equal(runner(out, src), [(0, 2, (2.0,)), (4, 2, (6.0,))])

    def test_select_identity_is_bitwise_equal(self, make_source, runner, engine):
        """Test an identity select reproduces the source."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).select(lambda v: v)

        assert_events_equal(runner(out, src, engine=engine), source_events(src))

    def test_select_matches_oracle(self, make_source, runner, engine):
        """Test an affine select over gappy data."""
        src = make_source("s", (0, 2), seed=3)
        q = Query()
        out = q.source("s", (0, 2)).select(lambda v: 2 * v + 1)

        expected = [(s, d, (2 * p[0] + 1,)) for s, d, p in source_events(src)]
        assert_events_equal(runner(out, src, engine=engine), expected)

    def test_select_with_sync(self, dense_source, runner):
        """Test with_sync hands the event times to the function first."""
        src = dense_source("s", (0, 5), [1.0, 2.0, 3.0])
        q = Query()
        out = q.source("s", (0, 5)).select(lambda sync, v: sync + v, with_sync=True)

        assert_events_equal(runner(out, src), [(0, 5, (1.0,)), (5, 5, (7.0,)), (10, 5, (13.0,))])

    def test_select_widens_payload(self, dense_source, runner):
        """Test a select producing two cells per event."""
        src = dense_source("s", (0, 2), [1.0, 4.0])
        q = Query()
        out = q.source("s", (0, 2)).select(lambda v: np.stack([v, -v], axis=1), width=2)

        assert out.descriptor.width == 2
        assert_events_equal(runner(out, src), [(0, 2, (1.0, -1.0)), (2, 2, (4.0, -4.0))])

    def test_select_wrong_width_is_contract_violation(self, dense_source, runner):
        """Test a function returning the wrong payload width is rejected."""
        src = dense_source("s", (0, 2), [1.0, 2.0])
        q = Query()
        out = q.source("s", (0, 2)).select(lambda v: np.ones((v.shape[0], 2)))

        with pytest.raises(ContractViolation, match="select function"):
            runner(out, src)

    def test_where_filters_pointwise(self, dense_source, runner):
        """Test a positive-value predicate."""
        src = dense_source("s", (0, 2), [1.0, -1.0])
        q = Query()
        out = q.source("s", (0, 2)).where(lambda v: v > 0)

        assert_events_equal(runner(out, src), [(0, 2, (1.0,))])

    def test_where_always_false_is_empty(self, make_source, runner, engine):
        """Test an always-false predicate empties the stream."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).where(lambda v: np.zeros(v.shape, dtype=bool))

        assert len(runner(out, src, engine=engine)) == 0

    def test_where_matches_oracle(self, make_source, runner, engine):
        """Test a threshold predicate over gappy data."""
        src = make_source("s", (0, 2), seed=5)
        q = Query()
        out = q.source("s", (0, 2)).where(lambda v: v > 4)

        expected = [e for e in source_events(src) if e[2][0] > 4]
        assert_events_equal(runner(out, src, engine=engine), expected)

    def test_where_wrong_shape_is_contract_violation(self, dense_source, runner):
        """Test a predicate returning the wrong number of flags."""
        src = dense_source("s", (0, 2), [1.0, 2.0])
        q = Query()
        out = q.source("s", (0, 2)).where(lambda v: np.ones(v.shape[0] + 1, dtype=bool))

        with pytest.raises(ContractViolation, match="where predicate"):
            runner(out, src)


class TestShift:
    """Time translation."""

    def test_shift_moves_descriptor(self):
        """Test shift rewrites the descriptor offset."""
        q = Query()
        src = q.source("s", (0, 2))

        assert src.shift(6).descriptor.label() == "(6,2)"
        assert src.shift(-2).descriptor.label() == "(-2,2)"

    @pytest.mark.parametrize("delta", [6, -2, 7, 0])
    def test_shift_matches_oracle(self, make_source, runner, engine, delta):
        """Test every event moves by delta with its duration kept."""
        src = make_source("s", (0, 2), seed=delta + 10)
        q = Query()
        out = q.source("s", (0, 2)).shift(delta)

        assert_events_equal(runner(out, src, engine=engine), oracles.shift(source_events(src), delta))


class TestAlterPeriodDuration:
    """Descriptor relabelling operators."""

    def test_alter_period_relabels_slots(self, dense_source, runner):
        """Test (0,8) slots {0,8,16} land on {0,2,4}."""
        src = dense_source("s", (0, 8), [1.0, 2.0, 3.0])
        q = Query()
        out = q.source("s", (0, 8)).alter_period(2)

        assert out.descriptor.label() == "(0,2)"
        assert_events_equal(runner(out, src), [(0, 2, (1.0,)), (2, 2, (2.0,)), (4, 2, (3.0,))])

    @pytest.mark.parametrize("new_period", [5, 2, 1])
    def test_alter_period_matches_oracle(self, make_source, runner, engine, new_period):
        """Test index-preserving relabelling over gappy data."""
        src = make_source("s", (0, 2), seed=new_period)
        q = Query()
        out = q.source("s", (0, 2)).alter_period(new_period)

        expected = oracles.alter_period(source_events(src), 0, 2, new_period)
        assert_events_equal(runner(out, src, engine=engine), expected)

    def test_alter_duration_matches_oracle(self, make_source, runner, engine):
        """Test every event gets the new duration."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).alter_duration(1)

        assert_events_equal(runner(out, src, engine=engine), oracles.alter_duration(source_events(src), 1))

    @pytest.mark.parametrize("duration", [0, 3])
    def test_alter_duration_outside_period_is_rejected(self, duration):
        """Test durations must lie in [1, period]."""
        q = Query()
        out = q.source("s", (0, 2)).alter_duration(duration)

        with pytest.raises(PlanningError, match="must lie in"):
            compile_query(q.build(out))


class TestChop:
    """Splitting events on a boundary grid."""

    def test_chop_splits_long_event(self, dense_source, runner):
        """Test one 10 ms event chopped every 4 ms."""
        src = dense_source("s", (0, 10), [7.0])
        q = Query()
        out = q.source("s", (0, 10)).chop(4)

        assert out.descriptor.label() == "(0,2)"
        assert_events_equal(runner(out, src), [(0, 4, (7.0,)), (4, 4, (7.0,)), (8, 2, (7.0,))])

    def test_chop_on_short_events_is_identity(self, make_source, runner, engine):
        """Test events that never cross a boundary pass through unchanged."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).chop(4)

        assert_events_equal(runner(out, src, engine=engine), source_events(src))

    def test_chop_matches_oracle(self, make_source, runner, engine):
        """Test chopping aggregated events preserves their total duration."""
        src = make_source("s", (0, 2), seed=8)
        q = Query()
        out = q.source("s", (0, 2)).tumbling_window(20).sum().chop(6)

        windows = oracles.aggregate(source_events(src), 0, 20, 20, "sum")
        expected = oracles.chop(windows, 6, 0)
        result = runner(out, src, engine=engine)

        assert_events_equal(result, expected)
        assert int(result.duration.sum()) == sum(d for _, d, _ in windows)

    def test_chop_zero_is_rejected(self):
        """Test a zero boundary fails at plan time."""
        q = Query()
        out = q.source("s", (0, 2)).chop(0)

        with pytest.raises(PlanningError, match="chop boundary"):
            compile_query(q.build(out))


class TestAggregate:
    """Windowed reductions."""

    def test_tumbling_mean(self, dense_source, runner):
        """Test the mean of five values in one 10 ms window."""
        src = dense_source("s", (0, 2), [1.0, 3.0, 5.0, 7.0, 9.0])
        q = Query()
        out = q.source("s", (0, 2)).tumbling_window(10).mean()

        assert_events_equal(runner(out, src), [(0, 10, (5.0,))])

    def test_tumbling_descriptor(self):
        """Test a 100 ms tumbling window over a 2 ms stream emits on (0,100)."""
        q = Query()
        out = q.source("s", (0, 2)).tumbling_window(100).mean()

        assert out.descriptor.label() == "(0,100)"

    def test_one_slot_sum_is_identity(self, make_source, runner, engine):
        """Test a period-wide sum reproduces the input values."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).tumbling_window(2).sum()

        assert_events_equal(runner(out, src, engine=engine), source_events(src))

    @pytest.mark.parametrize("fn", ["sum", "max", "min", "count", "mean", "std"])
    def test_sliding_matches_oracle(self, make_source, runner, engine, fn):
        """Test every built-in reducer over a sliding window with gaps."""
        src = make_source("s", (0, 2), seed=21)
        q = Query()
        out = q.source("s", (0, 2)).sliding_window(12, 4).reduce(fn)

        expected = oracles.aggregate(source_events(src), 0, 12, 4, fn)
        rtol = 1e-6 if fn in ("mean", "std") else 0.0
        assert_events_equal(runner(out, src, engine=engine), expected, rtol=rtol)

    def test_callable_reducer(self, make_source, runner):
        """Test a user reducer sees only present values."""
        src = make_source("s", (0, 2), seed=4)
        q = Query()
        out = q.source("s", (0, 2)).aggregate(8, 8, lambda v: float(v.max() - v.min()))

        events = source_events(src)
        highs = oracles.aggregate(events, 0, 8, 8, "max")
        lows = oracles.aggregate(events, 0, 8, 8, "min")
        expected = [(s, d, (hi[0] - lo[0],)) for (s, d, hi), (_, _, lo) in zip(highs, lows, strict=True)]
        assert_events_equal(runner(out, src), expected)

    def test_window_shorter_than_stride_is_rejected(self):
        """Test gaps between windows are unsupported."""
        q = Query()
        out = q.source("s", (0, 2)).aggregate(4, 8)

        with pytest.raises(PlanningError, match="shorter than its stride"):
            compile_query(q.build(out))

    def test_window_off_period_is_rejected(self):
        """Test windows must be multiples of the input period."""
        q = Query()
        out = q.source("s", (0, 2)).tumbling_window(5).sum()

        with pytest.raises(PlanningError, match="multiple of the input period"):
            compile_query(q.build(out))


class TestJoin:
    """Temporal joins."""

    def test_inner_join_example(self, dense_source, runner):
        """Test the overlap pairs of a (0,2) and a (0,5) stream."""
        left = dense_source("l", (0, 2), [1.0, 2.0, 3.0, 4.0, 5.0])
        right = dense_source("r", (0, 5), [10.0, 20.0])
        q = Query()
        out = q.source("l", (0, 2)).join(q.source("r", (0, 5)))
        result = runner(out, left, right)

        assert out.descriptor.label() == "(0,1)"
        assert result.sync.tolist() == [0, 2, 4, 5, 6, 8]
        assert result.duration.tolist() == [2, 2, 1, 1, 2, 2]
        assert result.payload[:, 1].tolist() == [10.0, 10.0, 10.0, 20.0, 20.0, 20.0]

    def test_self_join_is_identity(self, make_source, runner, engine):
        """Test a multicast self-join keeping the left payload reproduces the input."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).multicast(
            lambda s: s.select(lambda v: v).join(s.select(lambda v: v), combine=lambda left, right: left)
        )

        assert_events_equal(runner(out, src, engine=engine), source_events(src))

    @pytest.mark.parametrize("mode", ["inner", "left", "outer"])
    def test_join_matches_oracle(self, make_source, runner, engine, mode):
        """Test every join mode against interval intersection."""
        left = make_source("l", (0, 2), n=250, seed=31, holes=((20, 60),))
        right = make_source("r", (0, 5), n=100, seed=32, holes=((50, 70),))
        q = Query()
        out = q.source("l", (0, 2)).join(q.source("r", (0, 5)), mode=mode)

        expected = oracles.join(source_events(left), source_events(right), mode, 0, 1)
        assert_events_equal(runner(out, left, right, engine=engine), expected)

    def test_join_on_coarse_grid(self, make_source, runner, engine):
        """Test offset streams whose common grid is 2 ms."""
        left = make_source("l", (0, 4), n=120, seed=41)
        right = make_source("r", (2, 6), n=80, seed=42, holes=((10, 30),))
        q = Query()
        out = q.source("l", (0, 4)).join(q.source("r", (2, 6)))

        assert str(out.descriptor) == "(0,2)x2"
        expected = oracles.join(source_events(left), source_events(right), "inner", 0, 2)
        assert_events_equal(runner(out, left, right, engine=engine), expected)

    def test_combine_sets_width(self, dense_source, runner):
        """Test a combine function collapses both payloads into one cell."""
        left = dense_source("l", (0, 2), [5.0, 6.0])
        right = dense_source("r", (0, 2), [1.0, 1.0])
        q = Query()
        out = q.source("l", (0, 2)).join(q.source("r", (0, 2)), combine=lambda a, b: a - b)

        assert out.descriptor.width == 1
        assert_events_equal(runner(out, left, right), [(0, 2, (4.0,)), (2, 2, (5.0,))])

    def test_misaligned_grids_are_rejected(self):
        """Test streams whose grids never meet."""
        q = Query()
        out = q.source("l", (0, 2)).join(q.source("r", (1, 4)))

        with pytest.raises(PlanningError, match="never align"):
            compile_query(q.build(out))


class TestClipJoin:
    """Successor pairing with clipping."""

    def test_right_event_clips_left(self, dense_source, runner):
        """Test a right event inside the left lifetime cuts it short."""
        left = dense_source("l", (0, 10), [1.0])
        right = dense_source("r", (0, 4), [np.nan, 5.0])
        q = Query()
        out = q.source("l", (0, 10)).clip_join(q.source("r", (0, 4)))

        assert_events_equal(runner(out, left, right), [(0, 4, (1.0, 5.0))])

    def test_missing_successor_gives_null(self, dense_source, runner):
        """Test a left event with no right successor keeps its duration."""
        left = dense_source("l", (0, 10), [1.0])
        right = dense_source("r", (0, 4), [np.nan, np.nan])
        q = Query()
        out = q.source("l", (0, 10)).clip_join(q.source("r", (0, 4)))

        assert_events_equal(runner(out, left, right), [(0, 10, (1.0, NAN))])

    def test_colocated_events_do_not_clip(self, dense_source, runner):
        """Test a right event at the left sync pairs without clipping."""
        left = dense_source("l", (0, 4), [1.0, 2.0])
        right = dense_source("r", (0, 4), [7.0, 8.0])
        q = Query()
        out = q.source("l", (0, 4)).clip_join(q.source("r", (0, 4)))

        assert_events_equal(runner(out, left, right), [(0, 4, (1.0, 7.0)), (4, 4, (2.0, 8.0))])

    def test_clip_join_matches_oracle(self, make_source, engine):
        """Test successor pairing over gappy streams."""
        left = make_source("l", (0, 10), n=60, seed=51, holes=((10, 15),))
        right = make_source("r", (0, 4), n=150, seed=52, holes=((40, 70),))
        q = Query()
        out = q.source("l", (0, 10)).clip_join(q.source("r", (0, 4)))
        plan = compile_query(q.build(out))
        result = execute(plan, [left, right], engine).events

        expected = oracles.clip_join(source_events(left), source_events(right), plan.sink_dimension)
        assert_events_equal(result, expected)


class TestTransform:
    """Whole-slice functions."""

    def test_identity(self, make_source, runner, engine):
        """Test an identity slice function."""
        src = make_source("s", (0, 2))
        q = Query()
        out = q.source("s", (0, 2)).transform(2, lambda v, m: (v, m))

        assert_events_equal(runner(out, src, engine=engine), source_events(src))

    def test_reverse_slice(self, dense_source, runner):
        """Test a payload permutation keeps the sync times."""
        src = dense_source("s", (0, 2), [1.0, 2.0, 3.0, 4.0, 5.0])
        q = Query()
        out = q.source("s", (0, 2)).transform(10, lambda v, m: (v[:, ::-1], m[:, ::-1]))
        result = runner(out, src)

        assert result.sync.tolist() == [0, 2, 4, 6, 8]
        assert result.values.tolist() == [5.0, 4.0, 3.0, 2.0, 1.0]

    def test_wrong_shape_is_contract_violation(self, dense_source, runner):
        """Test a function emitting fewer samples than its slice."""
        src = dense_source("s", (0, 2), [1.0, 2.0, 3.0, 4.0, 5.0])
        q = Query()
        out = q.source("s", (0, 2)).transform(10, lambda v, m: (v[:, :1], m[:, :1]))

        with pytest.raises(ContractViolation, match="transform function"):
            runner(out, src)

    def test_composite_input_is_rejected(self):
        """Test transforms need scalar streams."""
        q = Query()
        out = q.source("l", (0, 2)).join(q.source("r", (0, 2))).transform(2, lambda v, m: (v, m))

        with pytest.raises(PlanningError, match="scalar stream"):
            compile_query(q.build(out))


FUZZ_SEEDS = range(200)
REDUCERS = ("sum", "max", "min", "count", "mean", "std")


def _random_source(make_source, name, period, rng):
    """Up to 300 slots with random absences and one random hole."""
    n = int(rng.integers(20, 300))
    lo = int(rng.integers(0, n))
    return make_source(
        name,
        (0, period),
        n=n,
        seed=int(rng.integers(2**31)),
        missing=float(rng.uniform(0.0, 0.5)),
        holes=((lo, lo + int(rng.integers(0, 60))),),
    )


def _pick(rng, options):
    return options[int(rng.integers(len(options)))]


def _check(out, sources, expected, rng, rtol=0.0):
    """Match the oracle, then rerun on only the lineage of a random run of sink windows."""
    plan = compile_query(out.query.build(out))
    full = execute(plan, sources).events
    assert_events_equal(full, expected, rtol=rtol)

    d = plan.sink_dimension
    origin = plan.layout.window(plan.sink, 0).start
    horizon = max(s.start + s.values.size * s.period for s in sources)
    first = int(rng.integers(-1, horizon // d + 2))
    asked = Interval(start=origin + first * d, end=origin + (first + int(rng.integers(1, 4))) * d)
    needed = plan.lineage.resolve(asked)
    restricted = [oracles.restrict(s, needed[s.name]) for s in sources]

    part = execute(plan, restricted).events
    assert_events_equal(oracles.within(part, asked), oracles.events_of(oracles.within(full, asked)), rtol=rtol)


class TestRandomStreams:
    """Every operator against its brute-force oracle on seeded random gappy streams."""

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_select(self, make_source, seed):
        """Test an affine select."""
        rng = np.random.default_rng(seed)
        src = _random_source(make_source, "s", _pick(rng, (1, 2, 5)), rng)
        a, b = int(rng.integers(-3, 4)), int(rng.integers(-5, 6))
        q = Query()
        out = q.source("s", src.descriptor).select(lambda v: a * v + b)

        expected = [(s, d, (a * p[0] + b,)) for s, d, p in source_events(src)]
        _check(out, [src], expected, rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_where(self, make_source, seed):
        """Test a threshold predicate."""
        rng = np.random.default_rng(seed)
        src = _random_source(make_source, "s", _pick(rng, (1, 2, 5)), rng)
        cut = int(rng.integers(0, 10))
        q = Query()
        out = q.source("s", src.descriptor).where(lambda v: v > cut)

        expected = [e for e in source_events(src) if e[2][0] > cut]
        _check(out, [src], expected, rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_shift(self, make_source, seed):
        """Test translation by a random delta."""
        rng = np.random.default_rng(seed)
        src = _random_source(make_source, "s", _pick(rng, (1, 2, 5)), rng)
        delta = int(rng.integers(-12, 13))
        q = Query()
        out = q.source("s", src.descriptor).shift(delta)

        _check(out, [src], oracles.shift(source_events(src), delta), rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_alter_duration(self, make_source, seed):
        """Test a random duration inside the period."""
        rng = np.random.default_rng(seed)
        period = _pick(rng, (2, 5, 8))
        src = _random_source(make_source, "s", period, rng)
        duration = int(rng.integers(1, period + 1))
        q = Query()
        out = q.source("s", src.descriptor).alter_duration(duration)

        _check(out, [src], oracles.alter_duration(source_events(src), duration), rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_alter_period(self, make_source, seed):
        """Test slot relabelling onto a random period."""
        rng = np.random.default_rng(seed)
        period = _pick(rng, (2, 4, 5))
        src = _random_source(make_source, "s", period, rng)
        new_period = _pick(rng, (1, 2, 3, 5, 8))
        q = Query()
        out = q.source("s", src.descriptor).alter_period(new_period)

        _check(out, [src], oracles.alter_period(source_events(src), 0, period, new_period), rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_chop(self, make_source, seed):
        """Test chopping window sums on a random boundary."""
        rng = np.random.default_rng(seed)
        period = _pick(rng, (1, 2, 5))
        src = _random_source(make_source, "s", period, rng)
        window = period * int(rng.integers(1, 8))
        boundary = int(rng.integers(1, window + 3))
        q = Query()
        out = q.source("s", src.descriptor).tumbling_window(window).sum().chop(boundary)

        sums = oracles.aggregate(source_events(src), 0, window, window, "sum")
        _check(out, [src], oracles.chop(sums, boundary, 0), rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_aggregate(self, make_source, seed):
        """Test a random reducer over a random sliding window."""
        rng = np.random.default_rng(seed)
        period = _pick(rng, (1, 2, 5))
        src = _random_source(make_source, "s", period, rng)
        stride = period * int(rng.integers(1, 4))
        window = stride * int(rng.integers(1, 4))
        fn = _pick(rng, REDUCERS)
        q = Query()
        out = q.source("s", src.descriptor).sliding_window(window, stride).reduce(fn)

        expected = oracles.aggregate(source_events(src), 0, window, stride, fn)
        _check(out, [src], expected, rng, rtol=1e-6 if fn in ("mean", "std") else 0.0)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_join(self, make_source, seed):
        """Test a random join mode between streams of random periods."""
        rng = np.random.default_rng(seed)
        left = _random_source(make_source, "l", _pick(rng, (2, 4, 5)), rng)
        right = _random_source(make_source, "r", _pick(rng, (2, 5, 8)), rng)
        mode = _pick(rng, ("inner", "left", "outer"))
        q = Query()
        out = q.source("l", left.descriptor).join(q.source("r", right.descriptor), mode=mode)

        grid = out.descriptor
        expected = oracles.join(source_events(left), source_events(right), mode, grid.offset, grid.period)
        _check(out, [left, right], expected, rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_clip_join(self, make_source, seed):
        """Test successor pairing of a coarse stream with a fine one."""
        rng = np.random.default_rng(seed)
        left = _random_source(make_source, "l", _pick(rng, (8, 10)), rng)
        right = _random_source(make_source, "r", _pick(rng, (2, 4)), rng)
        q = Query()
        out = q.source("l", left.descriptor).clip_join(q.source("r", right.descriptor))

        dimension = compile_query(q.build(out)).sink_dimension
        expected = oracles.clip_join(source_events(left), source_events(right), dimension)
        _check(out, [left, right], expected, rng)

    @pytest.mark.parametrize("seed", FUZZ_SEEDS)
    def test_transform(self, make_source, seed):
        """Test mirroring every slice of a random length."""
        rng = np.random.default_rng(seed)
        period = _pick(rng, (1, 2, 5))
        src = _random_source(make_source, "s", period, rng)
        slice_ms = period * int(rng.integers(1, 6))
        q = Query()
        out = q.source("s", src.descriptor).transform(slice_ms, lambda v, m: (v[:, ::-1], m[:, ::-1]))

        _check(out, [src], oracles.reverse_slices(src, slice_ms), rng)

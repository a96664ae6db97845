# src/tests/test_stream_model.py
from __future__ import annotations

import numpy as np
import pytest

from cadence.errors import IngestionError, InvariantViolation, MonotonicityError, OutOfRangeError, PlanningError
from cadence.model import BufferPool, Event, EventBatch, FWindow, StreamDescriptor, capacity, descriptor_from_hz


class TestStreamDescriptor:
    """Test (offset, period) descriptors."""

    @pytest.mark.parametrize(
        "hz,period", [(500, 2), (200, 5), (125, 8), (1000, 1), (1, 1000)]
    )
    def test_period_from_frequency(self, hz, period):
        """Test device rates map to integer millisecond periods."""
        assert descriptor_from_hz(hz).period == period

    def test_non_integral_period_is_rejected(self):
        """Test 300 Hz has no integer millisecond period."""
        with pytest.raises(IngestionError, match="integer millisecond period"):
            descriptor_from_hz(300)

    def test_non_positive_frequency_is_rejected(self):
        """Test zero frequency."""
        with pytest.raises(IngestionError, match="positive"):
            descriptor_from_hz(0)

    def test_invalid_shapes(self):
        """Test period and width validation."""
        with pytest.raises(ValueError, match="period"):
            StreamDescriptor(period=0)
        with pytest.raises(ValueError, match="scalar payloads"):
            StreamDescriptor(period=2, width=3)

    def test_grid_arithmetic(self):
        """Test alignment helpers on an offset grid."""
        desc = StreamDescriptor(offset=3, period=5)

        assert desc.on_grid(13)
        assert not desc.on_grid(12)
        assert desc.align_up(9) == 13
        assert desc.align_down(12) == 8
        assert desc.slot_index(18) == 3
        assert desc.same_grid(StreamDescriptor(offset=-2, period=5))
        assert not desc.same_grid(StreamDescriptor(offset=3, period=10))

    def test_composite_label(self):
        """Test composite descriptors print their width."""
        desc = StreamDescriptor.composite(0, 2, 3)

        assert str(desc) == "(0,2)x3"
        assert desc.label() == "(0,2)"


class TestCapacity:
    """Test slot counts of FWindows."""

    @pytest.mark.parametrize("period,dimension,expected", [(2, 10, 5), (2, 100, 50), (5, 10, 2)])
    def test_capacity(self, period, dimension, expected):
        """Test capacity is dimension over period."""
        assert capacity(StreamDescriptor(period=period), dimension) == expected

    def test_non_divisible_dimension_names_edge(self):
        """Test a dimension off the period is a planning error naming the edge."""
        with pytest.raises(PlanningError, match="on edge a->b"):
            capacity(StreamDescriptor(period=2), 7, "a->b")


class TestFWindow:
    """Test the fixed-interval window."""

    @pytest.mark.parametrize("sync,period,t,slot", [(0, 2, 0, 0), (0, 2, 7, 3), (100, 5, 119, 3)])
    def test_slot_of(self, sync, period, t, slot):
        """Test time to slot mapping."""
        window = FWindow(StreamDescriptor(period=period), 10 * period, sync)

        assert window.slot_of(t) == slot

    def test_slot_of_outside_window(self):
        """Test times beyond the window are out of range."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)

        with pytest.raises(OutOfRangeError):
            window.slot_of(10)

    def test_off_grid_sync_is_rejected(self):
        """Test a window must start on its grid."""
        with pytest.raises(OutOfRangeError, match="not on the slot grid"):
            FWindow(StreamDescriptor(period=2), 10, 3)

    def test_slide_reuses_buffer(self):
        """Test sliding forward clears the same columns."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)
        window.write(np.array([0, 4]), np.array([2, 2]), np.array([[1.0], [2.0]], dtype=np.float32))
        payload = window.payload

        window.slide(100)

        assert window.payload is payload
        assert window.sync == 100
        assert window.present_count() == 0
        assert window.vsync.tolist() == [100, 102, 104, 106, 108]

    def test_slide_to_same_sync_is_noop(self):
        """Test sliding in place keeps the contents."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)
        window.write(np.array([2]), np.array([2]), np.array([[5.0]], dtype=np.float32))

        window.slide(0)

        assert window.present_count() == 1

    def test_slide_backward_is_rejected(self):
        """Test windows never move back in time."""
        window = FWindow(StreamDescriptor(period=2), 10, 100)

        with pytest.raises(MonotonicityError, match="only move forward"):
            window.slide(0)

    def test_advance_keeps_overlap(self):
        """Test advancing keeps the slots both intervals share."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)
        window.write(np.array([4, 8]), np.array([2, 2]), np.array([[1.0], [2.0]], dtype=np.float32))

        window.advance(4)

        events = window.events()
        assert events.sync.tolist() == [4, 8]
        assert events.values.tolist() == [1.0, 2.0]
        assert window.vsync.tolist() == [4, 6, 8, 10, 12]

    def test_write_ignores_events_outside(self):
        """Test write only stores events whose sync falls inside the window."""
        window = FWindow(StreamDescriptor(period=2), 10, 10)

        kept = window.write(np.array([8, 10, 20]), np.array([2, 2, 2]), np.zeros((3, 1), dtype=np.float32))

        assert kept == 1
        assert window.events().sync.tolist() == [10]

    def test_validate_detects_overlap(self):
        """Test overlapping events break the window invariants."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)
        window.write(np.array([0, 2]), np.array([3, 2]), np.zeros((2, 1), dtype=np.float32))

        with pytest.raises(InvariantViolation, match="overlapping"):
            window.validate()

    def test_validate_detects_absent_duration(self):
        """Test a present slot needs a positive duration."""
        window = FWindow(StreamDescriptor(period=2), 10, 0)
        window.write(np.array([0]), np.array([0]), np.zeros((1, 1), dtype=np.float32))

        with pytest.raises(InvariantViolation, match="non-positive duration"):
            window.validate()


class TestBufferPool:
    """Test column-set reuse."""

    def test_release_then_acquire_allocates_nothing(self):
        """Test released buffers are handed back out."""
        pool = BufferPool()
        cols = pool.acquire(5)
        pool.mark_steady()

        pool.release(cols)
        again = pool.acquire(5)

        assert again is cols
        assert pool.steady_state_allocations == 0

    def test_fresh_shape_counts(self):
        """Test a new shape after the mark is a steady-state allocation."""
        pool = BufferPool()
        pool.acquire(5)
        pool.mark_steady()

        pool.acquire(6, width=2)

        assert pool.steady_state_allocations == 1


class TestEvents:
    """Test event records and batches."""

    def test_present_event_needs_duration(self):
        """Test present events must last."""
        with pytest.raises(ValueError, match="positive duration"):
            Event(sync=0, duration=0, payload=1.0)

    def test_batch_roundtrip(self):
        """Test events survive a trip through a batch."""
        events = [Event(sync=0, duration=2, payload=1.5), Event(sync=2, duration=2, payload=(2.5,))]
        batch = EventBatch.from_events(events)

        assert len(batch) == 2
        assert batch.end.tolist() == [2, 4]
        assert [e.value for e in batch.to_events()] == [1.5, 2.5]

# src/cadence/toolkit/fir.py
from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
from scipy.signal import firwin

from ..errors import PlanningError

logger = logging.getLogger(__name__)


def design_lowpass(cutoff_hz: float, num_taps: int, period_ms: int) -> npt.NDArray[np.float64]:
    """Hamming-windowed sinc low-pass taps with unit gain at DC."""
    if num_taps < 1 or num_taps % 2 == 0:
        raise PlanningError(f"low-pass designer needs an odd tap count, got {num_taps}")
    fs = 1000.0 / period_ms
    if not 0 < cutoff_hz < fs / 2:
        raise PlanningError(f"cutoff {cutoff_hz} Hz must lie inside (0, {fs / 2:g}) Hz for a {period_ms} ms period")
    taps = firwin(num_taps, cutoff_hz, window="hamming", fs=fs)
    logger.debug(f"Designed {num_taps}-tap low-pass at {cutoff_hz} Hz (fs={fs:g} Hz)")
    return np.asarray(taps, dtype=np.float64)


class FirKernel:
    """Transform body for a FIR filter: each row holds the last len(taps) samples, newest last."""

    def __init__(self, taps: Sequence[float]) -> None:
        arr = np.asarray(taps, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise PlanningError("a FIR filter needs at least one tap")
        self.taps = arr
        self._reversed = arr[::-1].copy()

    @property
    def history(self) -> int:
        return int(self.taps.size - 1)

    def __call__(
        self, values: npt.NDArray[np.float64], present: npt.NDArray[np.bool_]
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
        out = values @ self._reversed
        ok = present.all(axis=1)
        return out[:, None], ok[:, None]

# src/cadence/shapes/dtw.py
from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt

from ..errors import UsageError

logger = logging.getLogger(__name__)


def _lexmin(
    cost: npt.NDArray[np.float64],
    length: npt.NDArray[np.int64],
    other_cost: npt.NDArray[np.float64],
    other_length: npt.NDArray[np.int64],
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    better = (other_cost < cost) | ((other_cost == cost) & (other_length < length))
    return np.where(better, other_cost, cost), np.where(better, other_length, length)


def cdtw_batch(
    template: npt.ArrayLike, candidates: npt.ArrayLike, radius: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Sakoe-Chiba banded DTW of one template against many equal-length candidates.

    Cell cost is the squared difference. Among the cheapest warping paths the
    shortest one wins, so the result does not depend on argument order.
    Only two rows of ``2 * radius + 1`` band cells are kept per candidate.

    Returns:
        (cost, path_length) per candidate row
    """
    a = np.asarray(template, dtype=np.float64).reshape(-1)
    b = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    m = a.size
    if b.shape[1] != m:
        raise UsageError(f"template has {m} samples but candidates have {b.shape[1]}")
    if not 0 <= radius < m:
        raise UsageError(f"band radius must lie in [0, {m}), got {radius}")

    n = b.shape[0]
    width = 2 * radius + 1
    prev_cost = np.full((n, width), np.inf)
    prev_len = np.zeros((n, width), dtype=np.int64)
    for i in range(m):
        cur_cost = np.full((n, width), np.inf)
        cur_len = np.zeros((n, width), dtype=np.int64)
        for d in range(width):
            j = i + d - radius
            if j < 0 or j >= m:
                continue
            cell = (a[i] - b[:, j]) ** 2
            if i == 0 and j == 0:
                cur_cost[:, d] = cell
                cur_len[:, d] = 1
                continue
            # (i-1, j-1) shares band offset d with the previous row
            best_cost, best_len = prev_cost[:, d], prev_len[:, d]
            if d + 1 < width:
                best_cost, best_len = _lexmin(best_cost, best_len, prev_cost[:, d + 1], prev_len[:, d + 1])
            if d >= 1:
                best_cost, best_len = _lexmin(best_cost, best_len, cur_cost[:, d - 1], cur_len[:, d - 1])
            cur_cost[:, d] = cell + best_cost
            cur_len[:, d] = best_len + 1
        prev_cost, prev_len = cur_cost, cur_len

    return prev_cost[:, radius], prev_len[:, radius]


def cdtw_cost(a: npt.ArrayLike, b: npt.ArrayLike, radius: int) -> tuple[float, int]:
    """Unnormalised banded DTW cost and the length of the path achieving it."""
    a_arr = np.asarray(a, dtype=np.float64).reshape(-1)
    b_arr = np.asarray(b, dtype=np.float64).reshape(-1)
    if a_arr.size != b_arr.size:
        raise UsageError(f"cdtw needs equal lengths, got {a_arr.size} and {b_arr.size}")
    cost, length = cdtw_batch(a_arr, b_arr[None, :], radius)
    return float(cost[0]), int(length[0])


def cdtw_distance(a: npt.ArrayLike, b: npt.ArrayLike, radius: int) -> float:
    """Banded DTW cost divided by warping path length."""
    cost, length = cdtw_cost(a, b, radius)
    return cost / length

"""Pure-numpy windowed-statistics kernels.

Fallback for the compiled module; both accumulate per-window offset terms
in the same (row, col) order so results agree bitwise.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _grids(values, k, stride):
    h, w = values.shape
    rows = np.arange(0, h - k + 1, stride)
    cols = np.arange(0, w - k + 1, stride)
    return rows[:, None], cols[None, :]


def tri_map(values: np.ndarray, k: int, stride: int) -> np.ndarray:
    """Per-window mean absolute difference between center and the other cells."""
    rows, cols = _grids(values, k, stride)
    c = k // 2
    center = values[rows + c, cols + c]
    acc = np.zeros_like(center)
    for i in range(k):
        for j in range(k):
            if i == c and j == c:
                continue
            acc += np.abs(center - values[rows + i, cols + j])
    return acc / (k * k - 1)


def tpi_map(values: np.ndarray, k: int, stride: int) -> np.ndarray:
    """Per-window signed difference between center and the mean of the others."""
    rows, cols = _grids(values, k, stride)
    c = k // 2
    center = values[rows + c, cols + c]
    acc = np.zeros_like(center)
    for i in range(k):
        for j in range(k):
            if i == c and j == c:
                continue
            acc += values[rows + i, cols + j]
    return center - acc / (k * k - 1)


def rough_map(values: np.ndarray, k: int, stride: int) -> np.ndarray:
    """Per-window maximum absolute difference between center and the other cells."""
    rows, cols = _grids(values, k, stride)
    c = k // 2
    center = values[rows + c, cols + c]
    acc = np.zeros_like(center)
    for i in range(k):
        for j in range(k):
            if i == c and j == c:
                continue
            np.maximum(acc, np.abs(center - values[rows + i, cols + j]), out=acc)
    return acc


def max_window_range(values: np.ndarray, k: int) -> float:
    """Maximum over all stride-1 k-by-k windows of (window max - window min)."""
    rows, cols = _grids(values, k, 1)
    hi = np.full((rows.size, cols.size), -np.inf)
    lo = np.full((rows.size, cols.size), np.inf)
    for i in range(k):
        for j in range(k):
            block = values[rows + i, cols + j]
            np.maximum(hi, block, out=hi)
            np.minimum(lo, block, out=lo)
    return float((hi - lo).max())

"""Cellular noise: distance to the n-th nearest seeded feature point."""

from __future__ import annotations

import numpy as np


def worley_grid_from_points(points: np.ndarray, shape, d_idx: int) -> np.ndarray:
    """Each cell's value is the Euclidean distance to its (d_idx+1)-th
    nearest feature point (0-based rank in the ascending distance list)."""
    points = np.asarray(points, dtype=np.float64)
    if d_idx >= len(points):
        raise ValueError(f"d_idx {d_idx} out of range for {len(points)} points")
    h, w = shape
    out = np.empty((h, w))
    cols = np.arange(w, dtype=np.float64)
    # row blocks keep the (rows, cols, points) distance tensor small
    block = max(1, (1 << 22) // (w * len(points)))
    for r0 in range(0, h, block):
        rows = np.arange(r0, min(r0 + block, h), dtype=np.float64)
        dr = rows[:, None, None] - points[:, 0]
        dc = cols[None, :, None] - points[:, 1]
        dist = np.hypot(dr, dc)
        if d_idx == 0:
            out[r0 : r0 + len(rows)] = dist.min(axis=-1)
        else:
            out[r0 : r0 + len(rows)] = np.partition(dist, d_idx, axis=-1)[..., d_idx]
    return out


def worley_grid(seed: int, n_points: int, d_idx: int, shape) -> np.ndarray:
    rng = np.random.default_rng(seed)
    points = np.column_stack(
        [rng.uniform(0, shape[0] - 1, n_points), rng.uniform(0, shape[1] - 1, n_points)]
    )
    return worley_grid_from_points(points, shape, d_idx)

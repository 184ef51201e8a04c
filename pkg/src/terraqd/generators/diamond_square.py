"""Midpoint-displacement terrain on a (2^n + 1) grid, cropped to size.

Each midpoint is assigned P percent of the mean of its four surrounding
points plus a random offset R; after each diamond+square iteration the
offset range shrinks to +-1/(steps*D + 1), and P is drawn uniformly from
[Z, 100 - Z].
"""

from __future__ import annotations

import numpy as np


def internal_side(resolution: int) -> int:
    n = 1
    while 2**n + 1 < resolution:
        n += 1
    return 2**n + 1


def r_bound(steps: int, level: int) -> float:
    return 1.0 / (steps * level + 1)


def diamond_square_grid(seed, corners, z, level, resolution, record_offsets=None):
    """Generate the raw (un-normalized) grid.

    record_offsets, when given, collects (steps, R) for every random offset
    drawn, for auditing the shrinking-range rule.
    """
    side = internal_side(resolution)
    rng = np.random.default_rng(seed)
    grid = np.zeros((side, side))
    grid[0, 0], grid[0, -1], grid[-1, 0], grid[-1, -1] = corners

    def displace(avg, steps):
        bound = r_bound(steps, level)
        r = rng.uniform(-bound, bound)
        p = rng.uniform(z, 100.0 - z)
        if record_offsets is not None:
            record_offsets.append((steps, r))
        return (p / 100.0) * avg + r

    step = side - 1
    steps = 1
    while step > 1:
        half = step // 2
        # diamond step: centers of squares
        for r0 in range(0, side - 1, step):
            for c0 in range(0, side - 1, step):
                avg = (grid[r0, c0] + grid[r0, c0 + step]
                       + grid[r0 + step, c0] + grid[r0 + step, c0 + step]) / 4.0
                grid[r0 + half, c0 + half] = displace(avg, steps)
        # square step: centers of diamonds (edge midpoints)
        for r0 in range(0, side, half):
            start = half if r0 % step == 0 else 0
            for c0 in range(start, side, step):
                total = 0.0
                count = 0
                for dr, dc in ((-half, 0), (half, 0), (0, -half), (0, half)):
                    rr, cc = r0 + dr, c0 + dc
                    if 0 <= rr < side and 0 <= cc < side:
                        total += grid[rr, cc]
                        count += 1
                grid[r0, c0] = displace(total / count, steps)
        step = half
        steps += 1
    return grid[:resolution, :resolution]

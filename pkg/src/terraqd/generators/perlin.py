"""Seeded gradient-noise lattice with multi-octave fractal summation."""

from __future__ import annotations

import numpy as np

_TABLE_SIZE = 256

# 8 unit lattice gradients; unit length keeps single-octave output in [-1, 1].
_GRADS = np.array(
    [
        (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0),
        (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0),
    ]
)
_GRADS /= np.linalg.norm(_GRADS, axis=1, keepdims=True)


def permutation_table(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(_TABLE_SIZE)
    return np.concatenate([perm, perm])


def _fade(t):
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin(x, y, perm: np.ndarray):
    """Classic 2D lattice gradient noise, zero at integer lattice points."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    xi = x0 % _TABLE_SIZE
    yi = y0 % _TABLE_SIZE

    def grad_dot(ix, iy, dx, dy):
        h = perm[perm[ix] + iy] % len(_GRADS)
        g = _GRADS[h]
        return g[..., 0] * dx + g[..., 1] * dy

    n00 = grad_dot(xi, yi, fx, fy)
    n10 = grad_dot(xi + 1, yi, fx - 1.0, fy)
    n01 = grad_dot(xi, yi + 1, fx, fy - 1.0)
    n11 = grad_dot(xi + 1, yi + 1, fx - 1.0, fy - 1.0)

    u = _fade(fx)
    v = _fade(fy)
    nx0 = n00 + u * (n10 - n00)
    nx1 = n01 + u * (n11 - n01)
    return nx0 + v * (nx1 - nx0)


def fbm(x, y, scale, octaves, persistence, lacunarity, perm):
    """Sum of `octaves` noise layers at geometrically scaled freq/amplitude."""
    total = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    for o in range(octaves):
        freq = lacunarity**o / scale
        total = total + persistence**o * perlin(np.asarray(x) * freq, np.asarray(y) * freq, perm)
    return total


def fbm_grid(shape, scale, octaves, persistence, lacunarity, seed) -> np.ndarray:
    perm = permutation_table(seed)
    rows, cols = np.mgrid[0 : shape[0], 0 : shape[1]]
    return fbm(cols.astype(np.float64), rows.astype(np.float64),
               scale, octaves, persistence, lacunarity, perm)

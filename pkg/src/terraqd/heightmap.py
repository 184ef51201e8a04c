"""Heightmap raster type, normalization, window iteration and PGM I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

PGM_MAXVAL = 65535
DEFAULT_VERTICAL_SCALE = 3.0  # metres for normalized height 1.0


class DimensionError(ValueError):
    pass


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    row0: int
    col0: int
    k: int


@dataclass(frozen=True)
class Heightmap:
    """Row-major grid of normalized heights in [0, 1].

    ``vertical_scale`` is the number of metres corresponding to a
    normalized height of 1.0; all metric computations (traversability,
    walker) multiply by it.
    """

    values: np.ndarray = field(repr=False)
    vertical_scale: float = DEFAULT_VERTICAL_SCALE

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise DimensionError("heightmap values must be a 2D grid")
        if v.shape[0] < 3 or v.shape[1] < 3:
            raise DimensionError("heightmap must be at least 3x3")
        if v.size == 0:
            raise DimensionError("empty heightmap")
        if np.nanmin(v) < 0.0 or np.nanmax(v) > 1.0 or not np.isfinite(v).all():
            raise ValueError("heightmap values must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def metres(self) -> np.ndarray:
        return self.values * self.vertical_scale


def normalize(raw, vertical_scale: float = DEFAULT_VERTICAL_SCALE) -> Heightmap:
    """Affinely map a raw grid to [0, 1]; constant grids map to all-zeros."""
    g = np.asarray(raw, dtype=np.float64)
    if g.size == 0:
        raise DimensionError("cannot normalize an empty grid")
    lo = g.min()
    hi = g.max()
    if hi > lo:
        g = (g - lo) / (hi - lo)
    else:
        g = np.zeros_like(g)
    return Heightmap(values=g, vertical_scale=vertical_scale)


def windows(hm: Heightmap, k: int, stride: int):
    """Every k-by-k window with top-left on the stride lattice, row-major."""
    if k < 1 or k > min(hm.width, hm.height):
        raise DimensionError(f"kernel {k} does not fit a {hm.height}x{hm.width} raster")
    if stride < 1:
        raise DimensionError("stride must be >= 1")
    for r in range(0, hm.height - k + 1, stride):
        for c in range(0, hm.width - k + 1, stride):
            yield Window(r, c, k)


def window_count(shape, k: int, stride: int) -> int:
    h, w = shape
    return ((h - k) // stride + 1) * ((w - k) // stride + 1)


def write_pgm(hm: Heightmap, path) -> None:
    """Binary 16-bit PGM; vertical scale kept in a comment line."""
    words = np.round(hm.values * PGM_MAXVAL).astype(">u2")
    header = f"P5\n# vscale={hm.vertical_scale}\n{hm.width} {hm.height}\n{PGM_MAXVAL}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(words.tobytes())


def read_pgm(path) -> Heightmap:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise FormatError("not a binary PGM (missing P5 magic)")
    pos = 2
    fields = []
    vscale = DEFAULT_VERTICAL_SCALE
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("truncated PGM header")
        if data[pos : pos + 1] == b"#":
            end = data.index(b"\n", pos)
            m = re.search(rb"vscale=([0-9.eE+-]+)", data[pos:end])
            if m:
                vscale = float(m.group(1))
            pos = end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise FormatError(f"bad PGM header field: {exc}") from None
    if maxval != PGM_MAXVAL:
        raise FormatError(f"expected maxval {PGM_MAXVAL}, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos : pos + 2 * width * height]
    if len(payload) != 2 * width * height:
        raise FormatError("truncated PGM payload")
    words = np.frombuffer(payload, dtype=">u2").reshape(height, width)
    return Heightmap(values=words.astype(np.float64) / PGM_MAXVAL, vertical_scale=vscale)

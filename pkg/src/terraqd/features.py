"""Representation-agnostic terrain descriptors and correlation analysis.

TRI, TPI and Roughness compare each window's center cell to every other
cell in the window; the map-level value is the mean over all strided
windows (absolute value per window for TPI).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .heightmap import DimensionError, Heightmap

DEFAULT_KERNEL = 30
DEFAULT_STRIDE = 2

FEATURE_KINDS = ("TRI", "TPI", "Roughness")


class CorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureDescriptor:
    kind: str
    kernel: int = DEFAULT_KERNEL
    stride: int = DEFAULT_STRIDE

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.kernel < 2:
            raise ValueError("kernel must be >= 2")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def name(self) -> str:
        return f"{self.kind}(k={self.kernel})"


@dataclass(frozen=True)
class FeaturePair:
    f1: FeatureDescriptor
    f2: FeatureDescriptor
    ranges: tuple  # ((min1, max1), (min2, max2))

    def __post_init__(self):
        if self.f1.kind == self.f2.kind:
            raise ValueError("archive axes must use two distinct feature kinds")
        for lo, hi in self.ranges:
            if not hi > lo:
                raise ValueError("feature ranges must be non-degenerate")


def window_tri(window: np.ndarray) -> float:
    """Mean absolute difference between the center cell and all others."""
    w = np.asarray(window, dtype=np.float64)
    c = w.shape[0] // 2
    center = w[c, c]
    diffs = np.abs(center - w)
    return float((diffs.sum() - diffs[c, c]) / (w.size - 1))


def window_tpi(window: np.ndarray) -> float:
    """Signed difference between the center cell and the mean of the others."""
    w = np.asarray(window, dtype=np.float64)
    c = w.shape[0] // 2
    center = w[c, c]
    return float(center - (w.sum() - center) / (w.size - 1))


def window_roughness(window: np.ndarray) -> float:
    """Maximum absolute difference between the center cell and all others."""
    w = np.asarray(window, dtype=np.float64)
    c = w.shape[0] // 2
    diffs = np.abs(w[c, c] - w)
    diffs[c, c] = 0.0
    return float(diffs.max())


_MAP_FNS = {
    "TRI": kernels.tri_map,
    "TPI": kernels.tpi_map,
    "Roughness": kernels.rough_map,
}


def feature_map(hm: Heightmap, d: FeatureDescriptor) -> np.ndarray:
    if d.kernel > min(hm.width, hm.height):
        raise DimensionError(f"kernel {d.kernel} exceeds raster size {hm.height}x{hm.width}")
    return _MAP_FNS[d.kind](hm.values, d.kernel, d.stride)


def describe(hm: Heightmap, d: FeatureDescriptor) -> float:
    """Mean per-window descriptor value over the whole raster."""
    m = feature_map(hm, d)
    if d.kind == "TPI":
        m = np.abs(m)
    return float(m.mean())


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise CorrelationError("need two equal-length sequences of at least 2 samples")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise CorrelationError("correlation undefined for zero-variance input")
    xm = x - x.mean()
    ym = y - y.mean()
    return float((xm @ ym) / np.sqrt((xm @ xm) * (ym @ ym)))


def correlation_matrix(heightmaps, difficulties, descriptors):
    """Pairwise Pearson matrix over descriptor columns plus difficulty.

    Returns (column names, matrix)."""
    if len(heightmaps) != len(difficulties) or len(heightmaps) < 2:
        raise CorrelationError("need at least 2 labelled terrains")
    columns = [[describe(hm, d) for hm in heightmaps] for d in descriptors]
    columns.append(list(difficulties))
    names = [d.name for d in descriptors] + ["difficulty"]
    n = len(columns)
    mat = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = pearson(columns[i], columns[j])
    return names, mat


def correlation_csv(names, matrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(names))
    for name, row in zip(names, matrix):
        writer.writerow([name] + [repr(float(v)) for v in row])
    return buf.getvalue()

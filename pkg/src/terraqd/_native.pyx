# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled windowed-statistics kernels (hot loop of feature tagging)."""

import numpy as np

cimport numpy as cnp

BACKEND = "native"


def tri_map(const double[:, :] values, int k, int stride):
    cdef int h = values.shape[0], w = values.shape[1]
    cdef int nr = (h - k) // stride + 1, nc = (w - k) // stride + 1
    cdef int c = k // 2
    out = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, :] o = out
    cdef int r, q, i, j
    cdef double center, acc, d
    for r in range(nr):
        for q in range(nc):
            center = values[r * stride + c, q * stride + c]
            acc = 0.0
            for i in range(k):
                for j in range(k):
                    if i == c and j == c:
                        continue
                    d = center - values[r * stride + i, q * stride + j]
                    acc += d if d >= 0 else -d
            o[r, q] = acc / (k * k - 1)
    return out


def tpi_map(const double[:, :] values, int k, int stride):
    cdef int h = values.shape[0], w = values.shape[1]
    cdef int nr = (h - k) // stride + 1, nc = (w - k) // stride + 1
    cdef int c = k // 2
    out = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, :] o = out
    cdef int r, q, i, j
    cdef double center, acc
    for r in range(nr):
        for q in range(nc):
            center = values[r * stride + c, q * stride + c]
            acc = 0.0
            for i in range(k):
                for j in range(k):
                    if i == c and j == c:
                        continue
                    acc += values[r * stride + i, q * stride + j]
            o[r, q] = center - acc / (k * k - 1)
    return out


def rough_map(const double[:, :] values, int k, int stride):
    cdef int h = values.shape[0], w = values.shape[1]
    cdef int nr = (h - k) // stride + 1, nc = (w - k) // stride + 1
    cdef int c = k // 2
    out = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, :] o = out
    cdef int r, q, i, j
    cdef double center, best, d
    for r in range(nr):
        for q in range(nc):
            center = values[r * stride + c, q * stride + c]
            best = 0.0
            for i in range(k):
                for j in range(k):
                    if i == c and j == c:
                        continue
                    d = center - values[r * stride + i, q * stride + j]
                    if d < 0:
                        d = -d
                    if d > best:
                        best = d
            o[r, q] = best
    return out


def max_window_range(const double[:, :] values, int k):
    cdef int h = values.shape[0], w = values.shape[1]
    cdef int nr = h - k + 1, nc = w - k + 1
    cdef int r, q, i, j
    cdef double lo, hi, v, worst = 0.0
    for r in range(nr):
        for q in range(nc):
            lo = values[r, q]
            hi = lo
            for i in range(k):
                for j in range(k):
                    v = values[r + i, q + j]
                    if v < lo:
                        lo = v
                    elif v > hi:
                        hi = v
            if hi - lo > worst:
                worst = hi - lo
    return worst

"""Backend selection for the windowed-statistics kernels.

The compiled extension is preferred; the numpy fallback is used when it is
missing (e.g. running from a source tree without building). Set
``TERRAQD_KERNELS=python`` to force the fallback, ``native`` to require the
extension.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("TERRAQD_KERNELS", "auto")

if _choice == "python":
    _impl = _kernels_py
elif _choice == "native":
    from . import _native as _impl
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

import numpy as _np


def _as_f64(values):
    return _np.ascontiguousarray(values, dtype=_np.float64)


def tri_map(values, k, stride):
    return _np.asarray(_impl.tri_map(_as_f64(values), k, stride))


def tpi_map(values, k, stride):
    return _np.asarray(_impl.tpi_map(_as_f64(values), k, stride))


def rough_map(values, k, stride):
    return _np.asarray(_impl.rough_map(_as_f64(values), k, stride))


def max_window_range(values, k):
    return float(_impl.max_window_range(_as_f64(values), k))

"""Compare the compiled window kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--size 256] [--kernel 30]
       [--stride 2] [--repeats 5]
"""

import argparse
import time

import numpy as np

from terraqd import _kernels_py
from terraqd.kernels import BACKEND

try:
    from terraqd import _native
except ImportError:
    _native = None


def bench(fn, values, kernel, stride, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(values, kernel, stride)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--kernel", type=int, default=30)
    ap.add_argument("--stride", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    values = np.ascontiguousarray(rng.random((args.size, args.size)))
    print(f"raster {args.size}x{args.size}, kernel {args.kernel}, "
          f"stride {args.stride}, active backend: {BACKEND}")
    names = ["tri_map", "tpi_map", "rough_map", "max_window_range"]
    for name in names:
        py_fn = getattr(_kernels_py, name)
        if name == "max_window_range":
            def py_call(v, k, s, fn=py_fn):
                return fn(v, k)
        else:
            py_call = py_fn
        t_py = bench(py_call, values, args.kernel, args.stride, args.repeats)
        line = f"{name:18s} python {t_py * 1e3:9.2f} ms"
        if _native is not None:
            nat_fn = getattr(_native, name)
            if name == "max_window_range":
                def nat_call(v, k, s, fn=nat_fn):
                    return fn(v, k)
            else:
                nat_call = nat_fn
            t_nat = bench(nat_call, values, args.kernel, args.stride, args.repeats)
            line += f"   native {t_nat * 1e3:9.2f} ms   speedup {t_py / t_nat:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()

"""Timing comparison of the compiled and pure-Python simulation kernels.

Run as ``python benchmarks/bench_kernel.py``. Both kernels implement the
same event-driven algorithm; this reports wall time on identical workloads
and verifies the outputs agree while at it.
"""

import time

import numpy as np

from hviosc import _kernel_py

try:
    from hviosc import _kernel
except ImportError:
    _kernel = None

CASES = [
    ("forced, impact-rich", (0.17, 1.1, 0.0, 0.0, 2000.0, 0.01)),
    ("forced, linear regime", (0.1, 1.5, 0.0, 0.0, 2000.0, 0.01)),
    ("free bouncing, E = 2", (0.0, 1.0, 0.0, 2.0, 2000.0, 0.01)),
]


def _time(fn, args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    if _kernel is None:
        print("compiled kernel not built; only timing the pure-Python one")
    for name, args in CASES:
        t_py, out_py = _time(_kernel_py.run, args)
        line = f"{name:24s} python {t_py * 1e3:8.1f} ms"
        if _kernel is not None:
            t_c, out_c = _time(_kernel.run, args)
            dq = np.abs(out_c[1] - out_py[1]).max()
            line += (f"   compiled {t_c * 1e3:8.1f} ms"
                     f"   speedup {t_py / t_c:5.1f}x   max|dq| {dq:.2e}")
        print(line)


if __name__ == "__main__":
    main()

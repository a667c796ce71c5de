"""Times the three hot kernels on both backends.

The compiled extension and the pure-Python module implement identical
semantics (the parity tests enforce it); this script measures what the
compilation buys on representative workloads:

    python3 benchmarks/kernel_benchmark.py [--repeats N]
"""
import argparse
import time

import numpy as np

from pdcmi import _kernels_py

try:
    from pdcmi import _kernels
except ImportError:
    _kernels = None


def _best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(rng):
    p, m, n = 6, 16, 20000
    coeffs = rng.standard_normal((p, m, m)) * 0.05
    innovations = rng.standard_normal((n, m))
    presamples = rng.standard_normal((p, m))

    signal = rng.standard_normal(8192)

    n_points = 400
    points = np.concatenate([rng.standard_normal((n_points // 2, 6)) + 1.0,
                             rng.standard_normal((n_points // 2, 6)) - 1.0])
    labels = np.concatenate([np.ones(n_points // 2),
                             -np.ones(n_points // 2)])
    sq = np.sum(points ** 2, axis=1)
    dist = sq[:, None] + sq[None, :] - 2.0 * points @ points.T
    qmat = np.outer(labels, labels) * np.exp(-0.5 * dist)

    return [
        ("mvar_simulate  (p=6, M=16, n=20000)", "mvar_simulate",
         (coeffs, innovations, presamples)),
        ("burg_recursion (n=8192, order=20)", "burg_recursion",
         (signal, 20)),
        ("smo_solve      (n=400, C=4)", "smo_solve",
         (qmat, labels, 4.0, 1e-3, 200000)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per kernel (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []
    for label, name, payload in _workloads(rng):
        py_t = _best_of(args.repeats, getattr(_kernels_py, name), *payload)
        if _kernels is not None:
            c_t = _best_of(args.repeats, getattr(_kernels, name), *payload)
            rows.append((label, py_t, c_t))
        else:
            rows.append((label, py_t, None))

    print("%-38s %12s %12s %9s" % ("kernel", "python", "compiled",
                                   "speedup"))
    for label, py_t, c_t in rows:
        if c_t is None:
            print("%-38s %10.2f ms %12s %9s" % (label, py_t * 1e3,
                                                "n/a", "n/a"))
        else:
            print("%-38s %10.2f ms %9.2f ms %8.1fx"
                  % (label, py_t * 1e3, c_t * 1e3, py_t / c_t))
    if _kernels is None:
        print("\ncompiled extension not importable; showing the pure-"
              "Python backend only")


if __name__ == "__main__":
    main()

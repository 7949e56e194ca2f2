"""Time each hot kernel under the compiled and pure-Python backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Prints one row per kernel with the best wall time of each backend and the
speed-up. Both backends are checked to return identical results first.
"""

import argparse
import timeit

import numpy as np

from weakchaos import kernels


def _cases(quick):
    scale = 10 if quick else 1
    rng = np.random.Generator(np.random.Philox(1))
    jac = np.ascontiguousarray(rng.uniform(-2, 2, (200_000 // scale, 2, 2)))
    x = np.array([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    return [
        ("rk4_jacobi", lambda m: m.rk4_jacobi(-1.0, 0.0, 1.0, 1e-3, 300_000 // scale)),
        ("benettin_jacobi", lambda m: m.benettin_jacobi(-1.0, 0.6, -0.8, 1e-3, 300_000 // scale, 10)),
        ("logistic_log_sensitivity", lambda m: m.logistic_log_sensitivity(2.0, 0.2, 1_000_000 // scale)),
        ("cat_map_iterate", lambda m: m.cat_map_iterate(0.1, 0.2, 1_000_000 // scale)),
        ("map_spectrum_2x2", lambda m: m.map_spectrum_2x2(jac)),
        ("geodesic_rk4", lambda m: m.geodesic_rk4(-1.0, x, v, 1e-3, 30_000 // scale)),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="one tenth of the default sizes")
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled extension is not available; build it with "
                         "`pip install -e . --no-build-isolation`")

    print(f"{'kernel':<26}{'cython [s]':>12}{'python [s]':>12}{'speed-up':>10}  match")
    for name, call in _cases(args.quick):
        same = _same(call(kernels.compiled), call(kernels.pure))
        tc = min(timeit.repeat(lambda: call(kernels.compiled), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: call(kernels.pure), number=1, repeat=args.repeat))
        print(f"{name:<26}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.0f}x  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()

"""Benchmark the batched index kernels: compiled backend vs NumPy fallback.

Times tt_entries and sparse_gradient_cores on sampled-completion shaped
workloads (m index rows over a d-way tensor with uniform TT rank r) and
prints one table row per case. Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from nttkit._kernels import _pyops

try:
    from nttkit._kernels import _ctops
except ImportError:
    _ctops = None

CASES = [
    # (d, n, r, m)
    (3, 20, 3, 5400),
    (4, 12, 4, 20000),
    (8, 10, 2, 30000),
    (10, 8, 5, 60000),
]


def random_cores(d, n, r, rng):
    ranks = [1] + [r] * (d - 1) + [1]
    return [(rng.standard_normal((ranks[k], n, ranks[k + 1]))
             + 1j * rng.standard_normal((ranks[k], n, ranks[k + 1])))
            for k in range(d)]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="keep the best of this many timings")
    args = ap.parse_args()

    if _ctops is None:
        print("compiled backend not built; timing the NumPy fallback only")
    header = f"{'case':>18}  {'kernel':>16}  {'numpy':>10}"
    if _ctops is not None:
        header += f"  {'cython':>10}  {'speedup':>8}"
    print(header)

    rng = np.random.default_rng(0)
    for d, n, r, m in CASES:
        cores = random_cores(d, n, r, rng)
        idx = rng.integers(0, n, size=(m, d))
        vals = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        label = f"d={d} n={n} r={r} m={m}"

        for kernel, call in (
            ("tt_entries", lambda mod: mod.tt_entries(cores, idx)),
            ("sparse_gradient", lambda mod: mod.sparse_gradient_cores(
                cores, cores, idx, vals)),
        ):
            t_py = best_of(lambda: call(_pyops), args.repeat)
            line = f"{label:>18}  {kernel:>16}  {t_py * 1e3:>8.2f}ms"
            if _ctops is not None:
                t_ct = best_of(lambda: call(_ctops), args.repeat)
                line += f"  {t_ct * 1e3:>8.2f}ms  {t_py / t_ct:>7.1f}x"
                a, b = call(_ctops), call(_pyops)
                ok = np.allclose(a[0] if isinstance(a, list) else a,
                                 b[0] if isinstance(b, list) else b,
                                 atol=1e-10)
                if not ok:
                    line += "  MISMATCH"
            print(line)


if __name__ == "__main__":
    main()

"""Compare the numba and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Numba compilation happens once, before timing. With STOLARSKY_BACKEND=numpy
set, the "numba" rows run the same loop as plain Python and are skipped.
"""

import argparse
import time

import numpy as np

from stolarsky._backend import USE_NUMBA
from stolarsky._kernels import invert_array, stolarsky_array


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.PCG64(0))
    alpha = rng.uniform(-5, 5, args.n)
    a = rng.uniform(0.1, 10, args.n)
    b = rng.uniform(0.1, 10, args.n)
    m = max(1, args.n // 100)
    c = stolarsky_array(alpha[:m], a[:m], b[:m])

    backends = ["numba", "numpy"] if USE_NUMBA else ["numpy"]
    results = {}
    for be in backends:
        stolarsky_array(alpha[:10], a[:10], b[:10], backend=be)  # compile
        invert_array(a[:10], b[:10], c[:10], -64.0, 64.0, 200, backend=be)
        results[be] = (
            best_of(lambda: stolarsky_array(alpha, a, b, backend=be), args.repeat),
            best_of(lambda: invert_array(a[:m], b[:m], c, -64.0, 64.0, 200, backend=be), args.repeat),
        )
    if len(backends) == 2:
        x = stolarsky_array(alpha, a, b, backend="numba")
        y = stolarsky_array(alpha, a, b, backend="numpy")
        print(f"max relative disagreement: {np.max(np.abs(x - y) / y):.2e}")
    print(f"{'backend':<8} {'mean (n=%d)' % args.n:>20} {'invert (n=%d)' % m:>20}")
    for be, (t_mean, t_inv) in results.items():
        print(f"{be:<8} {t_mean * 1e3:>17.1f} ms {t_inv * 1e3:>17.1f} ms")


if __name__ == "__main__":
    main()

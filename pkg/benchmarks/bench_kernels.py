"""Benchmark the compiled kernels against the NumPy fallback.

Times the scalar kernel evaluations that dominate fitting, plus whole
fits driven through each backend. Run from the repo root:

    python benchmarks/bench_kernels.py [--sizes 20,200,5000] [--repeats 2000]
"""

import argparse
import time
from unittest import mock

import numpy as np

from tailrisk import _kernels
from tailrisk.gpd import fit_profile_mle, fit_zhang_lm


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def sample(n, seed):
    rng = np.random.default_rng(seed)
    u = rng.uniform(size=n)
    return np.ascontiguousarray((1.0 / 0.2) * (1.0 - (1.0 - u) ** 0.2))


def bench_kernels(backends, sizes, repeats):
    rows = []
    for n in sizes:
        x = sample(n, seed=7)
        b = -0.1 / float(np.mean(x))
        for name, mod in backends.items():
            rows.append((f"profile_score n={n}", name, timeit(lambda: mod.profile_score(b, x), repeats)))
            rows.append((f"profile_loglik n={n}", name, timeit(lambda: mod.profile_loglik(b, x), repeats)))
            rows.append((f"zhang_g n={n}", name, timeit(lambda: mod.zhang_g(b, x, -0.5), repeats)))
            rows.append((f"gpd_loglik n={n}", name, timeit(lambda: mod.gpd_loglik(x, -0.2, 1.0), repeats)))
    return rows


def bench_fits(backends, sizes, repeats):
    rows = []
    for n in sizes:
        x = sample(n, seed=13)
        fit_repeats = max(1, repeats // 50)
        for name, mod in backends.items():
            patches = {
                attr: getattr(mod, attr)
                for attr in ("k_of_b", "profile_score", "profile_loglik", "zhang_g")
            }
            with mock.patch.multiple("tailrisk.gpd._kernels", **patches):
                rows.append((f"fit_profile_mle n={n}", name, timeit(lambda: fit_profile_mle(x), fit_repeats)))
                rows.append((f"fit_zhang_lm n={n}", name, timeit(lambda: fit_zhang_lm(x), fit_repeats)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="20,200,5000")
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    rows = bench_kernels(backends, sizes, args.repeats)
    rows += bench_fits(backends, sizes, args.repeats)

    by_case = {}
    for case, backend, secs in rows:
        by_case.setdefault(case, {})[backend] = secs
    width = max(len(c) for c in by_case)
    header = f"{'case':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for case, per in by_case.items():
        line = f"{case:<{width}}  " + "".join(f"{per[b] * 1e6:>10.2f}us" for b in backends)
        if "numpy" in per and "cython" in per:
            line += f"{per['numpy'] / per['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()

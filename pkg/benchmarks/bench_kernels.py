"""Timing comparison of the numba kernels against their numpy twins.

Runs each kernel both ways on identical inputs, asserts bit-level
agreement, and prints a small table. Usage:

    python3 benchmarks/bench_kernels.py [--size N]

Setting HALLUSTAT_DISABLE_NUMBA=1 makes the whole library use the numpy
path; this script imports both twins directly and ignores the flag.
"""

import argparse
import time

import numpy as np

from hallustat import kernels


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_sample_codes(size):
    rng = np.random.default_rng(0)
    top = 24
    pow_i = np.array([2**n for n in range(top + 1)], dtype=np.int64)
    base = np.concatenate(([0], np.cumsum(pow_i)[:-1])).astype(np.int64)
    pow_f = pow_i.astype(np.float64)
    cum = 1.0 - 0.5 ** np.arange(1, top + 2)
    cum[-1] = 1.0
    u_len = rng.random(size)
    u_off = rng.random(size)
    args = (u_len, u_off, cum, base, pow_f, pow_i)
    a_codes, a_lens = kernels.sample_codes_np(*args)
    b_codes, b_lens = kernels._sample_codes_nb(*args)
    assert np.array_equal(a_codes, b_codes) and np.array_equal(a_lens, b_lens)
    return (
        best_of(lambda: kernels.sample_codes_np(*args)),
        best_of(lambda: kernels._sample_codes_nb(*args)),
    )


def bench_count_misses(size):
    rng = np.random.default_rng(1)
    keys = np.unique(rng.integers(0, 2**20, size=4096)).astype(np.int64)
    codes = rng.integers(0, 2**20, size=size).astype(np.int64)
    assert kernels.count_misses_np(codes, keys, 0) == kernels._count_misses_nb(
        codes, keys, np.int64(0)
    )
    return (
        best_of(lambda: kernels.count_misses_np(codes, keys, 0)),
        best_of(lambda: kernels._count_misses_nb(codes, keys, np.int64(0))),
    )


def bench_product_probs(m):
    pmf = np.array([0.9, 0.1])
    a = kernels.product_probs_np(pmf, m)
    b = kernels._product_probs_nb(pmf, np.int64(m))
    assert np.array_equal(a, b)
    return (
        best_of(lambda: kernels.product_probs_np(pmf, m)),
        best_of(lambda: kernels._product_probs_nb(pmf, np.int64(m))),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=2_000_000,
                        help="array length for the sampling/counting kernels")
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rows = [
        ("sample_codes", *bench_sample_codes(args.size)),
        ("count_misses", *bench_count_misses(args.size)),
        ("product_probs (m=20)", *bench_product_probs(20)),
    ]
    print(f"{'kernel':<22}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, t_np, t_nb in rows:
        print(f"{name:<22}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms"
              f"{t_np / t_nb:>9.1f}x")
    print("\nall kernels agree bitwise")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the compiled transceiver kernel against the numpy fallback.

Generates one pre-drawn batch of trials (channels, symbols, noise) and times
count_bit_errors on each available backend, verifying that both return the
same error count.

Usage: python3 benchmarks/bench_kernels.py [--trials N] [--branch-size N]
"""

import argparse
import math
import time

import numpy as np

from stcmmimo import _ber_core_py
from stcmmimo.modulation import ModulationScheme

try:
    from stcmmimo import _ber_core as compiled
except ImportError:
    compiled = None


def make_batch(rng, trials, n, users):
    cplx = lambda *shape: (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ) / math.sqrt(2)
    h0 = cplx(trials, n)
    h1 = cplx(trials, n)
    hhat0 = h0 + 0.15 * cplx(trials, n)
    hhat1 = h1 + 0.15 * cplx(trials, n)
    w_interf = cplx(trials, 2 * (users - 1), n) / n
    sym = rng.integers(0, 4, size=(trials, 2 * users))
    noise = 0.3 * cplx(trials, 2)
    return h0, h1, hhat0, hhat1, w_interf, sym, noise


def bench(fn, args, repeats):
    best = math.inf
    count = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        count = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return count, best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--branch-size", type=int, default=50)
    parser.add_argument("--users", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    rng = np.random.default_rng(opts.seed)
    batch = make_batch(rng, opts.trials, opts.branch_size, opts.users)
    points = ModulationScheme.qpsk().points
    args = (*batch, points, False)

    count_py, t_py = bench(_ber_core_py.count_bit_errors, args, opts.repeats)
    rate = opts.trials / t_py
    print(f"numpy backend    : {t_py * 1e3:8.2f} ms  ({rate:,.0f} trials/s)  "
          f"errors={count_py}")

    if compiled is None:
        print("compiled backend : not built (pip install -e . with Cython available)")
        return

    count_cy, t_cy = bench(compiled.count_bit_errors, args, opts.repeats)
    rate = opts.trials / t_cy
    print(f"compiled backend : {t_cy * 1e3:8.2f} ms  ({rate:,.0f} trials/s)  "
          f"errors={count_cy}")
    assert count_cy == count_py, "backends disagree"
    print(f"speedup          : {t_py / t_cy:6.2f}x")


if __name__ == "__main__":
    main()

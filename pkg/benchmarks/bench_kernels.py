#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Both backends are imported directly (ignoring DESCRANK_PURE_PYTHON), run on
identical random inputs, and cross-checked before timing. Reports per-call
time and the compiled/pure speedup.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --lcs-sizes 128 512 --repeats 30
"""

import argparse
import random
import statistics
import sys
import time

from descrank._kernels import _pykernels

try:
    from descrank._kernels import _speedups
except ImportError:
    _speedups = None


def time_call(fn, args, repeats):
    best = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best.append(time.perf_counter() - start)
    return statistics.median(best)


def fmt_seconds(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    return f"{seconds * 1e3:8.2f} ms"


def bench_lcs(rng, sizes, vocab, repeats):
    print(f"lcs_length (vocab {vocab})")
    print(f"{'length':>8}  {'pure':>11}  {'compiled':>11}  {'speedup':>8}")
    for size in sizes:
        a = [rng.randrange(vocab) for _ in range(size)]
        b = [rng.randrange(vocab) for _ in range(size)]
        pure = time_call(_pykernels.lcs_length, (a, b), repeats)
        if _speedups is None:
            print(f"{size:8d}  {fmt_seconds(pure)}  {'n/a':>11}  {'n/a':>8}")
            continue
        assert _speedups.lcs_length(a, b) == _pykernels.lcs_length(a, b)
        fast = time_call(_speedups.lcs_length, (a, b), repeats)
        print(
            f"{size:8d}  {fmt_seconds(pure)}  {fmt_seconds(fast)}  {pure / fast:7.1f}x"
        )
    print()


def bench_overlap(rng, sizes, orders, vocab, repeats):
    print(f"clipped_ngram_overlap (vocab {vocab})")
    print(f"{'length':>8}  {'n':>3}  {'pure':>11}  {'compiled':>11}  {'speedup':>8}")
    for size in sizes:
        a = [rng.randrange(vocab) for _ in range(size)]
        b = [rng.randrange(vocab) for _ in range(size)]
        for n in orders:
            pure = time_call(_pykernels.clipped_ngram_overlap, (a, b, n), repeats)
            if _speedups is None:
                print(f"{size:8d}  {n:3d}  {fmt_seconds(pure)}  {'n/a':>11}  {'n/a':>8}")
                continue
            assert _speedups.clipped_ngram_overlap(a, b, n) == (
                _pykernels.clipped_ngram_overlap(a, b, n)
            )
            fast = time_call(_speedups.clipped_ngram_overlap, (a, b, n), repeats)
            print(
                f"{size:8d}  {n:3d}  {fmt_seconds(pure)}  {fmt_seconds(fast)}  "
                f"{pure / fast:7.1f}x"
            )
    print()


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lcs-sizes", type=int, nargs="+", default=[64, 256, 1024])
    parser.add_argument("--overlap-sizes", type=int, nargs="+", default=[1000, 10000])
    parser.add_argument("--orders", type=int, nargs="+", default=[1, 2, 4])
    parser.add_argument("--vocab", type=int, default=50)
    parser.add_argument("--repeats", type=int, default=9)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _speedups is None:
        print("compiled backend not importable; timing the fallback only\n")

    rng = random.Random(args.seed)
    bench_lcs(rng, args.lcs_sizes, args.vocab, args.repeats)
    bench_overlap(rng, args.overlap_sizes, args.orders, args.vocab, args.repeats)
    return 0


if __name__ == "__main__":
    sys.exit(main())

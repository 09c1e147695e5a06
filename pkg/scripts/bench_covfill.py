#!/usr/bin/env python3
"""Benchmark the compiled covariance-fill extension against the numpy fallback.

The N x N covariance fill runs inside every Metropolis proposal, so its speed
sets the pace of both training engines. This script times `cov_train` and
`cov_cross` for both backends over a range of problem sizes, verifies that
they agree to machine precision, and prints a speedup table.

Usage: python3 scripts/bench_covfill.py [--repeats 50]
"""

import argparse
import time

import numpy as np

from gptemper import _covfill_py

try:
    from gptemper import _covfill
except ImportError:
    _covfill = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    if _covfill is None:
        print("compiled extension not built; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    print(f"{'case':<28}{'pure-python':>14}{'compiled':>14}{'speedup':>10}")
    for n, d in [(50, 3), (200, 10), (500, 10), (200, 100)]:
        x = rng.random((n, d))
        beta = rng.gamma(1.1, 1.0, d)
        for additive in (False, True):
            form = "additive" if additive else "exponentiated"
            ref = _covfill_py.cov_train(x, beta, 1.0, 2.0, 3.0, additive)
            got = _covfill.cov_train(x, beta, 1.0, 2.0, 3.0, additive)
            assert np.allclose(ref, got, rtol=1e-12), "backends disagree"
            t_py = best_of(
                lambda: _covfill_py.cov_train(x, beta, 1.0, 2.0, 3.0, additive),
                args.repeats,
            )
            t_c = best_of(
                lambda: _covfill.cov_train(x, beta, 1.0, 2.0, 3.0, additive),
                args.repeats,
            )
            label = f"train N={n} d={d} {form}"
            print(f"{label:<28}{t_py * 1e3:>12.3f}ms{t_c * 1e3:>12.3f}ms{t_py / t_c:>9.1f}x")

    a = rng.random((100, 10))
    b = rng.random((400, 10))
    beta = rng.gamma(1.1, 1.0, 10)
    ref = _covfill_py.cov_cross(a, b, beta, 1.5, False)
    got = _covfill.cov_cross(a, b, beta, 1.5, False)
    assert np.allclose(ref, got, rtol=1e-12), "backends disagree"
    t_py = best_of(lambda: _covfill_py.cov_cross(a, b, beta, 1.5, False), args.repeats)
    t_c = best_of(lambda: _covfill.cov_cross(a, b, beta, 1.5, False), args.repeats)
    label = "cross 100x400 d=10"
    print(f"{label:<28}{t_py * 1e3:>12.3f}ms{t_c * 1e3:>12.3f}ms{t_py / t_c:>9.1f}x")
    print("\nbackends agree to machine precision on all cases")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

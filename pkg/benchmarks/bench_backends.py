#!/usr/bin/env python3
"""Benchmark the compiled chain kernel against the pure-python fallback.

Times the full warmup+thinning loop on constraint cones of increasing size
and prints steps/second for each backend plus the speedup.

Usage: python benchmarks/bench_backends.py [--samples 1000] [--thinning 10]
"""

import argparse
import time

import numpy as np

import verspace as vs
from verspace import _ess_py
from verspace.sampler import _run_chain

try:
    from verspace import _ess_cy
except ImportError:
    _ess_cy = None

CASES = [
    # (n constraints, feature dim) roughly mirroring the experiment scales
    (1, 2),
    (50, 51),
    (50, 100),
    (100, 200),
    (350, 784),
]


def teacher_cone(n, dim, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, dim))
    labels = np.sign(X @ rng.standard_normal(dim))
    labels[labels == 0] = 1.0
    return vs.ConstraintSet(rows=labels[:, None] * X)


def run(kernel, constraints, config):
    rng = np.random.default_rng(config.seed)
    w0 = vs.initial_feasible_point(constraints, rng)
    t0 = time.perf_counter()
    chain = _run_chain(constraints, w0, config, rng, kernel=kernel)
    dt = time.perf_counter() - t0
    return chain.diagnostics["n_steps"] / dt, dt


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--thinning", type=int, default=10)
    args = parser.parse_args()

    config = vs.ChainConfig(n_samples=args.samples, warmup=1000, thinning=args.thinning, seed=0)
    total = config.warmup + config.n_samples * config.thinning
    print(f"chain: {total} steps per run ({args.samples} samples, thinning {args.thinning})")
    print(f"{'cone':>12} {'pure steps/s':>14} {'compiled steps/s':>17} {'speedup':>8}")
    for n, dim in CASES:
        constraints = teacher_cone(n, dim, seed=n + dim)
        pure_rate, _ = run(_ess_py, constraints, config)
        if _ess_cy is None:
            print(f"{f'{n}x{dim}':>12} {pure_rate:>14.0f} {'(not built)':>17} {'-':>8}")
            continue
        comp_rate, _ = run(_ess_cy, constraints, config)
        print(
            f"{f'{n}x{dim}':>12} {pure_rate:>14.0f} {comp_rate:>17.0f} "
            f"{comp_rate / pure_rate:>7.1f}x"
        )


if __name__ == "__main__":
    main()

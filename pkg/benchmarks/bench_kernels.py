"""Benchmark the pure-Python kernels against the compiled extension.

Runs the full streaming pipeline (filter + ring push + two-bin
extraction + locate) over a synthetic noisy stream for each available
backend and both analysis window lengths, then the two hot kernels in
isolation.  Usage:

    python benchmarks/bench_kernels.py [--samples N]
"""
import argparse
import time

import numpy as np

from magtrack import (
    NoiseModel,
    RigConfig,
    TrackingPipeline,
    TrajectorySpec,
    Vec2,
    anchor_sources,
    synthesize,
)
from magtrack import kernels

IDEAL_K = 9e6


def bench_pipeline(backend: str, buffer_len: int, n_samples: int) -> float:
    """Mean per-sample pipeline step time in milliseconds."""
    rig = RigConfig(buffer_len=buffer_len, k20=IDEAL_K, k30=IDEAL_K)
    duration = n_samples / rig.sample_rate
    traj = TrajectorySpec.circular(Vec2(5, 6), 2.0, 0.5, duration)
    samples = synthesize(rig, anchor_sources(rig), traj, NoiseModel(rng_seed=1))
    pipe = TrackingPipeline(rig, kernel_backend=backend)
    start = time.perf_counter()
    for s in samples:
        pipe.step(s)
    return (time.perf_counter() - start) / len(samples) * 1e3


def bench_goertzel(backend: str, buffer_len: int, repeats: int = 20000) -> float:
    """Mean single-bin extraction time in microseconds."""
    ker = kernels.get(backend)
    rng = np.random.default_rng(0)
    buf = np.ascontiguousarray(rng.normal(size=(buffer_len, 3)))
    k = round(20.0 * buffer_len / 100.0)
    start = time.perf_counter()
    for i in range(repeats):
        ker.goertzel_ring(buf, i % buffer_len, k, i % 3)
    return (time.perf_counter() - start) / repeats * 1e6


def bench_solve(backend: str, repeats: int = 20000) -> float:
    """Mean warm-start position solve time in microseconds."""
    ker = kernels.get(backend)
    h20 = IDEAL_K * 5.0**-6 * (3 * 0.64 + 1)
    h30 = IDEAL_K * 65.0**-3 * (3 * 16 / 65 + 1)
    start = time.perf_counter()
    for _ in range(repeats):
        ker.solve_position(h20, h30, IDEAL_K, IDEAL_K, 10.0, 0.64, 0.246, 5, 1e-6)
    return (time.perf_counter() - start) / repeats * 1e6


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20000,
                        help="pipeline stream length (default 20000)")
    args = parser.parse_args()

    print(f"available backends: {', '.join(kernels.AVAILABLE)} "
          f"(default: {kernels.BACKEND})")
    print()
    header = f"{'benchmark':<34}" + "".join(
        f"{name:>12}" for name in kernels.AVAILABLE)
    print(header)
    print("-" * len(header))

    rows = []
    for buffer_len in (50, 20):
        rows.append((f"pipeline step, N={buffer_len} [ms]",
                     [bench_pipeline(b, buffer_len, args.samples)
                      for b in kernels.AVAILABLE]))
    for buffer_len in (50, 20):
        rows.append((f"goertzel bin, N={buffer_len} [us]",
                     [bench_goertzel(b, buffer_len) for b in kernels.AVAILABLE]))
    rows.append(("warm position solve [us]",
                 [bench_solve(b) for b in kernels.AVAILABLE]))

    for label, values in rows:
        cells = "".join(f"{v:>12.4f}" for v in values)
        print(f"{label:<34}{cells}")

    if len(kernels.AVAILABLE) == 2:
        print()
        for label, (py, cy) in rows:
            print(f"{label:<34} compiled speedup {py / cy:>6.1f}x")


if __name__ == "__main__":
    main()

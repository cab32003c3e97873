#!/usr/bin/env python3
"""Times the compiled kernels against the NumPy fallback.

Run:  python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maskbench._kernels import _fallback

try:
    from maskbench._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng: np.random.Generator):
    hists = [rng.integers(0, 1000, 256).astype(np.int64) for _ in range(2000)]
    pixels = rng.integers(0, 256, (200_000, 3)).astype(np.float64)
    centroids = rng.uniform(0, 255, (3, 3))
    angles = np.sort(rng.uniform(0, 2 * np.pi, 14))
    vx = 256 + 220 * np.cos(angles)
    vy = 256 + 220 * np.sin(angles)
    blob = (rng.random((1024, 1024)) < 0.45).astype(np.uint8)
    a = rng.integers(60, 90, 400).astype(np.int32)
    b = rng.integers(60, 90, 400).astype(np.int32)

    return [
        ("otsu_argmax (2000 histograms)", lambda impl: [impl.otsu_argmax(h) for h in hists]),
        ("kmeans_assign (200k px, k=3)", lambda impl: impl.kmeans_assign(pixels, centroids)),
        ("rasterize_polygon (512x512, 14-gon)", lambda impl: impl.rasterize_polygon(vx, vy, 512, 512)),
        ("label_connected (1024x1024)", lambda impl: impl.label_connected(blob)),
        ("levenshtein (400x400 chars)", lambda impl: impl.levenshtein(a, b)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []
    for name, fn in workloads(rng):
        pure = timeit(lambda: fn(_fallback), args.repeat)
        if _native is not None:
            native = timeit(lambda: fn(_native), args.repeat)
            rows.append((name, pure, native, pure / native))
        else:
            rows.append((name, pure, None, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel'.ljust(width)}  {'pure':>10}  {'native':>10}  {'speedup':>8}")
    for name, pure, native, ratio in rows:
        if native is None:
            print(f"{name.ljust(width)}  {pure * 1e3:8.1f}ms  {'n/a':>10}  {'n/a':>8}")
        else:
            print(f"{name.ljust(width)}  {pure * 1e3:8.1f}ms  {native * 1e3:8.1f}ms  {ratio:7.1f}x")
    if _native is None:
        print("\ncompiled kernels not built; showing fallback only")


if __name__ == "__main__":
    main()

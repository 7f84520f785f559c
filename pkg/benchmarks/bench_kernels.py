#!/usr/bin/env python3
"""Time the pixel kernels: NumPy reference lane vs compiled extension.

Runs each kernel on a representative conditioning workload (a crop-sized
patch with a centered mask rectangle), checks the lanes agree bit-for-bit,
and prints per-call medians with the speedup. The generation hot loop is
dominated by these three calls plus PNG encode, so this is the number that
matters when deciding whether the extension is worth building on a host.

Usage: python3 benchmarks/bench_kernels.py [--size 256] [--repeats 200]
"""

import argparse
import statistics
import time

import numpy as np

from cornerforge._kernels import implementations
from cornerforge.rng import SplitMix64


def make_workload(size: int, seed: int = 4242):
    r = SplitMix64(seed)
    patch = np.empty((size, size, 3), dtype=np.uint8)
    flat = np.arange(size * size, dtype=np.uint64)
    for c in range(3):
        patch[..., c] = ((flat * np.uint64(2654435761) >> np.uint64(c * 7))
                         % np.uint64(251)).reshape(size, size).astype(np.uint8)
    side = size // 2
    rx, ry = size // 4 + r.next_below(4), size // 4 + r.next_below(4)
    yy, xx = np.mgrid[0:side, 0:side]
    mask = ((xx - side / 2) ** 2 / (side * 0.42) ** 2
            + (yy - side / 2) ** 2 / (side * 0.33) ** 2) <= 1.0
    color = (200, 40, 10)
    return patch, mask, rx, ry, color


def time_call(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def run(size: int, repeats: int) -> int:
    impls = implementations()
    if "compiled" not in impls:
        print("compiled lane not built; timing the python lane only")

    patch, mask, rx, ry, color = make_workload(size)
    dst = patch.copy()
    cases = {
        "compose_zones": lambda mod, p: mod.compose_zones(p, mask, rx, ry, color),
        "procedural_fill": lambda mod, p: mod.procedural_fill(
            p, mask, rx, ry, color, 987654321),
        "feather_blend": lambda mod, p: mod.feather_blend(
            dst.copy(), p[ry:ry + mask.shape[0], rx:rx + mask.shape[1]],
            rx, ry, 8),
    }

    # lanes must agree exactly before their timings mean anything
    for name, call in cases.items():
        outs = []
        for mod in impls.values():
            p = patch.copy()
            call(mod, p)
            outs.append(p)
        if len(outs) == 2 and not np.array_equal(outs[0], outs[1]):
            print(f"FATAL: lanes disagree on {name}")
            return 1

    print(f"workload: {size}x{size} patch, {mask.shape[1]}x{mask.shape[0]} mask, "
          f"{repeats} repeats (median)")
    header = f"{'kernel':<18}" + "".join(f"{lane:>14}" for lane in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, call in cases.items():
        times = {}
        for lane, mod in impls.items():
            p = patch.copy()
            times[lane] = time_call(lambda: call(mod, p), repeats)
        row = f"{name:<18}" + "".join(f"{times[lane] * 1e6:>12.1f}us"
                                      for lane in impls)
        if len(times) == 2:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256,
                    help="patch side length (default 256)")
    ap.add_argument("--repeats", type=int, default=200,
                    help="timing repeats per kernel (default 200)")
    args = ap.parse_args()
    return run(args.size, args.repeats)


if __name__ == "__main__":
    raise SystemExit(main())

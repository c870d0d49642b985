"""Benchmark the compiled labeling kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--frames N] [--size PX]

Measures the region-labeling kernel alone and the full commit diff on
synthetic frames representative of the production workload (a few blocks on
a 512x512 table, with and without sensor noise).
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def build_frames(n, size, noise_mm, seed=7):
    from semcur.sense.synth import SynthConfig, random_commits

    cfg = SynthConfig(depth_size=(size, size), noise_mm=noise_mm)
    fixtures = list(random_commits(n, seed=seed, cfg=cfg))
    deltas = [(f.prev.depth_mm - f.frame.depth_mm).astype(np.float32)
              for f in fixtures]
    return cfg, fixtures, deltas


def bench_kernel(region_stats, deltas, h_min=12.0):
    t0 = time.perf_counter()
    regions = 0
    for delta in deltas:
        raised, lowered = region_stats(delta, h_min)
        regions += len(raised) + len(lowered)
    dt = time.perf_counter() - t0
    return dt, regions


def bench_commit(deltas_unused, fixtures, cal, cfg_sense):
    from semcur.sense.detect import diff_events

    t0 = time.perf_counter()
    n_events = 0
    for fix in fixtures:
        n_events += len(diff_events(fix.prev, fix.frame, cal, cfg_sense))
    dt = time.perf_counter() - t0
    return dt, n_events


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--frames", type=int, default=300)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--noise", type=float, default=3.0)
    args = parser.parse_args()

    from semcur.sense._kernel import _ccl_np
    backends = [("numpy", _ccl_np.region_stats)]
    try:
        from semcur.sense._kernel import _ccl_cy
        backends.append(("compiled", _ccl_cy.region_stats))
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only")

    from semcur.sense.calibrate import calibrate
    from semcur.sense.types import SenseConfig

    print(f"workload: {args.frames} commits, {args.size}x{args.size} px, "
          f"noise {args.noise} mm")
    cfg, fixtures, deltas = build_frames(args.frames, args.size, args.noise)
    cal = calibrate(fixtures[0].prev, cfg.corners_uv, cfg.display_size,
                    nadir_uv=cfg.nadir_uv)

    results = {}
    for name, fn in backends:
        dt, regions = bench_kernel(fn, deltas)
        results[name] = dt
        per = dt / len(deltas) * 1000
        print(f"  kernel[{name:8}]  {dt:7.3f}s total  {per:7.2f} ms/frame  "
              f"({regions} regions)")

    if len(results) == 2:
        print(f"  kernel speedup: {results['numpy'] / results['compiled']:.2f}x")

    import os
    for name in ("py", "c") if len(backends) == 2 else ("py",):
        os.environ["SEMCUR_KERNEL"] = name
        import semcur.sense._kernel as kern
        importlib.reload(kern)
        import semcur.sense.detect as detect
        importlib.reload(detect)
        dt, events = bench_commit(None, fixtures, cal, SenseConfig())
        label = "numpy" if name == "py" else "compiled"
        per = dt / len(fixtures) * 1000
        print(f"  commit[{label:8}]  {dt:7.3f}s total  {per:7.2f} ms/commit  "
              f"({events} events)")
    os.environ.pop("SEMCUR_KERNEL", None)


if __name__ == "__main__":
    main()

"""Compare the numba kernels against the pure-numpy fallback.

Runs the three hot kernels on representative workloads under both backends
and prints per-kernel timings plus an end-to-end detection comparison.

Usage: python benchmarks/bench_backends.py [--reps 5]

The numba backend is selected per-process via SEGLINE_BACKEND, so the
end-to-end comparison re-executes this script in a subprocess for each
backend.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench_kernels(reps: int) -> dict[str, float]:
    from segline._kernels import BACKEND, cd_weighted_l1, cusum_scan, split_rss_scan

    rng = np.random.Generator(np.random.Philox(0))
    out: dict[str, float] = {"backend_reported": BACKEND}

    # coordinate descent: 303-dim gram system (p_n = 100, q = 3)
    p = 303
    a = rng.normal(size=(p, p))
    g = np.ascontiguousarray(a.T @ a + p * np.eye(p))
    b = rng.normal(size=p) * 10
    lam = np.abs(rng.normal(size=p)) * 5
    cd_weighted_l1(g, b, lam, np.zeros(p), 10_000, 1e-8)  # warm-up / jit
    t0 = time.perf_counter()
    for _ in range(reps):
        cd_weighted_l1(g, b, lam, np.zeros(p), 10_000, 1e-8)
    out["cd_weighted_l1_s"] = (time.perf_counter() - t0) / reps

    # cusum scan over a 1000-row window, q = 3
    x = np.ascontiguousarray(
        np.hstack([np.ones((1000, 1)), rng.normal(1.0, np.sqrt(2.0), size=(1000, 2))])
    )
    y = rng.normal(size=1000)
    cusum_scan(x, y, 64)
    t0 = time.perf_counter()
    for _ in range(reps):
        cusum_scan(x, y, 64)
    out["cusum_scan_s"] = (time.perf_counter() - t0) / reps

    # split-RSS refinement over a 2-block window
    xw, yw = x[:98], y[:98]
    split_rss_scan(xw, yw)
    t0 = time.perf_counter()
    for _ in range(reps):
        split_rss_scan(xw, yw)
    out["split_rss_scan_s"] = (time.perf_counter() - t0) / reps

    # end-to-end: one adaptive-LASSO detection on a nine-change sequence
    from segline import DetectorConfig, detect, scenario_cpl1, simulate_dataset

    data, _ = simulate_dataset(scenario_cpl1(), 0)
    cfg = DetectorConfig()
    detect(data, cfg, "ls")  # warm the jit through the scan path
    t0 = time.perf_counter()
    detect(data, cfg, "al")
    out["detect_al_s"] = time.perf_counter() - t0
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--_child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args._child:
        json.dump(_bench_kernels(args.reps), sys.stdout)
        return 0

    results = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ, SEGLINE_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--reps", str(args.reps), "--_child"],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(f"{backend}: unavailable ({proc.stderr.strip().splitlines()[-1]})")
            continue
        results[backend] = json.loads(proc.stdout)

    if not results:
        return 1
    keys = [k for k in next(iter(results.values())) if k.endswith("_s")]
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in results) + "     speedup")
    for k in keys:
        row = [results[b].get(k) for b in results]
        speed = (
            f"{row[0] / row[1]:10.1f}x"
            if len(row) == 2 and all(row) and row[1] > 0
            else ""
        )
        cells = "".join(f"{v:12.5f}" if v is not None else f"{'-':>12}" for v in row)
        print(f"{k:<20}{cells}{speed}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

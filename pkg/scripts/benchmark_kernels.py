#!/usr/bin/env python3
"""Benchmark the compiled trajectory kernel against the numpy fallback.

Runs the same seeded trajectory on both backends, reports steps/second and
the speedup, and verifies the two backends produce the same emission record.

Usage: python scripts/benchmark_kernels.py [--time 20000] [--dt 0.01]
"""
import argparse
import time

import numpy as np

from dipolejumps import (
    Geometry, ModelParams, TrajectoryConfig, compute_c3, run_trajectory,
)
from dipolejumps.kernels import HAVE_COMPILED


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--time", type=float, default=20000.0,
                    help="simulated time per run (units of 1/A3)")
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    params = ModelParams(omega2=0.01, omega3=0.5)
    coupling = compute_c3(Geometry(r=1.0))
    cfg = TrajectoryConfig(params=params, coupling=coupling,
                           total_time=args.time, dt=args.dt, seed=args.seed)
    n_steps = args.time / args.dt

    backends = ["python"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("note: compiled kernel not importable; benchmarking fallback only")

    results = {}
    for name in backends:
        t0 = time.time()
        rec = run_trajectory(cfg, backend=name)
        el = time.time() - t0
        results[name] = (el, rec)
        print(f"{name:9s}: {el:7.2f} s  {n_steps / el / 1e6:6.2f} M steps/s  "
              f"{len(rec)} emissions")

    if len(results) == 2:
        el_py, rec_py = results["python"]
        el_cy, rec_cy = results["compiled"]
        print(f"speedup: {el_py / el_cy:.1f}x")
        same = (len(rec_py) == len(rec_cy)
                and np.allclose(rec_py.times, rec_cy.times, atol=1e-6)
                and np.array_equal(rec_py.channels, rec_cy.channels))
        print(f"records agree: {same}")
        if not same:
            raise SystemExit(1)


if __name__ == "__main__":
    main()

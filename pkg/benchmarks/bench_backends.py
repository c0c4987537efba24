#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Runs each kernel on fixed seeded inputs plus the two stages of the
shipped example problem and prints a per-kernel table.  The compiled
backend is skipped (with a note) when the extension is not built.

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import pathlib
import time

import numpy as np

from lexgp._kernels import _pykernels
from lexgp.cli import parse_problem
from lexgp.lexicographic import build_stage
from lexgp.oracle import _stage_arrays

try:
    from lexgp._kernels import _ckernels
except ImportError:
    _ckernels = None

EXAMPLE = pathlib.Path(__file__).resolve().parent.parent / "examples" / "paper.json"


def best_of(repeat, inner, fn, *args):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        times.append((time.perf_counter() - t0) / inner)
    return min(times)


def fmt(seconds):
    if seconds < 1e-6:
        return f"{seconds * 1e9:7.1f} ns"
    if seconds < 1e-3:
        return f"{seconds * 1e6:7.1f} us"
    return f"{seconds * 1e3:7.2f} ms"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repetitions per case (default 5)")
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    T, n = 64, 8
    logc = rng.normal(size=T)
    A = rng.integers(-3, 4, size=(T, n)).astype(float)
    z = rng.normal(size=n)
    block = np.sort(rng.integers(0, 4, size=T)).astype(np.int32)
    block[0] = 0
    w = rng.uniform(0.01, 2.0, size=T)

    problem = parse_problem(EXAMPLE.read_text())
    stages = [build_stage(problem, 0), build_stage(problem, 1)]
    stage_args = []
    for s in stages:
        arrays = _stage_arrays(s)
        stage_args.append((*arrays, np.zeros(s.n), 1e4, 1e-9, 2000, 1.0,
                           50.0))

    cases = [
        (f"posy_eval_log  (T={T}, n={n})", "posy_eval_log",
         (logc, A, z), 2000),
        (f"dual_objective (T={T})", "dual_objective",
         (logc, block, 4, w), 2000),
        (f"dual_gradient  (T={T})", "dual_gradient",
         (logc, block, 4, w), 2000),
        ("oracle_stage   (example stage 1)", "oracle_stage",
         stage_args[0], 20),
        ("oracle_stage   (example stage 2)", "oracle_stage",
         stage_args[1], 20),
    ]

    width = max(len(name) for name, *_ in cases)
    header = f"{'kernel':<{width}}  {'python':>10}  {'c':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, attr, call_args, inner in cases:
        py = best_of(args.repeat, inner, getattr(_pykernels, attr),
                     *call_args)
        if _ckernels is None:
            print(f"{name:<{width}}  {fmt(py):>10}  {'n/a':>10}  {'':>8}")
            continue
        cc = best_of(args.repeat, inner, getattr(_ckernels, attr),
                     *call_args)
        print(f"{name:<{width}}  {fmt(py):>10}  {fmt(cc):>10}"
              f"  {py / cc:7.1f}x")
    if _ckernels is None:
        print("\ncompiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()

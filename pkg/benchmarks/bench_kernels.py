#!/usr/bin/env python3
"""Benchmark the driven-evolution kernels: compiled vs pure NumPy.

Runs the same driven walk on a large torus with both backends and reports
steps per second and the speedup. The workload is the per-step fused
inject + coin + shift + record pass, which dominates long driven runs.

    python benchmarks/bench_kernels.py --side 41 --steps 400 --repeats 3
"""

import argparse
import time

import numpy as np

from drivenwalk import CoinAssignment, Torus2D, grover4, minus_identity4
from drivenwalk.engine import step_permutation, wrap_watch_modes
from drivenwalk import _pykernels

try:
    from drivenwalk import _native
except ImportError:
    _native = None


def setup(side):
    lattice = Torus2D(side, side)
    coins = CoinAssignment.from_overrides(
        lattice, grover4(),
        {(side // 2, side // 2): minus_identity4(), (side - 1, side - 1): minus_identity4()},
    )
    dest = step_permutation(lattice, flip_flop=True)
    base = np.zeros(lattice.mode_count, dtype=np.complex128)
    center = lattice.vertex_index((side // 2, side // 2))
    base[center * 4 : center * 4 + 4] = 0.5
    return lattice, coins.blocks, dest, base


def run_backend(impl, blocks, dest, base, steps, repeats):
    n = base.shape[0]
    watch = np.zeros(0, dtype=np.int64)
    best = float("inf")
    final = None
    for _ in range(repeats):
        state = np.zeros(n, dtype=np.complex128)
        mode_out = np.zeros((steps, n), dtype=np.float64)
        t0 = time.perf_counter()
        impl.run_driven(blocks, dest, base, 0.0, steps, None, state,
                        mode_out, None, watch)
        best = min(best, time.perf_counter() - t0)
        final = state
    return best, final


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--side", type=int, default=41, help="torus side length")
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    lattice, blocks, dest, base = setup(args.side)
    print(f"torus {args.side}x{args.side}, {lattice.mode_count} modes, "
          f"{args.steps} steps, best of {args.repeats}")

    t_py, final_py = run_backend(_pykernels, blocks, dest, base,
                                 args.steps, args.repeats)
    print(f"python : {t_py:8.4f} s   {args.steps / t_py:10.1f} steps/s")

    if _native is None:
        print("native : not built (pip install -e . with a C compiler)")
        return

    t_nat, final_nat = run_backend(_native, blocks, dest, base,
                                   args.steps, args.repeats)
    print(f"native : {t_nat:8.4f} s   {args.steps / t_nat:10.1f} steps/s")
    print(f"speedup: {t_py / t_nat:.2f}x")

    drift = float(np.abs(final_py - final_nat).max())
    print(f"backend agreement (max |diff| of final state): {drift:.3e}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Iteration-count benchmark: all four solver configurations, all five
preconditioner choices, over a grid of regularization weights.

Writes iterations.csv / rre_vs_alpha.csv plus restored signals per cell.
"""

import argparse
from pathlib import Path

from tvdeblur.harness import BenchmarkSpec, run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=203)
    parser.add_argument("--beta", type=float, default=0.1)
    parser.add_argument("--alphas", type=float, nargs="+",
                        default=[1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    parser.add_argument("--nsr", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=2023)
    parser.add_argument("--inner-max", type=int, default=20000)
    parser.add_argument("--out-dir", type=Path, default=Path("out/benchmark_1d"))
    args = parser.parse_args()

    spec = BenchmarkSpec(
        dimension=1,
        ns=(args.n,),
        alphas=tuple(args.alphas),
        betas=(args.beta,),
        configurations=("R", "AR+Sine+ZN", "AR+Reblur+ZN", "AR+Reblur+AR"),
        preconditioners=("none", "diag", "x", "d_x", "x_d"),
        nsr=args.nsr,
        seed=args.seed,
        inner_max=args.inner_max,
        save_restored=False,
    )
    result = run_sweep(spec, out_dir=args.out_dir)
    starred = sum(1 for cell in result.cells if not cell.ok)
    print(f"{len(result.cells)} cells ({starred} starred) -> {args.out_dir}")


if __name__ == "__main__":
    main()

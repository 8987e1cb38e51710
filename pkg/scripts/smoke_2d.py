#!/usr/bin/env python3
"""2D image-deblurring benchmark at desk scale: Gaussian blur, light noise,
all four configurations, unpreconditioned vs diagonally scaled transform
preconditioner.  Restored images are written as PGM files.
"""

import argparse
from pathlib import Path

from tvdeblur.harness import BenchmarkSpec, run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=64)
    parser.add_argument("--beta", type=float, default=0.01)
    parser.add_argument("--alphas", type=float, nargs="+",
                        default=[1e-1, 1e-2, 1e-3])
    parser.add_argument("--nsr", type=float, default=0.001)
    parser.add_argument("--seed", type=int, default=2023)
    parser.add_argument("--out-dir", type=Path, default=Path("out/smoke_2d"))
    args = parser.parse_args()

    spec = BenchmarkSpec(
        dimension=2,
        ns=(args.n,),
        alphas=tuple(args.alphas),
        betas=(args.beta,),
        configurations=("R", "AR+Sine+ZN", "AR+Reblur+ZN", "AR+Reblur+AR"),
        preconditioners=("none", "x_d"),
        nsr=args.nsr,
        seed=args.seed,
        psf_kind="gaussian",
    )
    result = run_sweep(spec, out_dir=args.out_dir)
    for cell in result.cells:
        print(cell.row())


if __name__ == "__main__":
    main()

"""Tail slopes of synthesized fractional heat kernels versus the -(1 + 2 beta) law.

    python3 scripts/kernel_tails.py --betas 0.3 0.5 0.75 --sigma-t 0.1 1.0
"""
import argparse

from fracsplit.grid import GridSpec
from fracsplit.kernel import DiffusionParams, synthesize_kernel, tail_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.25, 0.5, 0.75, 0.9, 1.0])
    ap.add_argument("--sigma-t", type=float, nargs="+", default=[0.1, 1.0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--length", type=float, default=200.0)
    ap.add_argument("--window", type=float, nargs=2, default=[5.0, 20.0])
    args = ap.parse_args()

    grid = GridSpec(args.points, args.length)
    print(f"{'beta':>6} {'sigma_t':>8} {'mass-1':>10} {'min':>10} {'slope':>8} {'-(1+2b)':>8}")
    for beta in args.betas:
        for st in args.sigma_t:
            k = synthesize_kernel(grid, DiffusionParams(1.0, beta), st)
            try:
                slope = f"{tail_exponent(k, tuple(args.window)):8.3f}"
            except ValueError:
                slope = f"{'n/a':>8}"
            law = "" if beta == 1.0 else f"{-(1 + 2 * beta):8.3f}"
            print(f"{beta:6.3f} {st:8.3f} {k.mass - 1:10.2e} {k.values.min():10.2e} {slope} {law}")


if __name__ == "__main__":
    main()

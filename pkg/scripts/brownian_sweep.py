"""Brownian insider value against log n on shared paths, with the truncation and grid allowances.

    python scripts/brownian_sweep.py --paths 20000 --steps 2048 --ns 2 4 8 16 32 64
"""
import argparse
import math

from insider_arb.continuous_g import BrownianMarket, bs_insider_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--ns", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64])
    ap.add_argument("--grid", choices=("graded", "uniform"), default="graded")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    exp = bs_insider_experiment(BrownianMarket(), args.ns, args.paths, args.steps, args.seed, grid=args.grid)
    print(f"grid {args.grid}, delta {exp.delta:.3g}, {args.paths} paths")
    print(f"{'n':>4} {'value':>9} {'se':>8} {'log n':>8} {'H_delta':>9} {'allow':>8}  ok")
    for r in exp.rows:
        print(f"{r.n:>4} {r.value.mean:9.5f} {r.value.se:8.5f} {math.log(r.n):8.5f} {r.truncated:9.5f} "
              f"{r.allowance:8.5f}  {r.passed}")
    print(f"slope vs log n: {exp.slope():.4f}")
    for t, est in exp.density_checks:
        print(f"density mean at t={t:.4f}: {est.mean:.4f} +- {est.se:.4f}")


if __name__ == "__main__":
    main()

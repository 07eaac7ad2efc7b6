"""Run every experiment at its default size and write JSON and CSV reports.

    python scripts/run_all.py --seed 7 --out reports/
"""
import argparse
import sys
import time
from pathlib import Path

from insider_arb.cli import EXPERIMENTS, effective_config, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--only", nargs="*", default=None, help="subset of experiment names")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    names = args.only or list(EXPERIMENTS)
    failed = []
    for name in names:
        t0 = time.perf_counter()
        rep = run_experiment(name, effective_config(name, {"seed": args.seed}, None), args.threads)
        (args.out / f"{name}.json").write_text(rep.to_json())
        (args.out / f"{name}.csv").write_text(rep.to_csv())
        status = "PASS" if rep.passed else "FAIL"
        print(f"{name:<18} {status}  {len(rep.checks):>3} checks  {time.perf_counter() - t0:6.1f}s")
        if not rep.passed:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

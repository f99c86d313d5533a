"""Run every acceptance suite and write a JSON report.

    python3 scripts/run_acceptance.py --seed 1 --out report.json
"""

import argparse
import sys

from symred import cli


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=cli.RunConfig.seed)
    p.add_argument("--tol", type=float, default=cli.RunConfig.tol)
    p.add_argument("--samples", type=int, default=cli.RunConfig.samples)
    p.add_argument("--out", default="acceptance_report.json")
    args = p.parse_args()
    return cli.main(["--seed", str(args.seed), "--tol", str(args.tol), "--samples", str(args.samples), "--out", args.out, "verify-all"])


if __name__ == "__main__":
    sys.exit(main())

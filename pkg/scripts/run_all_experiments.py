"""Run every CLI experiment at its defaults, writing results/<experiment>/.

Usage: python scripts/run_all_experiments.py [--out results] [--only hardy,l1-theorem]
"""

import argparse
import sys
from pathlib import Path

from fraclap import cli


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default="results")
    p.add_argument("--only", default="", help="comma-separated subset of experiments")
    args = p.parse_args()
    chosen = [e for e in args.only.split(",") if e] or list(cli.EXPERIMENTS)
    status = {}
    for exp in chosen:
        print(f"== {exp}", flush=True)
        status[exp] = cli.main(["--experiment", exp, "--out", str(Path(args.out) / exp)])
    print("\nexit codes:", ", ".join(f"{e}={c}" for e, c in status.items()))
    return max(status.values(), default=0)


if __name__ == "__main__":
    sys.exit(main())

"""Census experiment for an atom law: simulate R trees, then verify against the limit.

    python3 scripts/atom_census.py --n 100000 --replicates 10000 --out runs/atom.jsonl
"""
import argparse
import json
import os
import sys

from wrtlab import cli
from wrtlab.weights import parse_law


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--law", default="atom-gap")
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--replicates", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--window", default="0:3")
    ap.add_argument("--parallel", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="runs/atom.jsonl")
    args = ap.parse_args()

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    cfg = cli.ExperimentConfig(
        law=parse_law(args.law), n=args.n, replicates=args.replicates, seed=args.seed,
        out=args.out, parallel=args.parallel,
    )
    cli.run_simulate(cfg, progress=True)
    report = cli.verify_records(cli.load_records(args.out), cli.parse_window(args.window))
    print(report.table())
    with open(args.out + ".report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    sys.exit(1 if report.hard_failures else 0)


if __name__ == "__main__":
    main()

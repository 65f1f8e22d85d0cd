"""Exact joint degree law at small n against simulated trees with the same fixed weights."""
import argparse
import math

import numpy as np

from wrtlab import oracle
from wrtlab.simulate import simulate_degrees_fixed_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--trees", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    w = rng.uniform(0.05, 1.0, args.n)
    exact = oracle.enumerate_exact(w, range(args.n)).table
    deg = simulate_degrees_fixed_weights(w, args.trees, rng)
    keys, counts = np.unique(deg, axis=0, return_counts=True)
    seen = {tuple(int(v) for v in k): c / args.trees for k, c in zip(keys, counts)}
    print("weights:", np.round(w, 4).tolist())
    print(f"{'degrees':<22}{'exact':>10}{'simulated':>11}{'z':>8}")
    for key, p in sorted(exact.items(), key=lambda kv: -kv[1]):
        emp = seen.get(key, 0.0)
        z = (emp - p) / math.sqrt(p * (1 - p) / args.trees)
        print(f"{str(key):<22}{p:>10.5f}{emp:>11.5f}{z:>8.2f}")


if __name__ == "__main__":
    main()

"""Standardised X_{i_n} for an atom law: moments, lattice structure and KS distance from N(0,1)."""
import argparse
import math

import numpy as np
from scipy import stats as sps

from wrtlab import asymptotics as asy
from wrtlab import stats
from wrtlab.simulate import generate_replicate
from wrtlab.weights import parse_law


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--law", default="atom-gap")
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--replicates", type=int, default=500)
    ap.add_argument("--i", type=int, default=None, help="bucket; default -floor(ln ln n)")
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    law = parse_law(args.law)
    cen = asy.centering_for(law)
    i_n = args.i if args.i is not None else -math.floor(math.log(math.log(args.n)))
    mean = asy.bucket_means(cen, args.n, i_n)[0]
    xs = np.array([
        stats.census(generate_replicate(law, args.n, "fixed", args.seed, r), cen, (i_n, i_n)).x(i_n)
        for r in range(args.replicates)
    ])
    rep = stats.normality_check(xs, mean, math.sqrt(mean))
    # KS distance of Poisson(mean) itself from the normal, the lattice floor
    grid = np.arange(0, int(mean + 20 * math.sqrt(mean)) + 2)
    z = (grid - mean) / math.sqrt(mean)
    cdf = sps.poisson.cdf(grid, mean)
    lattice = max(np.max(np.abs(cdf - sps.norm.cdf(z))), np.max(np.abs(np.r_[0, cdf[:-1]] - sps.norm.cdf(z))))
    print(f"i_n={i_n} eps_n={cen.eps_n(args.n):.3f} predicted mean={mean:.4f}")
    print(f"sample mean={xs.mean():.4f} var={xs.var(ddof=1):.4f}")
    print(f"KS(sample)={rep.ks_stat:.4f}  KS(Poisson vs normal)={lattice:.4f}  1% critical={1.63 / math.sqrt(args.replicates):.4f}")


if __name__ == "__main__":
    main()

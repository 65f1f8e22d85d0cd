"""Exact finite-n mean of X_{>=i} for an atom law, against simulation and the limit.

Attachment randomness is integrated out: the first ``--exact`` vertices get
the exact Poisson-binomial law of their in-degree, the remaining ones (whose
attachment probabilities are all below 1/S_exact) a Poisson law with the
exact mean.  Only weight vectors are sampled.
"""
import argparse
import math

import numpy as np
from scipy import stats as sps

from wrtlab import asymptotics as asy
from wrtlab import oracle
from wrtlab.simulate import prefix_sums, replicate_seed
from wrtlab.weights import parse_law


def expected_geq(law, n, buckets, exact, weight_reps, seed):
    cen = asy.centering_for(law)
    fc = cen.floor_center(n)
    out = np.empty((weight_reps, len(buckets)))
    for r in range(weight_reps):
        rng = np.random.default_rng(replicate_seed(seed, r))
        w = np.asarray(law.sample(rng, size=n), dtype=float)
        cum = prefix_sums(w)
        rows = oracle._pb_rows(w, cum, np.arange(exact, dtype=np.int64), 80)
        tail = np.cumsum(rows[:, ::-1], axis=1)[:, ::-1]
        # sum_{k > j} 1/S_k for every j
        inv = np.concatenate((np.cumsum((1.0 / cum[:-1])[::-1])[::-1], [0.0]))
        lam = w[exact:] * inv[exact:]
        for m, i in enumerate(buckets):
            d = fc + i
            out[r, m] = tail[:, d].sum() + sps.poisson.sf(d - 1, lam).sum()
    return out.mean(axis=0), out.std(axis=0, ddof=1) / math.sqrt(weight_reps)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--law", default="atom-gap")
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--exact", type=int, default=3000)
    ap.add_argument("--weight-reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=77)
    args = ap.parse_args()

    law = parse_law(args.law)
    cen = asy.centering_for(law)
    buckets = [0, 1, 2, 3]
    mean, se = expected_geq(law, args.n, buckets, args.exact, args.weight_reps, args.seed)
    print(f"n={args.n} floor_center={cen.floor_center(args.n)} eps_n={cen.eps_n(args.n):.3f}")
    print(f"{'i':>3}{'E X_>=i (exact)':>18}{'se':>8}{'limit':>9}{'ratio':>8}")
    for i, m, s in zip(buckets, mean, se):
        lim = asy.bucket_means(cen, args.n, i)[1]
        print(f"{i:>3}{m:>18.4f}{s:>8.4f}{lim:>9.4f}{m / lim:>8.3f}")


if __name__ == "__main__":
    main()

"""Census statistics, factorial moments and goodness-of-fit checks."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import stats as sps

from .asymptotics import Centering, bucket_means

DEFAULT_WINDOW = (-5, 5)
MIN_FIT_SAMPLES = 500
POOL_MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class DegreeCensus:
    """Bucket counts around the floored centering.

    ``xi[m]`` counts vertices with in-degree ``floor_center + window[0] + m``;
    ``x_geq[m]`` counts every vertex at or above that bucket, including those
    above the window.
    """

    n: int
    floor_center: int
    eps_n: float
    window: tuple
    xi: np.ndarray
    x_geq: np.ndarray
    max_degree: int
    num_maximizers: int

    def _slot(self, i: int) -> int:
        lo, hi = self.window
        if not lo <= i <= hi:
            raise KeyError(f"bucket {i} outside census window {self.window}")
        return i - lo

    def x(self, i: int) -> int:
        return int(self.xi[self._slot(i)])

    def geq(self, i: int) -> int:
        return int(self.x_geq[self._slot(i)])

    @property
    def top_bucket(self) -> int:
        return self.max_degree - self.floor_center

    def summary(self) -> dict:
        return {
            "n": self.n,
            "floor_center": self.floor_center,
            "eps_n": self.eps_n,
            "window": list(self.window),
            "xi": [int(v) for v in self.xi],
            "x_geq": [int(v) for v in self.x_geq],
            "max_degree": self.max_degree,
            "num_maximizers": self.num_maximizers,
        }

    @classmethod
    def from_summary(cls, d: dict) -> "DegreeCensus":
        return cls(
            n=int(d["n"]),
            floor_center=int(d["floor_center"]),
            eps_n=float(d["eps_n"]),
            window=tuple(d["window"]),
            xi=np.asarray(d["xi"], dtype=np.int64),
            x_geq=np.asarray(d["x_geq"], dtype=np.int64),
            max_degree=int(d["max_degree"]),
            num_maximizers=int(d["num_maximizers"]),
        )


def census(tree_or_degrees, centering: Centering, window=DEFAULT_WINDOW) -> DegreeCensus:
    """Bucket the in-degrees of a tree relative to ``floor(c(n))``."""
    deg = getattr(tree_or_degrees, "in_degrees", tree_or_degrees)
    deg = np.asarray(deg, dtype=np.int64)
    n = deg.shape[0]
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise ValueError(f"empty census window {window}")
    if n == 0:
        raise ValueError("census of an empty degree vector")
    fc = centering.floor_center(n)
    counts = np.bincount(deg)
    max_deg = counts.shape[0] - 1
    # suffix sums give #{v: deg(v) >= d}
    suffix = np.concatenate((np.cumsum(counts[::-1])[::-1], [0]))
    xi = np.zeros(hi - lo + 1, dtype=np.int64)
    x_geq = np.zeros(hi - lo + 1, dtype=np.int64)
    for m, i in enumerate(range(lo, hi + 1)):
        d = fc + i
        if d < 0:
            x_geq[m] = n
        elif d <= max_deg:
            xi[m] = counts[d]
            x_geq[m] = suffix[d]
    return DegreeCensus(
        n=n,
        floor_center=fc,
        eps_n=centering.eps_n(n),
        window=(lo, hi),
        xi=xi,
        x_geq=x_geq,
        max_degree=int(max_deg),
        num_maximizers=int(counts[max_deg]),
    )


def degree_frequencies(degrees, kmax: int) -> np.ndarray:
    """Fraction of vertices with in-degree k, for k = 0..kmax."""
    deg = np.asarray(getattr(degrees, "in_degrees", degrees))
    counts = np.bincount(deg, minlength=kmax + 1)[: kmax + 1]
    return counts / deg.shape[0]


def falling_factorial(x: int, a: int) -> int:
    """(x)_a = x (x-1) ... (x-a+1); (x)_0 = 1."""
    if a < 0:
        raise ValueError("order must be non-negative")
    out = 1
    for j in range(a):
        out *= x - j
        if out == 0:
            break
    return out


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    stderr: float
    count: int


def factorial_moment_estimate(
    samples: Sequence[DegreeCensus],
    orders: Mapping[int, int],
    geq_orders: Optional[Mapping[int, int]] = None,
) -> MomentEstimate:
    """Mean and standard error of prod_i (X_i)_{a_i} * prod_i' (X_{>=i'})_{a_i'}."""
    if len(samples) < 2:
        raise ValueError("need at least 2 replicates for a moment estimate")
    geq_orders = geq_orders or {}
    vals = np.empty(len(samples))
    for r, c in enumerate(samples):
        prod = 1
        for i, a in orders.items():
            if a:
                prod *= falling_factorial(c.x(i), a)
        for i, a in geq_orders.items():
            if a:
                prod *= falling_factorial(c.geq(i), a)
        vals[r] = prod
    se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    return MomentEstimate(float(vals.mean()), se, len(vals))


def bucket_samples(samples: Sequence[DegreeCensus], i: int, geq: bool = False) -> np.ndarray:
    """Per-replicate X_i (or X_{>=i}) as an integer array."""
    get = (lambda c: c.geq(i)) if geq else (lambda c: c.x(i))
    return np.fromiter((get(c) for c in samples), dtype=np.int64, count=len(samples))


@dataclass(frozen=True)
class FitReport:
    tv_distance: float
    chi_sq_p_value: float
    chi_sq_stat: float
    cells: int
    samples: int
    mean: float


def _pooled_cells(observed: np.ndarray, expected: np.ndarray):
    """Merge adjacent cells left to right until each expected count is >= 5."""
    obs_out, exp_out = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= POOL_MIN_EXPECTED:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_out:
            obs_out[-1] += acc_o
            exp_out[-1] += acc_e
        else:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
    return np.asarray(obs_out), np.asarray(exp_out)


def poisson_fit(samples, mean: float) -> FitReport:
    """Compare integer samples with Poisson(mean): TV distance and chi-square p-value."""
    x = np.asarray(samples)
    if not mean > 0:
        raise ValueError(f"Poisson mean must be positive, got {mean}")
    if x.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if np.any(x < 0) or np.any(x != np.round(x)):
        raise ValueError("samples must be non-negative integers")
    x = x.astype(np.int64)
    top = int(max(x.max(), sps.poisson.ppf(1 - 1e-12, mean)))
    ks = np.arange(top + 1)
    emp = np.bincount(x, minlength=top + 1) / x.size
    pmf = sps.poisson.pmf(ks, mean)
    tail = float(sps.poisson.sf(top, mean))
    tv = 0.5 * (float(np.abs(emp - pmf).sum()) + tail)
    # last cell carries the whole Poisson upper tail
    expected = pmf * x.size
    expected[-1] += tail * x.size
    observed = emp * x.size
    obs, exp = _pooled_cells(observed, expected)
    if obs.size < 2:
        stat, p = 0.0, float("nan")
    else:
        stat = float(((obs - exp) ** 2 / exp).sum())
        p = float(sps.chi2.sf(stat, obs.size - 1))
    return FitReport(tv, p, stat, int(obs.size), int(x.size), float(mean))


@dataclass(frozen=True)
class NormalityReport:
    ks_stat: float
    standardized_skew: float
    samples: int


def normality_check(samples, predicted_mean: float, predicted_sd: float) -> NormalityReport:
    """KS distance of standardized samples from N(0,1), plus their skewness."""
    if not predicted_sd > 0:
        raise ValueError(f"predicted sd must be positive, got {predicted_sd}")
    z = (np.asarray(samples, dtype=float) - predicted_mean) / predicted_sd
    ks = float(sps.kstest(z, "norm").statistic)
    skew = 0.0 if np.var(z) == 0 else float(sps.skew(z))
    return NormalityReport(ks, skew, int(z.size))


def bucket_rows(samples: Sequence[DegreeCensus], centering: Centering, buckets: Iterable[int]):
    """Rows (i, mean X_i, stderr, predicted mean) for CSV export."""
    if not samples:
        raise ValueError("no census samples")
    n = samples[0].n
    rows = []
    for i in buckets:
        v = bucket_samples(samples, i)
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else float("nan")
        rows.append(
            {"i": i, "mean_xi": float(v.mean()), "stderr": se, "predicted": bucket_means(centering, n, i)[0]}
        )
    return rows


def write_rows_csv(rows: Sequence[Mapping], path) -> None:
    if not rows:
        raise ValueError("nothing to write")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)


def write_fit_reports_csv(reports: Mapping[str, FitReport], path) -> None:
    write_rows_csv([{"label": k, **asdict(r)} for k, r in reports.items()], path)

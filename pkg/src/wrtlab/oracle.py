"""Exact small-n degree laws under fixed weights.

Vertices are 0-based as in :mod:`wrtlab.simulate`.  Given the weights, the
in-degree of vertex j is a sum of independent Bernoulli(W_j / S_k) over the
arrivals k > j, which the Poisson-binomial recursion handles exactly; for
joint laws of several vertices every parent sequence is enumerated.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numba
import numpy as np

from .simulate import prefix_sums, replicate_seed
from .weights import AtomMix, Constant, WeightLaw

MAX_ENUM_N = 8
MIN_WEIGHT_REPLICATES = 1000
_PB_DROP = 1e-18


@dataclass
class JointDegreePmf:
    targets: tuple
    table: dict  # degree tuple -> probability

    def total(self) -> float:
        return math.fsum(self.table.values())

    def marginal(self, target) -> np.ndarray:
        pos = self.targets.index(target)
        top = max(key[pos] for key in self.table)
        out = np.zeros(top + 1)
        for key, p in self.table.items():
            out[key[pos]] += p
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"targets": list(self.targets), "table": [[list(k), p] for k, p in sorted(self.table.items())]}
        )

    @classmethod
    def from_json(cls, text: str) -> "JointDegreePmf":
        d = json.loads(text)
        return cls(tuple(d["targets"]), {tuple(k): p for k, p in d["table"]})


def enumerate_exact(weights, targets: Sequence[int]) -> JointDegreePmf:
    """Joint in-degree law of ``targets`` by enumerating all (n-1)! parent sequences."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration is limited to n <= {MAX_ENUM_N}, got n={n}")
    if n < 1 or np.any(w <= 0):
        raise ValueError("need at least one positive weight")
    targets = tuple(int(t) for t in targets)
    if any(not 0 <= t < n for t in targets):
        raise ValueError(f"targets must lie in 0..{n - 1}")
    log_w = np.log(w)
    log_s = np.log(np.cumsum(w))
    # arrival k picks a parent in 0..k-1: a mixed-radix digit of radix k
    table: dict = {}
    for parents in itertools.product(*(range(k) for k in range(1, n))):
        logp = math.fsum(log_w[p] - log_s[k - 1] for k, p in enumerate(parents, start=1))
        key = tuple(sum(1 for p in parents if p == t) for t in targets)
        table.setdefault(key, []).append(math.exp(logp))
    return JointDegreePmf(targets, {k: math.fsum(v) for k, v in table.items()})


def poisson_binomial_marginal(weights, j: int) -> np.ndarray:
    """Exact law of the in-degree of vertex ``j`` given the weights."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if not 0 <= j < n:
        raise ValueError(f"vertex must lie in 0..{n - 1}, got {j}")
    cum = prefix_sums(w)
    probs = w[j] / cum[j:n - 1]  # arrivals k = j+1 .. n-1 see S_k = cum[k-1]
    pmf = np.zeros(probs.size + 1)
    pmf[0] = 1.0
    for m, p in enumerate(probs, start=1):
        pmf[1 : m + 1] = pmf[1 : m + 1] * (1.0 - p) + pmf[0:m] * p
        pmf[0] *= 1.0 - p
    return pmf


@numba.njit(cache=True)
def _pb_rows(w, cum, js, cap):
    """Truncated Poisson-binomial pmfs of several vertices; mass above ``cap`` is dropped."""
    n = w.shape[0]
    out = np.zeros((js.shape[0], cap + 1))
    for r in range(js.shape[0]):
        j = js[r]
        row = out[r]
        row[0] = 1.0
        top = 0
        for k in range(j + 1, n):
            p = w[j] / cum[k - 1]
            q = 1.0 - p
            if top < cap:
                top += 1
            for d in range(top, 0, -1):
                row[d] = row[d] * q + row[d - 1] * p
            row[0] *= q
            # shrink the active range once the top cell is negligible
            while top > 0 and row[top] < 1e-18:
                top -= 1
    return out


@numba.njit(cache=True)
def _pb_weighted_sum(w, cum, cap):
    """Sum over all vertices of their truncated in-degree pmfs."""
    n = w.shape[0]
    acc = np.zeros(cap + 1)
    row = np.zeros(cap + 1)
    for j in range(n):
        row[:] = 0.0
        row[0] = 1.0
        top = 0
        for k in range(j + 1, n):
            p = w[j] / cum[k - 1]
            q = 1.0 - p
            if top < cap:
                top += 1
            for d in range(top, 0, -1):
                row[d] = row[d] * q + row[d - 1] * p
            row[0] *= q
            while top > 0 and row[top] < 1e-18:
                top -= 1
        acc += row
    return acc


@dataclass(frozen=True)
class DegreeLawEstimate:
    pmf: np.ndarray
    stderr: np.ndarray
    replicates: int

    def to_json(self) -> str:
        return json.dumps(
            {"pmf": self.pmf.tolist(), "stderr": self.stderr.tolist(), "replicates": self.replicates}
        )


def _deterministic(law: WeightLaw) -> bool:
    return isinstance(law, Constant) or (isinstance(law, AtomMix) and law.q0 == 1.0)


def unconditional_degree_law(
    law: WeightLaw,
    n: int,
    j: Union[int, str] = "uniform",
    replicates: int = MIN_WEIGHT_REPLICATES,
    seed: int = 0,
    max_degree: int = 80,
) -> DegreeLawEstimate:
    """Weight-averaged in-degree law of vertex ``j`` (or of a uniform vertex).

    Attachment randomness is integrated out exactly for each sampled weight
    vector, so only weight sampling contributes to the standard errors.
    Deterministic laws use a single weight vector and report zero error.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    uniform = j == "uniform"
    if not uniform and not 0 <= int(j) < n:
        raise ValueError(f"vertex must lie in 0..{n - 1}, got {j}")
    deterministic = _deterministic(law)
    if deterministic:
        replicates = 1
    elif replicates < MIN_WEIGHT_REPLICATES:
        raise ValueError(f"need at least {MIN_WEIGHT_REPLICATES} weight replicates, got {replicates}")
    rows = np.empty((replicates, max_degree + 1))
    js = np.array([0 if uniform else int(j)], dtype=np.int64)
    for r in range(replicates):
        rng = np.random.default_rng(replicate_seed(seed, r))
        w = np.atleast_1d(law.sample(rng, size=n)).astype(float)
        cum = prefix_sums(w)
        if uniform:
            rows[r] = _pb_weighted_sum(w, cum, max_degree) / n
        else:
            rows[r] = _pb_rows(w, cum, js, max_degree)[0]
    pmf = rows.mean(axis=0)
    if replicates > 1:
        se = rows.std(axis=0, ddof=1) / math.sqrt(replicates)
    else:
        se = np.zeros_like(pmf)
    return DegreeLawEstimate(pmf, se, replicates)

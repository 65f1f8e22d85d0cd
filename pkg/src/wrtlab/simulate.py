"""Weighted recursive tree generation.

Vertices are labelled ``0 .. n-1`` (vertex ``i`` here is vertex ``i + 1`` in
one-based notation); the root has parent ``-1``.  Vertex ``k`` attaches to
``i < k`` with probability ``W_i / S_k`` where ``S_k = W_0 + ... + W_{k-1}``.
Since weights never change after insertion, a static prefix-sum array plus a
search per arrival is all the bookkeeping needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .weights import WeightLaw

FIXED = "fixed"
RANDOM_OUT = "random-out"
MODES = (FIXED, RANDOM_OUT)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replicate_seed(seed: int, replicate: int) -> int:
    """Seed of replicate ``r``: ``seed XOR splitmix64(r)``; independent of run order."""
    if seed < 0:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")
    return (seed & _MASK64) ^ splitmix64(replicate)


def prefix_sums(weights: np.ndarray, block: Optional[int] = None) -> np.ndarray:
    """Cumulative sums with two-level (blocked) summation.

    Rounding error grows like ``(n / block + block) * eps`` instead of
    ``n * eps`` for a plain running sum.
    """
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if block is None:
        block = max(64, int(math.isqrt(max(n, 1))))
    if n <= block:
        return np.cumsum(w)
    nblocks = -(-n // block)
    padded = np.zeros(nblocks * block)
    padded[:n] = w
    inner = np.cumsum(padded.reshape(nblocks, block), axis=1)
    offsets = np.concatenate(([0.0], np.cumsum(inner[:-1, -1])))
    return (inner + offsets[:, None]).reshape(-1)[:n]


class CumIndex:
    """Append-only cumulative weight index supporting categorical draws."""

    def __init__(self, weights=None):
        self._cum = np.empty(16)
        self._size = 0
        if weights is not None:
            self.extend(weights)

    def __len__(self):
        return self._size

    def _reserve(self, extra):
        need = self._size + extra
        if need > self._cum.shape[0]:
            cap = max(need, 2 * self._cum.shape[0])
            grown = np.empty(cap)
            grown[: self._size] = self._cum[: self._size]
            self._cum = grown

    def append(self, w: float) -> None:
        if not w > 0:
            raise ValueError(f"weights must be positive, got {w}")
        self._reserve(1)
        self._cum[self._size] = self.total + w
        self._size += 1

    def extend(self, weights) -> None:
        w = np.asarray(weights, dtype=float)
        if w.size == 0:
            return
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        self._reserve(w.size)
        self._cum[self._size : self._size + w.size] = self.total + prefix_sums(w)
        self._size += w.size

    @property
    def total(self) -> float:
        return float(self._cum[self._size - 1]) if self._size else 0.0

    @property
    def cumulative(self) -> np.ndarray:
        return self._cum[: self._size]

    def prefix(self, i: int) -> float:
        return float(self._cum[i]) if i >= 0 else 0.0


def sample_parent(index: CumIndex, rng: np.random.Generator) -> int:
    """Draw ``i`` with probability ``(prefix(i) - prefix(i-1)) / total``."""
    if len(index) == 0:
        raise ValueError("cannot sample from an empty index")
    cum = index.cumulative
    target = rng.random() * cum[-1]
    i = int(np.searchsorted(cum, target, side="right"))
    return min(i, len(index) - 1)


@numba.njit(cache=True)
def _attach(cum, u):
    """Parent of vertex k (k >= 1): first i with cum[i] > u[k-1] * cum[k-1].

    The search starts from a linear-interpolation guess and gallops outward;
    prefix sums grow almost linearly so the bracket stays local.
    """
    n = cum.shape[0]
    parents = np.empty(n, np.int64)
    parents[0] = -1
    if n == 1:
        return parents
    slope = cum[n - 1] / n
    for k in range(1, n):
        x = u[k - 1] * cum[k - 1]
        top = k  # candidates are 0 .. k-1
        g = int(x / slope)
        if g > top - 1:
            g = top - 1
        if g < 0:
            g = 0
        if cum[g] > x:
            hi = g
            step = 1
            lo = g - step
            while lo >= 0 and cum[lo] > x:
                hi = lo
                step *= 2
                lo = g - step
            if lo < 0:
                lo = -1
        else:
            lo = g
            step = 1
            hi = g + step
            while hi < top and cum[hi] <= x:
                lo = hi
                step *= 2
                hi = g + step
            if hi > top:
                hi = top
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if cum[mid] > x:
                hi = mid
            else:
                lo = mid
        if hi > top - 1:
            hi = top - 1
        parents[k] = hi
    return parents


@numba.njit(cache=True)
def _random_out(weights, cum, rng):
    """Edges of the random out-degree model by geometric skipping.

    Arrival k proposes each earlier vertex independently with the uniform
    bound ``p = min(1, 1/S_k)``; a proposal of i is kept with probability
    ``W_i / (S_k p)``, which is at most 1 because ``W_i <= min(1, S_k)``.
    """
    n = weights.shape[0]
    cap = 2 * n + 16
    child = np.empty(cap, np.int64)
    parent = np.empty(cap, np.int64)
    m = 0
    for k in range(1, n):
        s = cum[k - 1]
        p = 1.0 / s
        if p >= 1.0:
            p = 1.0
            log_q = 0.0
        else:
            log_q = math.log1p(-p)
        pos = -1
        while True:
            if p >= 1.0:
                pos += 1
            else:
                pos += 1 + int(math.floor(math.log(1.0 - rng.random()) / log_q))
            if pos >= k:
                break
            if rng.random() < weights[pos] / (s * p):
                if m == cap:
                    cap *= 2
                    c2 = np.empty(cap, np.int64)
                    p2 = np.empty(cap, np.int64)
                    c2[:m] = child[:m]
                    p2[:m] = parent[:m]
                    child = c2
                    parent = p2
                child[m] = k
                parent[m] = pos
                m += 1
    return child[:m].copy(), parent[:m].copy()


@dataclass
class Wrt:
    """A generated tree (fixed mode) or random out-degree graph."""

    n: int
    weights: np.ndarray
    in_degrees: np.ndarray
    mode: str = FIXED
    parents: Optional[np.ndarray] = None
    edges: Optional[np.ndarray] = None  # shape (m, 2): (child, parent)
    meta: dict = field(default_factory=dict)

    @property
    def max_degree(self) -> int:
        return int(self.in_degrees.max())

    @property
    def num_edges(self) -> int:
        return int(self.n - 1) if self.mode == FIXED else int(self.edges.shape[0])

    def edge_list(self) -> np.ndarray:
        if self.mode == FIXED:
            child = np.arange(1, self.n)
            return np.column_stack([child, self.parents[1:]])
        return self.edges


def generate_from_weights(weights, mode: str = FIXED, rng: Optional[np.random.Generator] = None) -> Wrt:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    w = np.ascontiguousarray(weights, dtype=float)
    n = w.shape[0]
    if n < 1:
        raise ValueError("n must be at least 1")
    if rng is None:
        rng = np.random.default_rng()
    cum = prefix_sums(w)
    if mode == FIXED:
        u = rng.random(n - 1)
        parents = _attach(cum, u)
        deg = np.bincount(parents[1:], minlength=n).astype(np.int32)
        return Wrt(n=n, weights=w, in_degrees=deg, mode=mode, parents=parents)
    child, parent = _random_out(w, cum, rng)
    deg = np.bincount(parent, minlength=n).astype(np.int32)
    return Wrt(n=n, weights=w, in_degrees=deg, mode=mode, edges=np.column_stack([child, parent]))


def generate(law: WeightLaw, n: int, mode: str = FIXED, seed: int = 0) -> Wrt:
    """Generate a tree; the result is a deterministic function of its arguments."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    rng = np.random.default_rng(seed)
    weights = np.atleast_1d(law.sample(rng, size=n)).astype(float)
    tree = generate_from_weights(weights, mode, rng)
    tree.meta = {"law": law.to_dict(), "n": n, "mode": mode, "seed": seed}
    return tree


def generate_replicate(law: WeightLaw, n: int, mode: str, seed: int, replicate: int) -> Wrt:
    return generate(law, n, mode, replicate_seed(seed, replicate))


def expected_edge_count(tree: Wrt) -> int:
    """Observed edge count of a random out-degree graph (its mean is n - 1)."""
    if tree.mode != RANDOM_OUT:
        raise ValueError("edge-count check applies to random-out graphs only")
    return tree.num_edges


def simulate_degrees_fixed_weights(weights, size: int, rng: np.random.Generator) -> np.ndarray:
    """In-degree matrix (size, n) of ``size`` independent trees sharing ``weights``."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    cum = prefix_sums(w)
    deg = np.zeros((size, n), dtype=np.int32)
    rows = np.arange(size)
    for k in range(1, n):
        target = rng.random(size) * cum[k - 1]
        parent = np.minimum(np.searchsorted(cum[:k], target, side="right"), k - 1)
        np.add.at(deg, (rows, parent), 1)
    return deg


def write_edge_csv(tree: Wrt, path) -> None:
    """Dump ``child,parent`` rows under a one-line JSON metadata comment."""
    import json

    with open(path, "w") as fh:
        fh.write("# " + json.dumps(tree.meta, sort_keys=True) + "\n")
        fh.write("child,parent\n")
        for c, p in tree.edge_list():
            fh.write(f"{int(c)},{int(p)}\n")

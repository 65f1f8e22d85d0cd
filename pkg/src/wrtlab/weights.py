"""Vertex-weight laws on (0, 1].

Each law is an immutable value object that knows how to sample itself, its
mean, its tail ``P(W > x)`` and its maximum-domain-of-attraction class near
the upper endpoint 1.  Laws round-trip through plain JSON dictionaries::

    {"kind": "constant", "value": 1.0}
    {"kind": "atom_mix", "q0": 0.5, "base": {"kind": "constant", "value": 0.5}}
    {"kind": "beta", "alpha": 2.0, "beta": 3.0}
    {"kind": "gamma_fraction", "b": 0.0, "c1": 1.0}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import integrate, special

# bisection bracket for the gamma-fraction inverse CDF
_GF_UPPER = 1.0 - 1e-15
_GF_ITERATIONS = 60


@dataclass(frozen=True)
class Atom:
    q0: float


@dataclass(frozen=True)
class Weibull:
    # exponent of P(W >= 1 - 1/x) ~ x^-(alpha - 1)
    alpha_minus_one: float


@dataclass(frozen=True)
class GumbelRV:
    tau: float
    c1: float
    b: float


MdaTag = Union[Atom, Weibull, GumbelRV]


class WeightLaw:
    """Common interface of the catalog laws."""

    kind: str = ""

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def tail(self, x):
        """P(W > x) for 0 <= x < 1 (scalar or array)."""
        raise NotImplementedError

    def mda(self) -> MdaTag:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    @property
    def theta(self) -> float:
        return 1.0 + self.mean()

    @property
    def atom_at_one(self) -> float:
        """P(W = 1)."""
        return 0.0

    def mass_below_one(self, x):
        """P(W in (x, 1)), the near-one mass excluding an atom at 1."""
        return self.tail(x) - self.atom_at_one

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_unit_interval(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= 1.0) or np.any(np.isnan(arr)):
        raise ValueError(f"tail argument must lie in [0, 1), got {x!r}")
    return arr


def _scalar_or_array(template, arr):
    return float(arr) if np.ndim(template) == 0 else arr


@dataclass(frozen=True)
class Constant(WeightLaw):
    value: float = 1.0
    kind = "constant"

    def __post_init__(self):
        if not 0.0 < self.value <= 1.0:
            raise ValueError(f"constant weight must lie in (0, 1], got {self.value}")

    def sample(self, rng, size=None):
        if size is None:
            return float(self.value)
        return np.full(size, self.value, dtype=float)

    def mean(self):
        return float(self.value)

    def tail(self, x):
        arr = _check_unit_interval(x)
        return _scalar_or_array(x, np.where(arr < self.value, 1.0, 0.0))

    @property
    def atom_at_one(self):
        return 1.0 if self.value == 1.0 else 0.0

    def mda(self):
        if self.value != 1.0:
            # a constant below one only satisfies x0 = 1 after rescaling
            raise ValueError(
                "Constant(value<1) has upper endpoint below 1; rescale to Constant(1.0)"
            )
        return Atom(q0=1.0)

    def to_dict(self):
        return {"kind": self.kind, "value": float(self.value)}


@dataclass(frozen=True)
class Beta(WeightLaw):
    alpha: float = 1.0
    beta: float = 1.0
    kind = "beta"

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(f"beta parameters must be positive, got {self.alpha}, {self.beta}")

    def sample(self, rng, size=None):
        out = rng.beta(self.alpha, self.beta, size=size)
        return float(out) if size is None else out

    def mean(self):
        return self.alpha / (self.alpha + self.beta)

    def tail(self, x):
        arr = _check_unit_interval(x)
        # P(W > x) = I_{1-x}(beta, alpha); accurate near x = 1
        return _scalar_or_array(x, special.betainc(self.beta, self.alpha, 1.0 - arr))

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        log_norm = (
            math.lgamma(self.alpha + self.beta) - math.lgamma(self.alpha) - math.lgamma(self.beta)
        )
        return log_norm + (self.alpha - 1.0) * np.log(x) + (self.beta - 1.0) * np.log1p(-x)

    def mda(self):
        # near-one mass decays like (1 - x)^beta
        return Weibull(alpha_minus_one=self.beta)

    def to_dict(self):
        return {"kind": self.kind, "alpha": float(self.alpha), "beta": float(self.beta)}


@lru_cache(maxsize=None)
def _gamma_fraction_mean(b: float, c1: float) -> float:
    law = GammaFraction(b, c1)
    value, _ = integrate.quad(
        lambda x: x * law.density(x), 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return value


@dataclass(frozen=True)
class GammaFraction(WeightLaw):
    """Tail ``P(W >= x) = (1 - x)^-b exp(-x / (c1 (1 - x)))`` on [0, 1)."""

    b: float = 0.0
    c1: float = 1.0
    kind = "gamma_fraction"

    def __post_init__(self):
        if not self.c1 > 0.0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        if self.b * self.c1 > 1.0:
            raise ValueError(f"b*c1 must not exceed 1 (density would go negative), got {self.b * self.c1}")

    def log_tail(self, x):
        x = np.asarray(x, dtype=float)
        return -self.b * np.log1p(-x) - x / (self.c1 * (1.0 - x))

    def tail(self, x):
        arr = _check_unit_interval(x)
        return _scalar_or_array(x, np.exp(self.log_tail(arr)))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            f = (1.0 / self.c1 - self.b * (1.0 - x)) * (1.0 - x) ** (-(self.b + 2.0)) * np.exp(
                -x / (self.c1 * (1.0 - x))
            )
        f = np.where(x >= 1.0, 0.0, f)
        return float(f) if f.ndim == 0 else f

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        return (
            np.log(1.0 / self.c1 - self.b * (1.0 - x))
            - (self.b + 2.0) * np.log1p(-x)
            - x / (self.c1 * (1.0 - x))
        )

    def inverse_tail(self, u):
        """Solve P(W >= x) = u by bisection; u in (0, 1]."""
        u = np.asarray(u, dtype=float)
        target = np.log(u)
        lo = np.zeros_like(u)
        hi = np.full_like(u, _GF_UPPER)
        for _ in range(_GF_ITERATIONS):
            mid = 0.5 * (lo + hi)
            above = self.log_tail(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)

    def sample(self, rng, size=None):
        u = 1.0 - rng.random(size=size)
        out = self.inverse_tail(u)
        return float(out) if size is None else out

    def mean(self):
        return _gamma_fraction_mean(float(self.b), float(self.c1))

    def mda(self):
        return GumbelRV(tau=1.0, c1=self.c1, b=self.b)

    def to_dict(self):
        return {"kind": self.kind, "b": float(self.b), "c1": float(self.c1)}


@dataclass(frozen=True)
class AtomMix(WeightLaw):
    """Mass ``q0`` at 1, the rest distributed as ``base`` on (0, 1)."""

    q0: float = 1.0
    base: WeightLaw | None = None
    kind = "atom_mix"

    def __post_init__(self):
        if not 0.0 < self.q0 <= 1.0:
            raise ValueError(f"q0 must lie in (0, 1], got {self.q0}")
        if self.q0 < 1.0:
            if self.base is None:
                raise ValueError("AtomMix with q0 < 1 needs a base law")
            if isinstance(self.base, Constant):
                if self.base.value >= 1.0:
                    raise ValueError("constant base law must sit strictly below 1")
            elif not isinstance(self.base, Beta):
                raise ValueError(f"base law must be Constant or Beta, got {type(self.base).__name__}")

    def sample(self, rng, size=None):
        if self.q0 == 1.0:
            return 1.0 if size is None else np.ones(size)
        atom = rng.random(size=size) < self.q0
        rest = self.base.sample(rng, size=size)
        out = np.where(atom, 1.0, rest)
        return float(out) if size is None else out

    def mean(self):
        if self.q0 == 1.0:
            return 1.0
        return self.q0 + (1.0 - self.q0) * self.base.mean()

    def tail(self, x):
        arr = _check_unit_interval(x)
        out = np.full_like(arr, self.q0)
        if self.q0 < 1.0:
            out = out + (1.0 - self.q0) * np.asarray(self.base.tail(arr))
        return _scalar_or_array(x, out)

    @property
    def atom_at_one(self):
        return self.q0

    def mass_below_one(self, x):
        # avoid tail(x) - q0 cancellation
        arr = _check_unit_interval(x)
        if self.q0 == 1.0:
            return _scalar_or_array(x, np.zeros_like(arr))
        return _scalar_or_array(x, (1.0 - self.q0) * np.asarray(self.base.tail(arr)))

    def mda(self):
        return Atom(q0=self.q0)

    def to_dict(self):
        return {
            "kind": self.kind,
            "q0": float(self.q0),
            "base": None if self.base is None else self.base.to_dict(),
        }


def sample(law: WeightLaw, rng: np.random.Generator, size=None):
    return law.sample(rng, size)


def mean(law: WeightLaw) -> float:
    return law.mean()


def theta(law: WeightLaw) -> float:
    return law.theta


def tail(law: WeightLaw, x):
    return law.tail(x)


def mda_class(law: WeightLaw) -> MdaTag:
    return law.mda()


def law_from_dict(d: dict) -> WeightLaw:
    kind = d.get("kind")
    if kind == "constant":
        return Constant(float(d["value"]))
    if kind == "beta":
        return Beta(float(d["alpha"]), float(d["beta"]))
    if kind == "gamma_fraction":
        return GammaFraction(float(d["b"]), float(d["c1"]))
    if kind == "atom_mix":
        base = d.get("base")
        return AtomMix(float(d["q0"]), None if base is None else law_from_dict(base))
    raise ValueError(f"unknown weight law kind {kind!r}")


PRESETS = {
    "rrt": Constant(1.0),
    "atom-gap": AtomMix(0.5, Constant(0.5)),
    "atom-beta": AtomMix(0.5, Beta(2.0, 3.0)),
    "arcsine": Beta(0.5, 0.5),
    "beta12": Beta(1.0, 2.0),
    "beta23": Beta(2.0, 3.0),
    "gamma01": GammaFraction(0.0, 1.0),
    "gamma105": GammaFraction(1.0, 0.5),
}


def parse_law(text: str) -> WeightLaw:
    """Accept a preset name or an inline JSON law description."""
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"law must be a preset ({', '.join(PRESETS)}) or JSON: {text!r}") from exc
    if not isinstance(d, dict):
        raise ValueError(f"law JSON must be an object, got {text!r}")
    return law_from_dict(d)

"""Centering sequences and limit predictions for the maximum degree.

A :class:`Centering` fixes the real sequence ``c(n)`` whose floor defines the
degree buckets ``X_i`` (vertices with degree ``floor(c(n)) + i``), the
fractional part ``eps_n`` and the constant in front of the limiting Poisson
intensity ``const * theta^-x log(theta) dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .degdist import beta_tail_constant, gamma_fraction_constant
from .weights import Atom, AtomMix, Beta, Constant, GammaFraction, GumbelRV, WeightLaw

ATOM = "atom"
BETA = "beta_weibull"
GAMMA = "gamma_fraction_gumbel"
RAV = "rav"

SK_UPPER = 1.0 - 1e-15
SK_ITERATIONS = 200
PMF_TERM_RTOL = 1e-15


@dataclass(frozen=True)
class RaVProfile:
    """Prediction-only description of a rapidly-varying Gumbel weight tail.

    ``P((1-W)^-1 > x) ~ a (log x)^b exp(-(log(x)/c1)^tau)``, tau > 1.  No
    sampler exists for this class, so ``theta`` has to be supplied.
    """

    tau: float
    c1: float
    theta: float
    b: float = 0.0

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("RaV sub-case needs tau > 1")
        if not 1.0 < self.theta <= 2.0:
            raise ValueError("theta must lie in (1, 2]")


def c_theta_tau_c1(theta: float, tau: float, c1: float) -> float:
    """C_{theta,tau,c1} = tau^g / ((1-g) log theta) ((1 - 1/theta)/c1)^(1-g), g = 1/(1+tau)."""
    g = 1.0 / (1.0 + tau)
    return tau**g / ((1.0 - g) * math.log(theta)) * ((1.0 - 1.0 / theta) / c1) ** (1.0 - g)


def rav_constants(theta: float, tau: float, c1: float) -> tuple[float, float, float]:
    """(C1, C2, C3) of the rapidly-varying second/third/fourth-order centering."""
    lt = math.log(theta)
    c_1 = lt ** (tau - 1.0) * c1 ** (-tau)
    c_2 = lt ** (tau - 1.0) * tau * (tau - 1.0) * c1 ** (-tau)
    c_3 = (
        (math.log(lt) / lt) * (tau - 1.0) * lt - math.log(math.e * c1**tau * (1.0 - 1.0 / theta) / tau)
    ) * lt ** (tau - 2.0) * tau * c1 ** (-tau)
    return c_1, c_2, c_3


def beta_intensity(alpha: float, beta: float) -> float:
    """c_{alpha,beta,theta} = Gamma(alpha+beta)/Gamma(alpha) (1 - 1/theta)^-beta."""
    return beta_tail_constant(alpha, beta)


def gamma_fraction_intensity(b: float, c1: float) -> float:
    """c_{c1,b,theta} = C theta^(C_{theta,1,c1}^2 / 2)."""
    theta = GammaFraction(b, c1).theta
    big_c = gamma_fraction_constant(b, c1, theta)
    return big_c * theta ** (c_theta_tau_c1(theta, 1.0, c1) ** 2 / 2.0)


def log_base(x: float, theta: float) -> float:
    """log_theta(x), snapped to an integer when x is an exact power of theta."""
    v = math.log(x) / math.log(theta)
    r = round(v)
    if r != v and abs(v - r) < 1e-9 and math.isclose(theta**r, x, rel_tol=1e-13):
        return float(r)
    return v


@dataclass(frozen=True)
class Centering:
    case: str
    theta: float
    intensity_const: Optional[float]
    beta: float = 0.0
    b: float = 0.0
    c_second: float = 0.0  # C_{theta,1,c1} for gamma-fraction weights
    rav: tuple = field(default=())  # (tau, C1, C2, C3)

    def _loglog(self, n):
        lt = log_base(n, self.theta)
        if lt <= 1.0:
            raise ValueError(f"centering for case {self.case!r} needs log_theta(n) > 1, got n={n}")
        return log_base(lt, self.theta)

    def terms(self, n) -> dict:
        """Named components whose sum is c(n)."""
        lt = log_base(n, self.theta)
        if self.case == ATOM:
            return {"log_theta_n": lt}
        if self.case == BETA:
            return {"log_theta_n": lt, "second_order": -self.beta * self._loglog(n)}
        if self.case == GAMMA:
            return {
                "log_theta_n": lt,
                "second_order": -self.c_second * math.sqrt(lt),
                "third_order": (self.b / 2.0 + 0.25) * self._loglog(n),
            }
        tau, c_1, c_2, c_3 = self.rav
        ll = self._loglog(n)
        if ll <= 1.0:
            raise ValueError("RaV centering needs log_theta log_theta n > 1")
        return {
            "log_theta_n": lt,
            "second_order": -c_1 * ll**tau,
            "third_order": c_2 * ll ** (tau - 1.0) * log_base(ll, self.theta),
            "fourth_order": c_3 * ll ** (tau - 1.0),
        }

    def c_of_n(self, n) -> float:
        return math.fsum(self.terms(n).values())

    def floor_center(self, n) -> int:
        return math.floor(self.c_of_n(n))

    def eps_n(self, n) -> float:
        c = self.c_of_n(n)
        return c - math.floor(c)

    def tail_adjust(self, delta: float = 0.0) -> float:
        """Multiplier of the intensity when the window drifts at rate delta."""
        if delta == 0.0:
            return 1.0
        if self.case == BETA:
            return (1.0 + delta) ** (-self.beta)
        if self.case == GAMMA:
            return self.theta ** (-delta * self.c_second / 2.0)
        raise ValueError(f"drift delta != 0 is not covered for case {self.case!r}")

    def _require_intensity(self):
        if self.intensity_const is None:
            raise ValueError(f"no Poisson limit is available for case {self.case!r}")
        return self.intensity_const


Predictable = Union[WeightLaw, RaVProfile]


def centering_for(law: Predictable) -> Centering:
    if isinstance(law, RaVProfile):
        c_1, c_2, c_3 = rav_constants(law.theta, law.tau, law.c1)
        return Centering(RAV, law.theta, None, b=law.b, rav=(law.tau, c_1, c_2, c_3))
    tag = law.mda()
    theta = law.theta
    if isinstance(tag, Atom):
        return Centering(ATOM, theta, tag.q0)
    if isinstance(law, Beta):
        return Centering(BETA, theta, beta_intensity(law.alpha, law.beta), beta=law.beta)
    if isinstance(law, GammaFraction):
        return Centering(
            GAMMA,
            theta,
            gamma_fraction_intensity(law.b, law.c1),
            b=law.b,
            c_second=c_theta_tau_c1(theta, 1.0, law.c1),
        )
    raise ValueError(f"no centering available for {law!r}")


def bucket_means(centering: Centering, n: int, i: int, delta: float = 0.0) -> tuple[float, float]:
    """Limiting means of (X_i, X_{>=i})."""
    c = centering._require_intensity() * centering.tail_adjust(delta)
    th = centering.theta
    scale = c * th ** (-i + centering.eps_n(n))
    return (1.0 - 1.0 / th) * scale, scale


def max_tail_prediction(centering: Centering, n: int, i: int, delta: float = 0.0) -> float:
    """Limit of P(max degree >= floor(c(n)) + i)."""
    c = centering._require_intensity() * centering.tail_adjust(delta)
    x = c * centering.theta ** (-i + centering.eps_n(n))
    return -math.expm1(-x)


def _pmf_log_term(log_c, log_th, a_log, eps, j, k, lgk):
    log_mu = log_c + (-j + eps) * log_th
    mu = math.exp(log_mu)
    return k * (a_log + log_mu) - mu - lgk


def maximizer_count_pmf(
    centering: Centering, eps: float, k: int, j_window: Optional[int] = None
) -> float:
    """P(M_eps = k): limiting law of the number of maximum-degree vertices.

    sum over j of (c (1-1/theta) theta^(-j+eps))^k / k! * exp(-c theta^(-j+eps)).
    Without ``j_window`` the sum runs outward from its largest term until
    terms fall below 1e-15 of the running total.
    """
    if k < 1:
        raise ValueError("the maximizer count is supported on k >= 1")
    c = centering._require_intensity()
    th = centering.theta
    log_c, log_th = math.log(c), math.log(th)
    a_log = math.log(1.0 - 1.0 / th)
    lgk = math.lgamma(k + 1)

    def term(j):
        return math.exp(_pmf_log_term(log_c, log_th, a_log, eps, j, k, lgk))

    if j_window is not None:
        return math.fsum(term(j) for j in range(-j_window, j_window + 1))
    # largest term sits where c theta^(-j+eps) is close to k
    j_peak = round(eps + (log_c - math.log(k)) / log_th)
    terms = [term(j_peak)]
    for direction in (1, -1):
        j = j_peak + direction
        while True:
            t = term(j)
            terms.append(t)
            if t <= PMF_TERM_RTOL * math.fsum(terms) and abs(j - j_peak) > 2:
                break
            j += direction
    return math.fsum(terms)


@dataclass(frozen=True)
class SkRk:
    k: object
    sk: object
    rk: object
    log_rk: object  # kept separately since r_k underflows for large k


def sk_rk(law: WeightLaw, k) -> SkRk:
    """s_k = inf{x in (0,1): P(W in (x,1)) <= exp(-(1-1/theta)(1-x)k)}, r_k = exp(-(1-1/theta)(1-s_k)k).

    ``k`` may be a real scalar or an array; bisection runs on all entries at
    once.  The predicate is monotone in x, so bisection lands on the leftmost
    crossing, which is the infimum even across flat stretches of the law.
    """
    ks = np.asarray(k, dtype=float)
    if np.any(ks < 1):
        raise ValueError("k must be at least 1")
    a = 1.0 - 1.0 / law.theta
    lo = np.zeros_like(ks)
    hi = np.full_like(ks, SK_UPPER)
    for _ in range(SK_ITERATIONS):
        mid = 0.5 * (lo + hi)
        ok = np.asarray(law.mass_below_one(mid)) <= np.exp(-a * (1.0 - mid) * ks)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    s = hi
    log_r = -a * (1.0 - s) * ks
    r = np.exp(log_r)
    if ks.ndim == 0:
        return SkRk(float(ks), float(s), float(r), float(log_r))
    return SkRk(ks, s, r, log_r)


def second_order_prediction(law: Predictable, n: Optional[int] = None) -> float:
    """In-probability limit of the normalised maximum degree.

    Beta weights: (max - log_theta n) / log_theta log_theta n -> -beta.
    Gumbel (RV) weights: (max - log_theta n) / (log_theta n)^(1-g) -> -C_{theta,tau,c1}.
    Gumbel (RaV): the fourth-order constant C3.  Atom laws have a random
    limit, so they are rejected.
    """
    if isinstance(law, RaVProfile):
        return rav_constants(law.theta, law.tau, law.c1)[2]
    tag = law.mda()
    if isinstance(tag, Atom):
        raise ValueError("atom laws have no deterministic second-order limit")
    if isinstance(law, Beta):
        return -tag.alpha_minus_one
    if isinstance(tag, GumbelRV):
        return -c_theta_tau_c1(law.theta, tag.tau, tag.c1)
    raise ValueError(f"no second-order prediction for {law!r}")


def second_order_statistic(centering_theta: float, law: WeightLaw, max_degree: int, n: int) -> float:
    """Empirical counterpart of :func:`second_order_prediction` for one tree."""
    lt = log_base(n, centering_theta)
    if isinstance(law, Beta):
        return (max_degree - lt) / log_base(lt, centering_theta)
    tag = law.mda()
    if isinstance(tag, GumbelRV):
        g = 1.0 / (1.0 + tag.tau)
        return (max_degree - lt) / lt ** (1.0 - g)
    raise ValueError(f"no second-order statistic for {law!r}")


def prediction_summary(law: Predictable, n: int) -> dict:
    """JSON-ready record used by the ``predict`` command."""
    cen = centering_for(law)
    out = {
        "case": cen.case,
        "theta": cen.theta,
        "n": n,
        "centering_terms": cen.terms(n),
        "c_of_n": cen.c_of_n(n),
        "floor_center": cen.floor_center(n),
        "eps_n": cen.eps_n(n),
        "intensity_const": cen.intensity_const,
    }
    try:
        out["second_order_limit"] = second_order_prediction(law, n)
    except ValueError:
        out["second_order_limit"] = None
    consts = {}
    if cen.case == GAMMA:
        consts["C_theta_1_c1"] = cen.c_second
        consts["C"] = gamma_fraction_constant(law.b, law.c1, cen.theta)
        consts["c_c1_b_theta"] = cen.intensity_const
    elif cen.case == BETA:
        consts["c_alpha_beta_theta"] = cen.intensity_const
    elif cen.case == RAV:
        tau, c_1, c_2, c_3 = cen.rav
        consts.update({"C1": c_1, "C2": c_2, "C3": c_3})
    out["constants"] = consts
    return out

"""Limiting in-degree law of a uniform vertex.

    p_k      = E[ (theta-1)/(theta-1+W) * (W/(theta-1+W))^k ]
    p_{>=k}  = E[ (W/(theta-1+W))^k ]

with ``theta = 1 + E[W]``.  Values are computed by adaptive quadrature over
the weight law, by the hypergeometric closed form for beta weights, and by
leading-order asymptotics for large ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import integrate

from . import specfun
from .weights import Atom, AtomMix, Beta, Constant, GammaFraction, GumbelRV, WeightLaw, Weibull

QUAD_RTOL = 1e-11
LOG_SPACE_K = 50

PK = "pk"
PGEQ = "pgeq"


@dataclass(frozen=True)
class DegreeTailValue:
    k: int
    pk: float
    pgeq: float
    method: str  # "quadrature" | "closed_form" | "asymptotic"


def _kernel(theta: float, w: float, k: int, which: str, scaled: bool = False) -> float:
    """Integrand of p_k (which="pk") or p_{>=k} (which="pgeq") at weight w.

    With ``scaled=True`` the value is multiplied by theta^k, which keeps it in
    [0, 1] and avoids underflow for large k.
    """
    if w <= 0.0:
        if k > 0:
            return 0.0
        return 1.0 if which == PGEQ else 1.0
    t1 = theta - 1.0
    if k > LOG_SPACE_K:
        log_ratio = math.log(w) - math.log(t1 + w)
        if scaled:
            log_ratio += math.log(theta)
        log_v = k * log_ratio
        if which == PK:
            log_v += math.log(t1) - math.log(t1 + w)
        return math.exp(log_v)
    ratio = w / (t1 + w)
    if scaled:
        ratio *= theta
    v = ratio**k
    if which == PK:
        v *= t1 / (t1 + w)
    return v


def _beta_expectation(law: Beta, theta: float, k: int, which: str, scaled: bool) -> float:
    a, b = law.alpha, law.beta
    log_norm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    norm = math.exp(log_norm)

    def f(x):
        return _kernel(theta, x, k, which, scaled)

    # x^(a-1) (1-x)^(b-1) is handled exactly by the algebraic weight
    val, _ = integrate.quad(
        f, 0.0, 1.0, weight="alg", wvar=(a - 1.0, b - 1.0), epsabs=0.0, epsrel=QUAD_RTOL, limit=500
    )
    return norm * val


def _gamma_fraction_expectation(law: GammaFraction, theta: float, k: int, which: str, scaled: bool) -> float:
    b, c1 = law.b, law.c1
    t1 = theta - 1.0

    def f(x):
        if x >= 1.0:
            return 0.0
        lead = 1.0 / c1 - b * (1.0 - x)
        if lead <= 0.0:
            return 0.0
        log_f = math.log(lead) - (b + 2.0) * math.log1p(-x) - x / (c1 * (1.0 - x))
        kern = _kernel(theta, x, k, which, scaled)
        if kern == 0.0:
            return 0.0
        return math.exp(log_f + math.log(kern))

    # the integrand peaks near u = x/(1-x) = sqrt(k c1 (1 - 1/theta))
    points = None
    if k > 0:
        u_star = math.sqrt(k * c1 * t1 / theta)
        points = [u_star / (1.0 + u_star)]
    val, _ = integrate.quad(f, 0.0, 1.0, points=points, epsabs=0.0, epsrel=QUAD_RTOL, limit=500)
    return val


def _expectation(part: WeightLaw, theta: float, k: int, which: str, scaled: bool) -> float:
    if isinstance(part, Constant):
        return _kernel(theta, part.value, k, which, scaled)
    if isinstance(part, Beta):
        return _beta_expectation(part, theta, k, which, scaled)
    if isinstance(part, GammaFraction):
        return _gamma_fraction_expectation(part, theta, k, which, scaled)
    if isinstance(part, AtomMix):
        atom = part.q0 * _kernel(theta, 1.0, k, which, scaled)
        if part.q0 == 1.0:
            return atom
        return atom + (1.0 - part.q0) * _expectation(part.base, theta, k, which, scaled)
    raise TypeError(f"unsupported weight law {part!r}")


def _check_k(k):
    if k < 0 or int(k) != k:
        raise ValueError(f"k must be a non-negative integer, got {k}")
    return int(k)


def pk_quadrature(law: WeightLaw, k: int) -> float:
    k = _check_k(k)
    return _expectation(law, law.theta, k, PK, scaled=False)


def pgeq_quadrature(law: WeightLaw, k: int) -> float:
    k = _check_k(k)
    return _expectation(law, law.theta, k, PGEQ, scaled=False)


def scaled_pk(law: WeightLaw, k: int) -> float:
    """theta^k * p_k, free of underflow for large k."""
    return _expectation(law, law.theta, _check_k(k), PK, scaled=True)


def scaled_pgeq(law: WeightLaw, k: int) -> float:
    """theta^k * p_{>=k}."""
    return _expectation(law, law.theta, _check_k(k), PGEQ, scaled=True)


# -- beta weights: exact hypergeometric representation --


def _beta_prefactor(alpha, beta, k, theta):
    # theta^-k Gamma(a+b) Gamma(k+a) / (Gamma(a) Gamma(k+a+b))
    return math.exp(
        -k * math.log(theta)
        + math.lgamma(alpha + beta)
        + math.lgamma(k + alpha)
        - math.lgamma(alpha)
        - math.lgamma(k + alpha + beta)
    )


def _series(a, b, c, z):
    res = specfun.gauss_2f1(a, b, c, z)
    if not res.converged:
        raise ArithmeticError(f"2F1({a}, {b}; {c}; {z}) did not converge in {res.terms} terms")
    return res.value


def pk_beta_closed_form(alpha: float, beta: float, k: int) -> float:
    """Exact p_k for Beta(alpha, beta) weights.

    Euler's transform then Pfaff's transform bring the hypergeometric
    argument from -1/(theta-1) to 1/theta, giving

        p_k = theta^-k G_k (1 - 1/theta) 2F1(beta, k+1; k+alpha+beta; 1/theta).
    """
    k = _check_k(k)
    theta = 1.0 + alpha / (alpha + beta)
    pref = _beta_prefactor(alpha, beta, k, theta)
    return pref * (1.0 - 1.0 / theta) * _series(beta, k + 1, k + alpha + beta, 1.0 / theta)


def pgeq_beta_closed_form(alpha: float, beta: float, k: int) -> float:
    """Exact p_{>=k} = theta^-k G_k 2F1(beta, k; k+alpha+beta; 1/theta)."""
    k = _check_k(k)
    if k == 0:
        return 1.0
    theta = 1.0 + alpha / (alpha + beta)
    pref = _beta_prefactor(alpha, beta, k, theta)
    return pref * _series(beta, k, k + alpha + beta, 1.0 / theta)


def beta_tail_constant(alpha: float, beta: float) -> float:
    """Gamma(a+b)/Gamma(a) (1 - 1/theta)^(-beta): the large-k constant of p_{>=k} k^beta theta^k."""
    theta = 1.0 + alpha / (alpha + beta)
    return math.exp(math.lgamma(alpha + beta) - math.lgamma(alpha)) * (1.0 - 1.0 / theta) ** (-beta)


# -- gamma-fraction weights --


def gamma_fraction_constant(b: float, c1: float, theta: Optional[float] = None) -> float:
    """Prefactor C = e^{(1-1/theta)/(2 c1)} sqrt(pi) c1^(-1/4+b/2) (1-1/theta)^(1/4+b/2)."""
    if theta is None:
        theta = GammaFraction(b, c1).theta
    a = 1.0 - 1.0 / theta
    return math.exp(a / (2.0 * c1)) * math.sqrt(math.pi) * c1 ** (-0.25 + b / 2.0) * a ** (0.25 + b / 2.0)


def pgeq_gamma_fraction_asymptotic(b: float, c1: float, k: int) -> float:
    theta = GammaFraction(b, c1).theta
    a = 1.0 - 1.0 / theta
    big_c = gamma_fraction_constant(b, c1, theta)
    log_v = (
        math.log(big_c)
        + (b / 2.0 + 0.25) * math.log(k)
        - 2.0 * math.sqrt(a * k / c1)
        - k * math.log(theta)
    )
    return math.exp(log_v)


def pk_gamma_fraction_asymptotic(b: float, c1: float, k: int) -> float:
    theta = GammaFraction(b, c1).theta
    return (1.0 - 1.0 / theta) * pgeq_gamma_fraction_asymptotic(b, c1, k)


# -- generic leading-order regimes --


def gumbel_rv_exponent(tau: float, c1: float, theta: float, k: float) -> float:
    """-(tau^g / (1-g)) ((1-1/theta) k / c1)^(1-g), g = 1/(tau+1)."""
    g = 1.0 / (tau + 1.0)
    return -(tau**g) / (1.0 - g) * ((1.0 - 1.0 / theta) * k / c1) ** (1.0 - g)


def pk_gumbel_rv_leading(tau: float, c1: float, theta: float, k: int) -> float:
    return math.exp(gumbel_rv_exponent(tau, c1, theta, k) - k * math.log(theta))


def rav_k_constant(tau: float, c1: float, theta: float) -> float:
    """K_{tau,c1,theta} = tau log(e c1^tau (1 - 1/theta) / tau)."""
    return tau * math.log(math.e * c1**tau * (1.0 - 1.0 / theta) / tau)


def pk_gumbel_rav_leading(tau: float, c1: float, theta: float, k: int) -> float:
    """Leading order of p_k for the rapidly-varying Gumbel sub-case (k >= 3)."""
    lk = math.log(k)
    kk = rav_k_constant(tau, c1, theta)
    bracket = 1.0 - tau * (tau - 1.0) * math.log(lk) / lk + kk / lk
    return math.exp(-((lk / c1) ** tau) * bracket - k * math.log(theta))


def pk_asymptotic(law: WeightLaw, k: int) -> float:
    """Large-k form of p_k chosen by the law's class.

    Atom laws use q0 (1 - 1/theta) theta^-k; beta weights use the exact
    closed form (the generic Weibull statement only gives slowly varying
    bounds); gamma-fraction weights use the sharp C k^(b/2+1/4) e^{-2 sqrt(...)}
    form.
    """
    k = _check_k(k)
    tag = law.mda()
    if isinstance(tag, Atom):
        # same expression as the atom contribution inside pk_quadrature
        return tag.q0 * _kernel(law.theta, 1.0, k, PK)
    if isinstance(tag, Weibull):
        if not isinstance(law, Beta):
            raise ValueError("sharp Weibull asymptotics are available for Beta weights only")
        return pk_beta_closed_form(law.alpha, law.beta, k)
    if isinstance(tag, GumbelRV):
        if not isinstance(law, GammaFraction):
            return pk_gumbel_rv_leading(tag.tau, tag.c1, law.theta, k)
        if k == 0:
            raise ValueError("gamma-fraction asymptotics need k >= 1")
        return pk_gamma_fraction_asymptotic(law.b, law.c1, k)
    raise ValueError(f"no asymptotic regime for {law!r}")


def pgeq_asymptotic(law: WeightLaw, k: int) -> float:
    k = _check_k(k)
    tag = law.mda()
    if isinstance(tag, Atom):
        return tag.q0 * _kernel(law.theta, 1.0, k, PGEQ)
    if isinstance(law, Beta):
        return pgeq_beta_closed_form(law.alpha, law.beta, k)
    if isinstance(law, GammaFraction):
        if k == 0:
            raise ValueError("gamma-fraction asymptotics need k >= 1")
        return pgeq_gamma_fraction_asymptotic(law.b, law.c1, k)
    raise ValueError(f"no asymptotic regime for {law!r}")


def pk_bounds(law: WeightLaw, k: int, xi: float) -> tuple[float, float]:
    """((theta+xi)^-k, theta^-k); the sandwich holds for k beyond a threshold."""
    if not xi > 0:
        raise ValueError(f"xi must be positive, got {xi}")
    theta = law.theta
    return (theta + xi) ** (-k), theta ** (-k)


def lower_bound_holds(law: WeightLaw, k: int, xi: float) -> bool:
    """(theta+xi)^-k <= p_k, compared on the theta^k scale."""
    theta = law.theta
    return k * math.log(theta / (theta + xi)) <= math.log(scaled_pk(law, k))


def lower_bound_threshold(law: WeightLaw, xi: float, k_max: int = 500, k_far: int = 20000) -> int:
    """Smallest K with the lower bound holding on every k in [K, k_max].

    When the bound still fails at ``k_max`` the search continues on a doubling
    grid up to ``k_far`` and the first k found where it holds is returned (the
    interval [K, k_max] is then empty).  Returns -1 if nothing is found.
    """
    if not lower_bound_holds(law, k_max, xi):
        k = k_max
        while k < k_far:
            k = min(2 * k, k_far)
            if lower_bound_holds(law, k, xi):
                lo, hi = k // 2, k
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if lower_bound_holds(law, mid, xi):
                        hi = mid
                    else:
                        lo = mid
                return hi
        return -1
    k = k_max
    while k > 0 and lower_bound_holds(law, k - 1, xi):
        k -= 1
    return k


def degree_tail(law: WeightLaw, k: int, method: str = "quadrature") -> DegreeTailValue:
    if method == "quadrature":
        return DegreeTailValue(k, pk_quadrature(law, k), pgeq_quadrature(law, k), method)
    if method == "closed_form":
        if not isinstance(law, Beta):
            raise ValueError("closed form is available for Beta weights only")
        return DegreeTailValue(
            k, pk_beta_closed_form(law.alpha, law.beta, k), pgeq_beta_closed_form(law.alpha, law.beta, k), method
        )
    if method == "asymptotic":
        return DegreeTailValue(k, pk_asymptotic(law, k), pgeq_asymptotic(law, k), method)
    raise ValueError(f"unknown method {method!r}")


TABLE_COLUMNS = ("k", "pk_quadrature", "pk_closed", "pk_asymptotic", "lower_bound", "upper_bound")


def degree_table(law: WeightLaw, ks, xi: float = 0.05) -> list[dict]:
    """Rows for the ``table`` CSV; unavailable entries are NaN."""
    rows = []
    for k in ks:
        closed = float("nan")
        if isinstance(law, Beta):
            closed = pk_beta_closed_form(law.alpha, law.beta, k)
        try:
            asym = pk_asymptotic(law, k)
        except ValueError:
            asym = float("nan")
        lo, hi = pk_bounds(law, k, xi)
        rows.append(
            {
                "k": k,
                "pk_quadrature": pk_quadrature(law, k),
                "pk_closed": closed,
                "pk_asymptotic": asym,
                "lower_bound": lo,
                "upper_bound": hi,
            }
        )
    return rows

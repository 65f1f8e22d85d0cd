"""Special functions used by the closed-form degree tails.

Only real arguments are supported.  ``gauss_2f1`` is a plain power series and
expects ``|z| < 1``; callers transform their arguments into that disc first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100_000


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms: int
    converged: bool


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def log_gamma_ratio(a: float, b: float) -> float:
    """ln(Gamma(a) / Gamma(b))."""
    return log_gamma(a) - log_gamma(b)


def gauss_2f1(a: float, b: float, c: float, z: float) -> SeriesResult:
    """Gauss hypergeometric series sum_j (a)_j (b)_j / ((c)_j j!) z^j."""
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"c must not be a non-positive integer, got {c}")
    if not abs(z) < 1:
        raise ValueError(f"series needs |z| < 1, got {z}")
    total = 1.0
    term = 1.0
    for j in range(SERIES_MAX_TERMS):
        term *= (a + j) * (b + j) / ((c + j) * (j + 1)) * z
        total += term
        if term == 0.0 or abs(term) < SERIES_RTOL * abs(total):
            return SeriesResult(total, j + 2, True)
    return SeriesResult(total, SERIES_MAX_TERMS + 1, False)


def _log_u_integrand(x, a, b, z):
    return (a - 1.0) * np.log(x) + (b - a - 1.0) * np.log1p(x) - z * x


def _u_mode(a, b, z):
    # stationary point of the log-integrand: z x^2 + (z + 2 - b) x - (a - 1) = 0
    if a <= 1.0:
        return 0.0
    p = z + 2.0 - b
    return (-p + math.sqrt(p * p + 4.0 * z * (a - 1.0))) / (2.0 * z)


def hyp_u(a: float, b: float, z: float, rtol: float = 1e-10) -> float:
    """Confluent hypergeometric U(a, b, z) from its integral representation.

    U(a,b,z) = 1/Gamma(a) * int_0^inf x^(a-1) (1+x)^(b-a-1) e^(-z x) dx, a > 0.
    The integrand is scaled by its peak value; the range is split at
    ``x0 = max(1, mode)`` and the tail mapped onto [0, 1) by x = x0 + t/(1-t).
    """
    if not a > 0:
        raise ValueError(f"hyp_u needs a > 0, got {a}")
    if not z > 0:
        raise ValueError(f"hyp_u needs z > 0, got {z}")
    mode = _u_mode(a, b, z)
    x0 = max(1.0, mode)
    if a <= 1.0:
        # integrable singularity x^(a-1) at 0 handled by an algebraic weight
        def smooth(x):
            return np.exp((b - a - 1.0) * np.log1p(x) - z * x)

        head, _ = integrate.quad(
            smooth, 0.0, x0, weight="alg", wvar=(a - 1.0, 0.0), epsabs=0.0, epsrel=rtol, limit=200
        )
        log_scale = 0.0
    else:
        log_scale = float(_log_u_integrand(mode, a, b, z))

        def scaled(x):
            return math.exp(_log_u_integrand(x, a, b, z) - log_scale) if x > 0 else 0.0

        points = [mode] if 0.0 < mode < x0 else None
        head, _ = integrate.quad(scaled, 0.0, x0, points=points, epsabs=0.0, epsrel=rtol, limit=200)

    def mapped(t):
        if t >= 1.0:
            return 0.0
        x = x0 + t / (1.0 - t)
        return math.exp(_log_u_integrand(x, a, b, z) - log_scale) / (1.0 - t) ** 2

    tail, _ = integrate.quad(mapped, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200)
    return math.exp(log_scale - math.lgamma(a)) * (head + tail)


def hyp_u_asymptotic(a: float, d: float, w: float) -> float:
    """Large-a form of U(a, d, w) through the Bessel-K expansion.

    Gamma(a) U(a, d, s^2) ~ 2 sqrt(pi / (2 u s)) exp(s^2/2 - u s) (2 s / u)^(1-d)
    with s = sqrt(w) and u = 2 sqrt(a - d/2); relative error O(1/u).
    """
    if not a > d / 2:
        raise ValueError("asymptotic form needs a > d/2")
    s = math.sqrt(w)
    u = 2.0 * math.sqrt(a - d / 2.0)
    log_val = (
        math.log(2.0)
        + 0.5 * math.log(math.pi / (2.0 * u * s))
        + s * s / 2.0
        - u * s
        + (1.0 - d) * math.log(2.0 * s / u)
    )
    return math.exp(log_val - math.lgamma(a))

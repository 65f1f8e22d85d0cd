import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from wrtlab.weights import (
    PRESETS,
    Atom,
    AtomMix,
    Beta,
    Constant,
    GammaFraction,
    GumbelRV,
    Weibull,
    law_from_dict,
    parse_law,
)

CATALOG = list(PRESETS.values())


def test_constant_one_always_one(rng):
    assert Constant(1.0).sample(rng) == 1.0
    assert np.all(Constant(1.0).sample(rng, 100) == 1.0)


def test_atom_mix_full_atom_is_rrt(rng):
    law = AtomMix(1.0)
    assert np.all(law.sample(rng, 1000) == 1.0)
    assert law.mean() == 1.0


@pytest.mark.parametrize(
    "law, expected",
    [(Constant(1.0), 1.0), (Beta(2, 3), 0.4), (AtomMix(0.5, Constant(0.5)), 0.75)],
)
def test_mean_closed_forms(law, expected):
    assert law.mean() == pytest.approx(expected, rel=1e-15)
    assert law.theta == pytest.approx(1 + expected)


def test_gamma_fraction_mean_two_schemes():
    law = GammaFraction(0.0, 1.0)
    # E W = int_0^1 P(W > x) dx, a different integrand from x f(x)
    alt, _ = integrate.quad(lambda x: math.exp(-x / (1 - x)) if x < 1 else 0.0, 0, 1, epsabs=0, epsrel=1e-13, limit=200)
    assert law.mean() == pytest.approx(alt, rel=1e-9)


@pytest.mark.slow
def test_gamma_fraction_sample_mean(rng):
    law = GammaFraction(0.0, 1.0)
    x = law.sample(rng, 10**6)
    se = x.std() / math.sqrt(x.size)
    assert abs(x.mean() - law.mean()) <= 3 * se


@pytest.mark.parametrize(
    "law, x, expected",
    [
        (GammaFraction(0.0, 1.0), 0.5, math.exp(-1.0)),
        (AtomMix(0.5, Constant(0.5)), 0.9, 0.5),
        (Beta(0.5, 0.5), 0.0, 1.0),
    ],
)
def test_tail_examples(law, x, expected):
    assert law.tail(x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x", [-0.1, 1.0, 1.5])
def test_tail_domain(x):
    with pytest.raises(ValueError):
        Beta(2, 3).tail(x)


@pytest.mark.parametrize(
    "law, tag",
    [
        (Constant(1.0), Atom(1.0)),
        (AtomMix(0.5, Beta(2, 3)), Atom(0.5)),
        (Beta(2, 3), Weibull(3.0)),
        (GammaFraction(1.0, 0.5), GumbelRV(1.0, 0.5, 1.0)),
    ],
)
def test_mda(law, tag):
    assert law.mda() == tag


def test_constant_below_one_has_no_mda():
    with pytest.raises(ValueError):
        Constant(0.5).mda()


def test_gamma_fraction_rejects_negative_density():
    with pytest.raises(ValueError):
        GammaFraction(b=2.5, c1=1.0)
    GammaFraction(b=1.0, c1=1.0)


@pytest.mark.parametrize("bad", [dict(q0=0.0), dict(q0=0.5), dict(q0=0.5, base=Constant(1.0))])
def test_atom_mix_validation(bad):
    with pytest.raises(ValueError):
        AtomMix(**bad)


@pytest.mark.parametrize("law", CATALOG, ids=list(PRESETS))
def test_tail_shape(law):
    grid = np.linspace(0.0, 1.0 - 1e-3, 1000)
    t = law.tail(grid)
    assert law.tail(0.0) == pytest.approx(1.0, abs=1e-15) or isinstance(law, Constant)
    assert np.all(np.diff(t) <= 1e-15)
    assert law.tail(1 - 1e-12) == pytest.approx(law.atom_at_one, abs=1e-6)
    assert 1.0 < law.theta <= 2.0


@pytest.mark.slow
@pytest.mark.parametrize("law", CATALOG, ids=list(PRESETS))
def test_sampling_matches_tail_at_deciles(law, rng):
    x = law.sample(rng, 10**6)
    for q in np.linspace(0.1, 0.9, 9):
        p = law.tail(q)
        emp = np.mean(x > q)
        se = math.sqrt(max(p * (1 - p), 1e-12) / x.size)
        assert abs(emp - p) <= 4 * se + 1e-12


@given(st.floats(0.1, 5), st.floats(0.1, 5))
def test_beta_json_roundtrip(a, b):
    law = Beta(a, b)
    assert law_from_dict(law.to_dict()) == law
    assert parse_law(law.to_json()) == law


@given(st.floats(0.0, 1.0), st.floats(0.2, 3.0), st.floats(1e-6, 1 - 1e-6))
def test_gamma_fraction_inverse_tail(b, c1, u):
    if b * c1 > 1:
        return
    law = GammaFraction(b, c1)
    x = law.inverse_tail(u)
    # bisection bracket width after 60 halvings
    assert abs(law.log_tail(x) - math.log(u)) < 1e-6 or x > 1 - 1e-12


def test_parse_law_presets_and_errors():
    assert parse_law("rrt") == Constant(1.0)
    assert parse_law('{"kind":"atom_mix","q0":0.5,"base":{"kind":"constant","value":0.5}}') == PRESETS["atom-gap"]
    with pytest.raises(ValueError):
        parse_law("nonsense")
    with pytest.raises(ValueError):
        parse_law('{"kind":"cauchy"}')

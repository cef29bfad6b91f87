import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xdslope import catalog
from xdslope.errors import DivergentIntegral, InvalidSlope, NotMonotone, RateOutOfDomain
from xdslope.slope import (SignClass, SlopeFunction, Verdict, hazard_interval_integral,
                           reconstruct_from_slope, slope_function_of, validate_slope)
from xdslope.survival import Interval

from conftest import catalog_specs, location_match, spec_id, sup_rel

INF = math.inf


def sf(fn, lo, hi):
    return SlopeFunction(fn, Interval(lo, hi))


def test_sign_class_inferred_and_checked():
    assert sf(lambda m: m ** 2, 1, INF).sign_class is SignClass.POSITIVE
    assert sf(lambda m: -m ** 2, 0, 1).sign_class is SignClass.NEGATIVE
    with pytest.raises(InvalidSlope):
        sf(lambda m: m - 1, 0, 2)
    with pytest.raises(InvalidSlope):
        SlopeFunction(lambda m: m, Interval(0, 1), SignClass.NEGATIVE)


def test_slope_function_of_examples():
    u = slope_function_of(catalog.get_family("uniform").model)
    assert (u.domain.lower, u.domain.upper) == (1.0, INF)
    mus = np.linspace(1.1, 30, 40)
    assert np.allclose(u(mus), mus ** 2, rtol=1e-12)
    n = slope_function_of(catalog.get_family("neg_exponential").model)
    mus = np.linspace(0.01, 30, 40)
    assert np.allclose(n(mus), mus * (1 + mus), rtol=1e-10)
    with pytest.raises(NotMonotone):
        slope_function_of(catalog.get_family("burr", alpha=2.0).model)


def test_hazard_interval_integral_examples():
    assert hazard_interval_integral(sf(lambda m: m ** 2, 1, INF), 1.0, math.e) == pytest.approx(1.0, abs=1e-12)
    assert hazard_interval_integral(sf(lambda m: 1 + 0 * m, 0, INF), 0.0, 3.0) == pytest.approx(4.5, abs=1e-12)
    assert hazard_interval_integral(sf(lambda m: m, 0, INF), 0.0, 2.5) == pytest.approx(2.5, abs=1e-12)
    with pytest.raises(DivergentIntegral):
        hazard_interval_integral(sf(lambda m: m ** 2, 0, INF), 0.0, 1.0)
    with pytest.raises(RateOutOfDomain):
        hazard_interval_integral(sf(lambda m: m ** 2, 1, INF), 0.5, 2.0)


@pytest.mark.parametrize("spec", catalog_specs(), ids=spec_id)
def test_substitution_identity(spec):
    m = spec.model
    v = slope_function_of(m)
    ys = m.support.compact(inset=0.2, reach=2.0).grid(4)
    for c, d in ((ys[0], ys[1]), (ys[1], ys[3])):
        lhs = float(m.integrated_hazard(d)) - float(m.integrated_hazard(c))
        rhs = hazard_interval_integral(v, float(m.hazard(c)), float(m.hazard(d)))
        assert rhs == pytest.approx(lhs, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("fn,lo,hi,verdict", [
    (lambda m: m ** 2, 0, INF, Verdict.INVALID),
    (lambda m: -m ** 2, 0, INF, Verdict.INVALID),
    (lambda m: m ** 2, 1, INF, Verdict.VALID_PROPER),
    (lambda m: -m ** 2, 0, 1, Verdict.VALID_PROPER),
    (lambda m: -np.exp(m), 0, INF, Verdict.VALID_RIGHT_CENSORED),
    (lambda m: np.exp(-m), 0, INF, Verdict.VALID_PROPER),
    (lambda m: 1 + 0 * m, 0, INF, Verdict.VALID_PROPER),
])
def test_validate_slope(fn, lo, hi, verdict):
    d = validate_slope(sf(fn, lo, hi))
    assert d.verdict is verdict
    assert d.continuity_at_a == (verdict is not Verdict.INVALID)


def test_validate_slope_integral_values():
    d = validate_slope(sf(lambda m: -np.exp(m), 0, INF))
    # integral of mu e^{-mu} over (0, inf) split at the reference point 1
    assert d.left_integral + d.right_integral == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("spec", catalog_specs(), ids=spec_id)
def test_diagnosis_matches_censoring(spec):
    d = validate_slope(slope_function_of(spec.model))
    assert d.verdict is not Verdict.INVALID
    assert (d.verdict is Verdict.VALID_RIGHT_CENSORED) == (spec.model.censor_mass > 0)


@pytest.mark.parametrize("spec", catalog_specs(), ids=spec_id)
def test_round_trip_location_identity(spec):
    v = slope_function_of(spec.model)
    mu0 = v.domain.interior_point()
    gen = reconstruct_from_slope(v, mu0).generator
    assert float(gen.hazard(0.0)) == pytest.approx(mu0, rel=1e-12)
    assert location_match(gen, spec.model) < 1e-6
    assert gen.censor_mass == pytest.approx(spec.model.censor_mass, rel=1e-8, abs=1e-300)


@pytest.mark.parametrize("fn,lo,hi", [
    (lambda m: 1 + 0 * m, 0, INF), (lambda m: m, 0, INF), (lambda m: m * (1 - m), 0, 1),
    (lambda m: m * (1 + m), 0, INF), (lambda m: 1 + m ** 2, 0, INF),
    (lambda m: np.exp(-m), 0, INF), (lambda m: -np.exp(m), 0, INF),
])
def test_round_trip_from_slope(fn, lo, hi):
    v = sf(fn, lo, hi)
    gen = reconstruct_from_slope(v, v.domain.interior_point()).generator
    ys = gen.support.compact(inset=0.1, reach=3.0).grid(40)
    # second route: difference quotient of the reconstructed hazard
    hs = np.asarray(gen.hazard(ys))
    step = 1e-5
    fd = (np.asarray(gen.hazard(ys + step)) - np.asarray(gen.hazard(ys - step))) / (2 * step)
    assert sup_rel(fd, fn(hs)) < 1e-6


@pytest.mark.parametrize("fn,lo,hi,mu0,name,support", [
    (lambda m: 1 + 0 * m, 0, INF, 1.0, "rayleigh", (-1.0, INF)),
    (lambda m: m, 0, INF, 1.0, "gumbel", (-INF, INF)),
    (lambda m: np.exp(-m), 0, INF, math.log(2), "exp_slope_ifr", (-1.0, INF)),
    (lambda m: -np.exp(m), 0, INF, 1.0, "exp_slope_dfr", (-math.exp(-1), 1 - math.exp(-1))),
    (lambda m: (1 + m) ** 2, 0, INF, 1.0, "uniform_no_exp", (-0.5, 0.5)),
    (lambda m: m * np.sqrt(m ** 2 + 4 * m), 0, INF, 1.0, "negative_pareto", (-INF, 0.5 * (math.sqrt(5) - 1))),
])
def test_reconstruction_matches_catalog(fn, lo, hi, mu0, name, support):
    gen = reconstruct_from_slope(sf(fn, lo, hi), mu0).generator
    ref = catalog.get_family(name).model
    assert location_match(gen, ref) < 1e-6
    assert gen.support.lower == pytest.approx(support[0], abs=1e-9)
    assert gen.support.upper == pytest.approx(support[1], abs=1e-9)
    assert gen.censor_mass == pytest.approx(ref.censor_mass, abs=1e-12)


def test_reconstruct_rejects_invalid():
    with pytest.raises(InvalidSlope):
        reconstruct_from_slope(sf(lambda m: m ** 2, 0, INF), 1.0)
    with pytest.raises(RateOutOfDomain):
        reconstruct_from_slope(sf(lambda m: m, 0, INF), -1.0)


def test_rayleigh_reconstruction_pinned():
    gen = reconstruct_from_slope(sf(lambda m: 1 + 0 * m, 0, INF), 1.0).generator
    ys = np.array([-0.5, 0.0, 0.5, 2.0])
    assert np.allclose(gen.hazard(ys), ys + 1.0, atol=1e-12)
    assert np.allclose(gen.integrated_hazard(ys), 0.5 * (ys + 1.0) ** 2, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(k=st.floats(0.2, 5.0), mu_c=st.floats(0.1, 5.0), width=st.floats(0.1, 5.0))
def test_linear_slope_interval_integral(k, mu_c, width):
    # v = k mu gives H(d) - H(c) = (mu_d - mu_c) / k
    v = sf(lambda m: k * m, 0, INF)
    assert hazard_interval_integral(v, mu_c, mu_c + width) == pytest.approx(width / k, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.3, 3.0), mu0=st.floats(0.3, 3.0))
def test_constant_slope_reconstruction_property(c, mu0):
    # v = c gives h(y) = mu0 + c y
    gen = reconstruct_from_slope(sf(lambda m: c + 0 * m, 0, INF), mu0).generator
    assert gen.support.lower == pytest.approx(-mu0 / c, rel=1e-9)
    assert float(gen.hazard(0.25)) == pytest.approx(mu0 + 0.25 * c, rel=1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xdslope import catalog
from xdslope.errors import (DomainNotFull, DomainTooSmall, DomainViolation, NegativityViolation,
                            NotCensored, OutOfSupport, RateOutOfDomain, UnboundedSupport)
from xdslope.slope import SlopeFunction, slope_function_of
from xdslope.survival import HazardLocationFamily, Interval, MonotoneClass, exponential_model
from xdslope.transforms import (add_exponential_component, censor_right, hl_member,
                                location_scale_slope, reflect_horizontal, reflect_vertical,
                                shift_transform, truncate_left)
from xdslope.xd import xd_make

from conftest import catalog_specs, spec_id, sup_rel

INF = math.inf


def fam(name, **kw):
    return catalog.get_family(name, **kw).model


def slope_on(model, mus):
    return np.asarray(slope_function_of(model)(mus))


def test_hl_member_examples():
    g = HazardLocationFamily(fam("gumbel"))
    m1 = hl_member(g, 1.0)
    ys = np.linspace(-2, 1, 7)
    assert np.allclose(m1.survival(ys), np.exp(-np.exp(ys)), rtol=1e-14)
    me = hl_member(g, math.e)
    assert np.allclose(me.survival(ys), np.exp(-np.exp(ys + 1)), rtol=1e-13)
    assert float(me.hazard_derivative(0.0)) == pytest.approx(math.e)
    p = hl_member(HazardLocationFamily(fam("pareto")), 0.5)
    assert p.support.lower == pytest.approx(-1.0)
    assert float(p.hazard(0.0)) == pytest.approx(0.5)
    assert float(p.hazard_derivative(0.0)) == pytest.approx(-0.25)
    with pytest.raises(RateOutOfDomain):
        hl_member(HazardLocationFamily(fam("logistic")), 1.5)


@pytest.mark.parametrize("spec", [s for s in catalog_specs() if s.name != "exp_slope_dfr"], ids=spec_id)
def test_member_rate_equals_index(spec):
    f = HazardLocationFamily(spec.model)
    for mu in f.rate_domain.compact().grid(5):
        assert float(hl_member(f, mu).hazard(0.0)) == pytest.approx(mu, rel=1e-10)


def test_truncate_examples():
    t = truncate_left(fam("gumbel"), 0.0)
    assert (t.rate_domain.lower, t.rate_domain.upper) == (1.0, INF)
    e = truncate_left(exponential_model(2.0), 3.0)
    ys = np.linspace(3.1, 6, 5)
    assert np.allclose(e.survival(ys), np.exp(-2.0 * (ys - 3.0)), rtol=1e-13)
    p = truncate_left(fam("pareto"), 2.0)
    assert (p.rate_domain.lower, p.rate_domain.upper) == (0.0, 0.5)
    with pytest.raises(OutOfSupport):
        truncate_left(fam("uniform"), 1.5)


def test_censor_examples():
    r = censor_right(fam("rayleigh"), 1.0)
    assert (r.rate_domain.lower, r.rate_domain.upper) == (0.0, 1.0)
    assert r.censor_mass == pytest.approx(math.exp(-0.5), rel=1e-15)
    b = censor_right(fam("burr", alpha=2.0), 0.1)
    assert b.monotone_class is MonotoneClass.IFR
    assert slope_function_of(b).domain.upper == pytest.approx(0.2 / 1.01)
    near = censor_right(fam("gumbel"), 4.0)
    assert near.censor_mass == pytest.approx(math.exp(-math.exp(4.0)))
    with pytest.raises(OutOfSupport):
        censor_right(fam("uniform"), 1.0)


@settings(max_examples=30, deadline=None)
@given(idx=st.integers(0, len(catalog_specs()) - 1), frac=st.floats(0.2, 0.8))
def test_restriction_maps_slope_domain(idx, frac):
    spec = catalog_specs()[idx]
    m = spec.model
    ys = m.support.compact(inset=0.1, reach=3.0)
    c = ys.lower + frac * (ys.upper - ys.lower)
    hc = float(m.hazard(c))
    v = slope_function_of(m)
    for restricted in (truncate_left(m, c), censor_right(m, c)):
        w = slope_function_of(restricted)
        assert hc in (w.domain.lower, w.domain.upper)
        assert v.domain.contains_closed(w.domain.lower) and v.domain.contains_closed(w.domain.upper)
        mus = w.domain.compact(inset=0.1, reach=3.0).grid(20)
        assert sup_rel(w(mus), v(mus)) < 1e-8


def test_reflect_horizontal():
    d = fam("exp_slope_dfr")
    r = reflect_horizontal(d)
    assert (r.support.lower, r.support.upper) == (-1.0, 0.0)
    assert r.monotone_class is MonotoneClass.IFR
    mus = np.linspace(0.2, 5, 20)
    assert sup_rel(slope_on(r, mus), np.exp(mus)) < 1e-8
    back = reflect_horizontal(r)
    ys = np.linspace(0.05, 0.95, 19)
    assert np.allclose(back.survival(ys), d.survival(ys), rtol=1e-10)
    with pytest.raises(NotCensored):
        reflect_horizontal(fam("gumbel"))


def test_reflect_horizontal_gompertz_makeham():
    # censored Gompertz-Makeham reflected: hazard m + e^{-y}, slope m - mu
    m = 0.4
    r = reflect_horizontal(censor_right(fam("gompertz_makeham", m=m), 1.0))
    assert r.monotone_class is MonotoneClass.DFR
    ys = np.linspace(-0.9, -0.1, 9)
    assert np.allclose(r.hazard(ys), m + np.exp(-ys), rtol=1e-13)
    mus = np.linspace(1.5, 3.0, 10)
    assert sup_rel(slope_on(r, mus), m - mus) < 1e-8


@pytest.mark.parametrize("base,level,row", [("gumbel", 1.0, "reflected_gumbel"),
                                            ("logistic", 0.5, "reflected_logistic"),
                                            ("neg_exponential", 1.0, "reflected_neg_exponential")])
def test_reflect_vertical_reproduces_reflected_rows(base, level, row):
    r = reflect_vertical(fam(base), level)
    ref = fam(row)
    assert r.support.lower == pytest.approx(ref.support.lower, abs=1e-15)
    assert r.support.upper == ref.support.upper
    ys = ref.support.compact(reach=5.0).grid(60)
    assert np.max(np.abs(r.survival(ys) - ref.survival(ys))) < 1e-10
    mus = np.linspace(0.01, level * 0.99, 40)
    assert sup_rel(slope_on(r, mus), slope_on(fam(base), level - mus)) < 1e-8
    assert sup_rel(slope_on(r, mus), slope_on(ref, mus)) < 1e-8


def test_reflect_vertical_errors():
    with pytest.raises(DomainTooSmall):
        reflect_vertical(fam("uniform"), 2.0)
    with pytest.raises(DomainTooSmall):
        reflect_vertical(fam("logistic"), 2.0)


def test_add_exponential_component_examples():
    u = add_exponential_component(fam("uniform"), -1.0)
    ys = np.linspace(0.05, 0.95, 19)
    assert np.allclose(u.survival(ys), np.exp(ys) * (1 - ys), rtol=1e-13)
    assert (u.rate_domain.lower, u.rate_domain.upper) == (0.0, INF)
    mus = np.linspace(0.1, 20, 30)
    assert sup_rel(slope_on(u, mus), (1 + mus) ** 2) < 1e-8
    m = 0.7
    gm = add_exponential_component(truncate_left(fam("gumbel"), 0.0), m)
    ys = np.linspace(0.1, 3, 9)
    assert np.allclose(gm.hazard(ys), m + np.exp(ys), rtol=1e-14)
    assert gm.rate_domain.lower == pytest.approx(1 + m)
    mus = np.linspace(1.8, 10, 10)
    assert sup_rel(slope_on(gm, mus), mus - m) < 1e-8
    g = fam("rayleigh")
    assert add_exponential_component(g, 0.0) is g
    with pytest.raises(UnboundedSupport):
        add_exponential_component(fam("gumbel"), 1.0)
    with pytest.raises(NegativityViolation):
        add_exponential_component(fam("uniform"), -1.5)


@settings(max_examples=30, deadline=None)
@given(idx=st.integers(0, len(catalog_specs()) - 1), m=st.floats(0.05, 3.0))
def test_add_then_remove_is_identity(idx, m):
    spec = catalog_specs()[idx]
    g = spec.model
    if not math.isfinite(g.a):
        g = truncate_left(g, g.support.compact().lower)
    back = add_exponential_component(add_exponential_component(g, m), -m)
    ys = g.support.compact(inset=0.1, reach=3.0).grid(20)
    assert np.max(np.abs(np.asarray(back.integrated_hazard(ys)) - np.asarray(g.integrated_hazard(ys)))) < 1e-10
    mus = (m + slope_function_of(g).domain.compact(inset=0.1, reach=3.0).grid(10))
    added = add_exponential_component(g, m)
    assert sup_rel(slope_on(added, mus), slope_on(g, mus - m)) < 1e-8


def test_location_scale_slope():
    v = SlopeFunction(lambda mu: mu ** 1.5, Interval(0, INF))
    ident = location_scale_slope(v, 0.0, 1.0, 1.0)
    mus = np.linspace(0.1, 5, 10)
    assert np.allclose(ident(mus), v(mus))
    c = 3.0
    w = location_scale_slope(v, 0.0, 1 / c, c ** -2)
    assert np.allclose(w(mus), c ** (1.5 - 2) * mus ** 1.5, rtol=1e-14)
    shifted = location_scale_slope(v, 2.0, 1.0, 1.0)
    assert shifted.domain.lower == 2.0
    with pytest.raises(DomainViolation):
        location_scale_slope(v, -1.0, 1.0, 1.0)


@pytest.mark.parametrize("name,beta", [("rayleigh", 0.0), ("exp_slope_ifr", -1.0),
                                       ("exp_slope_dfr", 1.0)])
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 5.0])
def test_shift_fixed_points(name, beta, m):
    x = xd_make(fam(name), 1.0, 1.0)
    s = shift_transform(x, m).with_params(lam=math.exp(beta * m))
    mus = np.linspace(0.05, 8, 40)
    # the rescaled index absorbs the factor e^{beta m}: v_m / lam' equals v / lam
    lhs = np.asarray(s.unit_slope(mus)) / s.lam
    rhs = np.asarray(x.unit_slope(mus)) / x.lam
    assert sup_rel(lhs, rhs) < 1e-8


def test_shift_gumbel_not_fixed():
    x = xd_make(fam("gumbel"), 1.0, 1.0)
    s = shift_transform(x, 1.0)
    mus = np.linspace(0.1, 5, 20)
    assert sup_rel(s.unit_slope(mus), 1 + mus) < 1e-8
    # no single multiple c * mu matches 1 + mu
    ratio = np.asarray(s.unit_slope(mus)) / mus
    assert ratio.max() - ratio.min() > 1.0


def test_shift_needs_full_domain():
    with pytest.raises(DomainNotFull):
        shift_transform(xd_make(fam("logistic"), 0.5, 1.0), 0.1)

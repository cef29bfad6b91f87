import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xdslope.errors import ExpressionError
from xdslope.expr import parse_endpoint, parse_slope_expression


@pytest.mark.parametrize("text,fn", [
    ("mu^2", lambda m: m ** 2),
    ("mu**2", lambda m: m ** 2),
    ("-mu^2", lambda m: -m ** 2),
    ("1", lambda m: 1 + 0 * m),
    ("mu*(1-mu)", lambda m: m * (1 - m)),
    ("exp(-mu)", lambda m: np.exp(-m)),
    ("-exp(mu)*(1+exp(-mu))", lambda m: -np.exp(m) * (1 + np.exp(-m))),
    ("mu*sqrt(mu^2+4*mu)", lambda m: m * np.sqrt(m ** 2 + 4 * m)),
    ("log(1+mu)/pi + e", lambda m: np.log1p(m) / math.pi + math.e),
    ("abs(mu - 2)", lambda m: np.abs(m - 2)),
    ("μ^3", lambda m: m ** 3),
])
def test_expressions(text, fn):
    f = parse_slope_expression(text)
    mus = np.linspace(0.1, 3, 13)
    assert np.allclose(f(mus), fn(mus), rtol=1e-15)
    assert isinstance(f(1.5), float)
    assert f(mus).shape == mus.shape


@pytest.mark.parametrize("text", ["", "   ", "__import__('os')", "mu.real", "x + 1", "mu[0]",
                                  "exp(mu, 2)", "lambda: 1", "mu if mu else 1", "'a'", "True",
                                  "mu +"])
def test_rejected(text):
    with pytest.raises(ExpressionError):
        parse_slope_expression(text)


def test_endpoints():
    assert parse_endpoint("inf") == math.inf
    assert parse_endpoint("-inf") == -math.inf
    assert parse_endpoint("0.5") == 0.5
    with pytest.raises(ExpressionError):
        parse_endpoint("abc")


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(0.1, 5), mu=st.floats(0.01, 20))
def test_polynomial_property(a, b, mu):
    f = parse_slope_expression(f"({a!r}) + ({b!r})*mu^2")
    assert f(mu) == pytest.approx(a + b * mu ** 2, rel=1e-12, abs=1e-12)

"""Extreme dispersion models ``XD(mu, lambda)``.

Given a generator ``G`` with monotone hazard ``h``, ``XD(mu, lambda)`` has
survival ``G^lambda(y/lambda + h^{-1}(mu))``. The rate at 0 is ``mu`` for every
``lambda`` and the scaled minimum of ``n`` copies is ``XD(mu, n*lambda)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ._numerics import integrate
from .errors import (DomainError, InvalidVarianceFunction, NonpositiveSlope, NotMonotone,
                     OutOfSupport, RateOutOfDomain)
from .slope import SlopeFunction, reconstruct_from_slope, slope_function_of
from .survival import Interval, MonotoneClass, SurvivalModel

__all__ = ["XDModel", "xd_make", "scaled_min", "conditional_tail", "rayleigh_limit_curve",
           "FrailtyLink", "frailty_generator", "frailty_xd"]


@dataclass(frozen=True, eq=False)
class XDModel:
    """An extreme dispersion model; evaluation delegates to :attr:`model`."""

    generator: SurvivalModel
    mu: float
    lam: float
    model: SurvivalModel

    @cached_property
    def unit_slope(self) -> SlopeFunction:
        return slope_function_of(self.generator)

    @property
    def dispersion(self) -> float:
        return 1.0 / self.lam

    @property
    def support(self) -> Interval:
        return self.model.support

    @property
    def censor_mass(self) -> float:
        return self.model.censor_mass

    def survival(self, y):
        return self.model.survival(y)

    def integrated_hazard(self, y):
        return self.model.integrated_hazard(y)

    def hazard(self, y):
        return self.model.hazard(y)

    def hazard_derivative(self, y):
        return self.model.hazard_derivative(y)

    def with_params(self, mu: Optional[float] = None, lam: Optional[float] = None) -> "XDModel":
        return xd_make(self.generator, self.mu if mu is None else mu,
                       self.lam if lam is None else lam)


def xd_make(generator: SurvivalModel, mu: float, lam: float) -> XDModel:
    """Build ``XD(mu, lam)`` from ``generator``.

    Hazard ``h(y/lam + theta)`` with ``theta = h^{-1}(mu)`` on the support
    ``lam * (C - theta)``; mass ``G(b)^lam`` at the right extreme. Generators
    carrying an ``xd_builder`` (the GEV family) build the model in closed form.
    """
    g = generator
    if not g.is_monotone:
        raise NotMonotone("XD models need a generator with monotone hazard")
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"index parameter must be positive, got {lam}")
    if not g.rate_domain.contains(mu):
        raise RateOutOfDomain(f"rate {mu} outside {g.rate_domain}")
    mu, lam = float(mu), float(lam)
    if g.xd_builder is not None:
        return XDModel(g, mu, lam, g.xd_builder(mu, lam))
    theta = float(g.inverse_hazard(mu))
    x = lambda y: y / lam + theta
    model = SurvivalModel(
        Interval(lam * (g.a - theta), lam * (g.b - theta)),
        lambda y: lam * g.H_fn(x(y)),
        lambda y: g.h_fn(x(y)),
        (lambda y: g.dh_fn(x(y)) / lam) if g.dh_fn is not None else None,
        (lambda y: g.G_fn(x(y)) ** lam) if g.G_fn is not None else None,
        (lambda m: lam * (g.hinv_fn(m) - theta)) if g.hinv_fn is not None else None,
        g.rate_domain,
        tuple((lambda y, f=f, k=k: f(x(y)) / lam ** (k + 2)) for k, f in enumerate(g.higher)),
        g.censor_mass ** lam if g.censor_mass > 0 else 0.0,
        g.monotone_class,
        f"XD[{g.name}]({mu:g},{lam:g})",
    )
    return XDModel(g, mu, lam, model)


def scaled_min(xd: XDModel, n: int) -> XDModel:
    """Law of ``n * min(Y_1..Y_n)``: ``XD(mu, n*lambda)``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return xd_make(xd.generator, xd.mu, n * xd.lam)


def conditional_tail(xd, c: float) -> SurvivalModel:
    """Law of ``Y - c`` given ``Y > c``: survival ``S(c + y)/S(c)`` for ``y > 0``."""
    m = xd.model if isinstance(xd, XDModel) else xd
    if not m.support.contains(c):
        raise OutOfSupport(f"{c} outside {m.support}")
    Hc = float(m.integrated_hazard(c))
    cm = math.exp(Hc - m.H_at_b) if m.censor_mass > 0 else 0.0
    return SurvivalModel(
        Interval(0.0, m.b - c),
        lambda y: m.H_fn(c + y) - Hc,
        lambda y: m.h_fn(c + y),
        (lambda y: m.dh_fn(c + y)) if m.dh_fn is not None else None,
        censor_mass=cm,
        monotone_class=m.monotone_class if m.is_monotone else MonotoneClass.NONE,
        name=f"{m.name}|>{c:g}",
    )


def rayleigh_limit_curve(generator: SurvivalModel, n: int, y_grid: Sequence[float]) -> np.ndarray:
    """``G^n(y/sqrt n)/G^n(0) * exp(y mu sqrt n)``, which tends to ``exp(-s y^2/2)``."""
    g = generator
    if not g.support.contains(0.0):
        raise DomainError("0 must lie in the support")
    mu = float(g.hazard(0.0))
    s = float(g.hazard_derivative(0.0))
    if not s > 0:
        raise NonpositiveSlope(f"slope at 0 is {s}; the Rayleigh limit needs a positive slope")
    y = np.asarray(y_grid, dtype=float)
    rn = math.sqrt(n)
    H0 = float(g.integrated_hazard(0.0))
    dH = np.asarray(g.integrated_hazard(y / rn)) - H0
    return np.exp(-n * dH + y * mu * rn)


@dataclass(frozen=True, eq=False)
class FrailtyLink:
    """Variance function ``V`` on ``Omega`` of the frailty's exponential family.

    ``pin`` fixes the mean mapping by ``tau(0) = pin``; by default the midpoint
    of ``Omega`` (or one unit inside an unbounded ``Omega``).
    """

    variance_function: Callable
    vf_domain: Interval
    pin: Optional[float] = None

    def __post_init__(self):
        om = self.vf_domain
        if self.pin is None:
            if om.bounded:
                pin = 0.5 * (om.lower + om.upper)
            elif math.isfinite(om.lower):
                pin = om.lower + 1.0
            else:
                pin = om.upper - 1.0 if math.isfinite(om.upper) else 1.0
            object.__setattr__(self, "pin", pin)
        if not om.contains(self.pin):
            raise InvalidVarianceFunction(f"pin {self.pin} outside {om}")
        vals = np.asarray(self.variance_function(om.grid(257)), dtype=float)
        if not np.all(np.isfinite(vals) & (vals > 0)):
            raise InvalidVarianceFunction("variance function must be strictly positive on its domain")

    def inverse_mean_mapping(self, mu: float) -> float:
        """``tau^{-1}(mu) = int_pin^mu 1/V``."""
        return integrate(lambda m: 1.0 / self.variance_function(m), self.pin, mu)

    def mean_mapping(self, theta: float) -> float:
        om = self.vf_domain
        lo = om.lower if math.isfinite(om.lower) else -1e300
        hi = om.upper if math.isfinite(om.upper) else 1e300
        lo_b, hi_b = self.pin, self.pin
        step = max(1.0, abs(self.pin))
        f = lambda m: self.inverse_mean_mapping(m) - theta
        while f(lo_b) > 0:
            lo_b = max(lo_b - step, 0.5 * (lo_b + lo)) if math.isfinite(om.lower) else lo_b - step
            step *= 2
        step = max(1.0, abs(self.pin))
        while f(hi_b) < 0:
            hi_b = min(hi_b + step, 0.5 * (hi_b + hi)) if math.isfinite(om.upper) else hi_b + step
            step *= 2
        return brentq(f, lo_b, hi_b, xtol=1e-15, rtol=1e-15)


def frailty_generator(link: FrailtyLink) -> SurvivalModel:
    """Generator with hazard ``h(y) = tau(-y)`` on ``y > 0``; slope ``-V`` (DFR)."""
    from .survival import translate

    V = link.variance_function
    v = SlopeFunction(lambda m: -V(m), Interval(link.vf_domain.lower, link.pin), label="-V")
    fam = reconstruct_from_slope(v, v.domain.interior_point() if v.domain.bounded
                                 else link.pin - 0.5 * max(1.0, abs(link.pin)))
    gen = fam.generator
    return translate(gen, -gen.a).with_(name="frailty")


def frailty_xd(link: FrailtyLink, mu: float, lam: float) -> XDModel:
    return xd_make(frailty_generator(link), mu, lam)

"""Slope functions ``v = h' o h^{-1}`` and the reconstruction of a family from ``v``."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from ._numerics import improper_integral, integrate
from .errors import (DivergentIntegral, DomainError, IntegrationFailure, InvalidSlope,
                     NotMonotone, RateOutOfDomain)
from .survival import HazardLocationFamily, Interval, MonotoneClass, SurvivalModel


class SignClass(str, enum.Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"

    @property
    def monotone_class(self) -> MonotoneClass:
        return MonotoneClass.IFR if self is SignClass.POSITIVE else MonotoneClass.DFR


class Verdict(str, enum.Enum):
    VALID_PROPER = "VALID_PROPER"
    VALID_RIGHT_CENSORED = "VALID_RIGHT_CENSORED"
    INVALID = "INVALID"


def _sign_of(vals: np.ndarray) -> "SignClass":
    """Common sign of grid values; zeros are allowed only in runs touching the grid ends
    (underflow next to an endpoint), not between nonzero values."""
    nz = np.flatnonzero(vals != 0)
    if nz.size == 0 or np.any(vals[nz[0]:nz[-1] + 1] == 0):
        raise InvalidSlope("slope function vanishes inside its domain")
    if np.all(vals[nz] > 0):
        return SignClass.POSITIVE
    if np.all(vals[nz] < 0):
        return SignClass.NEGATIVE
    raise InvalidSlope("slope function changes sign inside its domain")


@dataclass(frozen=True, eq=False)
class SlopeFunction:
    """A slope function ``v`` on a rate domain inside ``(0, inf)``.

    ``v`` must accept numpy arrays. The sign class is inferred from a grid
    when not given; a sign change or zero on the grid is rejected.
    """

    v: Callable
    domain: Interval
    sign_class: Optional[SignClass] = None
    label: str = ""

    def __post_init__(self):
        if self.domain.lower < 0:
            raise InvalidSlope(f"rate domain {self.domain} must lie in (0, inf)")
        with np.errstate(all="ignore"):
            vals = np.asarray(self.v(self.domain.grid(257)), dtype=float)
        # overflow to +-inf far out is tolerated; NaN is not
        if np.any(np.isnan(vals)):
            raise InvalidSlope("slope function is undefined on part of its domain")
        found = _sign_of(vals)
        if self.sign_class is not None and SignClass(self.sign_class) is not found:
            raise InvalidSlope(f"declared sign {self.sign_class} but values are {found.value}")
        object.__setattr__(self, "sign_class", found)

    def __call__(self, mu):
        return self.v(mu)

    @property
    def ifr(self) -> bool:
        return self.sign_class is SignClass.POSITIVE

    @property
    def a_side(self) -> float:
        """Rate-domain endpoint corresponding to the left end of the support."""
        return self.domain.lower if self.ifr else self.domain.upper

    @property
    def b_side(self) -> float:
        return self.domain.upper if self.ifr else self.domain.lower

    def restrict(self, domain: Interval) -> "SlopeFunction":
        if domain.lower < self.domain.lower or domain.upper > self.domain.upper:
            raise DomainError(f"{domain} is not inside {self.domain}")
        return SlopeFunction(self.v, domain, self.sign_class, self.label)

    def scaled(self, factor: float) -> "SlopeFunction":
        return SlopeFunction(lambda mu: factor * self.v(mu), self.domain, None, self.label)


@dataclass(frozen=True)
class SlopeDiagnosis:
    left_integral: float
    right_integral: float
    verdict: Verdict
    continuity_at_a: bool


def slope_function_of(family: Union[HazardLocationFamily, SurvivalModel]) -> SlopeFunction:
    """Extract ``v(mu) = h'(h^{-1}(mu))`` from a family or its generator.

    Generators rebuilt from a slope function keep it and return it directly.
    """
    gen = family.generator if isinstance(family, HazardLocationFamily) else family
    if not gen.is_monotone:
        raise NotMonotone("slope function needs a monotone hazard")
    domain = family.rate_domain if isinstance(family, HazardLocationFamily) else gen.rate_domain

    if gen.slope_fn is not None:
        v = gen.slope_fn
    else:
        def v(mu):
            return gen.hazard_derivative(gen.inverse_hazard(mu))

    sign = SignClass.POSITIVE if gen.monotone_class is MonotoneClass.IFR else SignClass.NEGATIVE
    return SlopeFunction(v, domain, sign, gen.name)


def _ratio(v: SlopeFunction):
    return lambda mu: mu / v.v(mu)


def _abs_ratio(v: SlopeFunction):
    return lambda mu: mu / np.abs(v.v(mu))


def _is_endpoint(v: SlopeFunction, x: float) -> bool:
    return x == v.domain.lower or x == v.domain.upper


def hazard_interval_integral(v: SlopeFunction, mu_c: float, mu_d: float) -> float:
    """``H(d) - H(c) = int_{h(c)}^{h(d)} mu / v(mu) dmu``; endpoints may be domain ends."""
    for x in (mu_c, mu_d):
        if not v.domain.contains_closed(x):
            raise RateOutOfDomain(f"{x} outside {v.domain}")
    f = _ratio(v)
    c_end, d_end = _is_endpoint(v, mu_c), _is_endpoint(v, mu_d)
    if not c_end and not d_end:
        return integrate(f, mu_c, mu_d)
    ref = v.domain.interior_point() if (c_end and d_end) else (mu_d if c_end else mu_c)
    total = 0.0
    for x, sgn in ((mu_d, 1.0), (mu_c, -1.0)):
        if x == ref:
            continue
        if _is_endpoint(v, x):
            val, ok = improper_integral(f, ref, x)
            if not ok:
                raise DivergentIntegral(f"integral of mu/v diverges toward {x}", direction=x)
        else:
            val = integrate(f, ref, x)
        total += sgn * val
    return total


def _side_integral(v: SlopeFunction, ref: float, end: float) -> float:
    val, ok = improper_integral(_abs_ratio(v), ref, end)
    return abs(val) if ok else math.inf


def validate_slope(v: SlopeFunction) -> SlopeDiagnosis:
    """Check whether ``v`` can be a slope function via the two endpoint integrals.

    The left integral (toward the rate of the lower support end) must converge
    for the survival function to be continuous there; a convergent right
    integral means the reconstructed model is right censored.
    """
    ref = v.domain.interior_point()
    left = _side_integral(v, ref, v.a_side)
    right = _side_integral(v, ref, v.b_side)
    if not math.isfinite(left):
        verdict = Verdict.INVALID
    elif math.isfinite(right):
        verdict = Verdict.VALID_RIGHT_CENSORED
    else:
        verdict = Verdict.VALID_PROPER
    return SlopeDiagnosis(left, right, verdict, math.isfinite(left))


class _Knots:
    """Stored ``(mu, psi, phi)`` knots with ``psi' = 1/v`` and ``phi' = mu/v``, both 0 at mu0."""

    def __init__(self, v: SlopeFunction, mu0: float):
        self.v = v
        self.mu0 = mu0
        inv = lambda mu: 1.0 / v.v(mu)
        rat = _ratio(v)
        lows = self._walk(inv, rat, v.domain.lower)
        highs = self._walk(inv, rat, v.domain.upper)
        pts = lows[::-1] + [(mu0, 0.0, 0.0)] + highs
        self.mus = np.array([p[0] for p in pts])
        self.psis = np.array([p[1] for p in pts])
        self.phis = np.array([p[2] for p in pts])

    def _walk(self, inv, rat, end):
        out = []
        start = self.mu0
        x0, psi, phi = start, 0.0, 0.0
        span = max(1.0, abs(start))
        quiet = 0
        for k in range(1, 1100):
            if math.isinf(end):
                if k > 1000:
                    break
                x1 = start + span * (2.0 ** k - 1.0)
            else:
                x1 = end - (end - start) * 2.0 ** (-k)
            if x1 == x0 or x1 == end or x1 <= 0 and end == 0:
                break
            try:
                dpsi = integrate(inv, x0, x1)
                dphi = integrate(rat, x0, x1)
            except IntegrationFailure:
                break
            psi += dpsi
            phi += dphi
            if not (math.isfinite(psi) and math.isfinite(phi)):
                break
            out.append((x1, psi, phi))
            # once psi stops moving, further knots map to the same location
            if abs(dpsi) <= 1e-17 * max(1.0, abs(psi)):
                quiet += 1
                if quiet >= 5:
                    break
            else:
                quiet = 0
            if abs(psi) > 1e8:
                break
            x0 = x1
        return out

    def _nearest(self, mu):
        k = int(np.clip(np.searchsorted(self.mus, mu), 1, len(self.mus) - 1))
        return k - 1 if abs(self.mus[k - 1] - mu) <= abs(self.mus[k] - mu) else k

    def psi(self, mu: float) -> float:
        k = self._nearest(mu)
        return float(self.psis[k] + integrate(lambda x: 1.0 / self.v.v(x), self.mus[k], mu))

    def phi(self, mu: float) -> float:
        k = self._nearest(mu)
        return float(self.phis[k] + integrate(_ratio(self.v), self.mus[k], mu))

    def hazard(self, y: float) -> float:
        """Invert ``psi``: the rate reached at location ``y``."""
        psis, mus = self.psis, self.mus
        if not self.v.ifr:
            psis, mus = psis[::-1], mus[::-1]
        # psis ascending now
        if y <= psis[0]:
            return float(mus[0])
        if y >= psis[-1]:
            return float(mus[-1])
        j = int(np.searchsorted(psis, y))
        lo, hi = mus[j - 1], mus[j]
        if psis[j] == y:
            return float(hi)
        f = lambda mu: self.psi(mu) - y
        a, b = min(lo, hi), max(lo, hi)
        return float(brentq(f, a, b, xtol=max(1e-300, 1e-16 * abs(a)), rtol=1e-15, maxiter=200))


def reconstruct_from_slope(v: SlopeFunction, mu0: float) -> HazardLocationFamily:
    """Rebuild the hazard location family with slope function ``v``.

    The inverse hazard ``psi`` solves ``psi' = 1/v`` with ``psi(mu0) = 0``, so
    the returned generator has ``h(0) = mu0``. ``H`` follows from the
    substitution identity and ``G = exp(-H)``.
    """
    if not v.domain.contains(mu0):
        raise RateOutOfDomain(f"mu0={mu0} must be interior to {v.domain}")
    diag = validate_slope(v)
    if diag.verdict is Verdict.INVALID:
        raise InvalidSlope("slope function fails the continuity condition at the left end")
    inv = lambda mu: 1.0 / v.v(mu)
    ends = []
    for end in (v.a_side, v.b_side):
        val, ok = improper_integral(inv, mu0, end)
        ends.append(val if ok else (math.inf if (end > mu0) == v.ifr else -math.inf))
    a, b = ends
    h0, ok = improper_integral(_ratio(v), mu0, v.a_side)
    if not ok:
        raise IntegrationFailure("left-end integral did not converge")
    H0 = -h0
    Hb = math.inf
    if diag.verdict is Verdict.VALID_RIGHT_CENSORED:
        phib, ok = improper_integral(_ratio(v), mu0, v.b_side)
        if ok:
            Hb = H0 + phib
    knots = _Knots(v, mu0)

    def h_scalar(y):
        return knots.hazard(float(y))

    def H_scalar(y):
        return H0 + knots.phi(knots.hazard(float(y)))

    vec = lambda fn: (lambda y: np.vectorize(fn, otypes=[float])(y) if np.ndim(y) else float(fn(y)))
    h_fn = vec(h_scalar)
    H_fn = vec(H_scalar)
    dh_fn = lambda y: v.v(h_fn(y))
    hinv = vec(knots.psi)
    cm = math.exp(-Hb) if math.isfinite(Hb) else 0.0
    gen = SurvivalModel(Interval(a, b), H_fn, h_fn, dh_fn, hinv_fn=hinv, rate_domain_=v.domain,
                        censor_mass=cm, monotone_class=v.sign_class.monotone_class,
                        name=f"reconstructed[{v.label}]", slope_fn=v.v)
    return HazardLocationFamily(gen, v.domain)


__all__ = [
    "SignClass", "Verdict", "SlopeFunction", "SlopeDiagnosis", "slope_function_of",
    "hazard_interval_integral", "validate_slope", "reconstruct_from_slope",
]

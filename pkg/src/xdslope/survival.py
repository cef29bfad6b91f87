"""Survival models with smooth survival functions.

A :class:`SurvivalModel` carries the integrated hazard ``H``, hazard ``h`` and
hazard derivative ``h'`` on an open support ``(a, b)``. Outside the support the
usual conventions apply: ``H`` and ``h`` are 0 to the left and infinite to the
right, except that ``H(b)`` is finite when mass ``G(b) > 0`` sits at ``b``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ._numerics import central_diff, stable_limit
from .errors import (DomainError, EmptySupport, InvalidScale, NotMonotone,
                     NumericalError, OutOfSupport, RateOutOfDomain, UnsupportedOrder)

ENDPOINT_TOL = 1e-12


class MonotoneClass(str, enum.Enum):
    IFR = "IFR"
    DFR = "DFR"
    NONE = "NONE"


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lower, upper)``; either end may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise DomainError(f"empty interval ({self.lower}, {self.upper})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, x) -> bool:
        return bool(self.lower < x < self.upper)

    def contains_closed(self, x, tol: float = 0.0) -> bool:
        return bool(self.lower - tol <= x <= self.upper + tol)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def interior_point(self) -> float:
        lo, hi = self.lower, self.upper
        if self.bounded:
            return 0.5 * (lo + hi)
        if math.isfinite(lo):
            return lo + max(1.0, abs(lo)) if lo != 0 else 1.0
        if math.isfinite(hi):
            return hi - max(1.0, abs(hi))
        return 0.0

    def compact(self, inset: float = 0.05, reach: float = 10.0) -> "Interval":
        """A compact subinterval away from both ends."""
        lo, hi = self.lower, self.upper
        if self.bounded:
            w = hi - lo
            return Interval(lo + inset * w, hi - inset * w)
        if math.isfinite(lo):
            s = max(1.0, abs(lo)) if lo != 0 else 1.0
            return Interval(lo + inset * s, lo + reach * s)
        if math.isfinite(hi):
            s = max(1.0, abs(hi)) if hi != 0 else 1.0
            return Interval(hi - reach * s, hi - inset * s)
        return Interval(-reach / 2, reach / 2)

    def grid(self, n: int, inset: float = 0.01) -> np.ndarray:
        """``n`` ordered points spread over the interval (transformed for infinite ends)."""
        u = np.linspace(inset, 1.0 - inset, n)
        lo, hi = self.lower, self.upper
        if self.bounded:
            return lo + (hi - lo) * u
        if math.isfinite(lo):
            s = max(1.0, abs(lo))
            return lo + s * u / (1.0 - u)
        if math.isfinite(hi):
            s = max(1.0, abs(hi))
            return hi - s * (1.0 - u) / u
        return np.log(u / (1.0 - u)) * 3.0

    def clamp(self, y):
        lo = self.lower + ENDPOINT_TOL * max(1.0, abs(self.lower)) if math.isfinite(self.lower) else -np.inf
        hi = self.upper - ENDPOINT_TOL * max(1.0, abs(self.upper)) if math.isfinite(self.upper) else np.inf
        return np.clip(y, lo, hi)


def _vec(fn):
    """Wrap a scalar function so it accepts numpy arrays."""
    v = np.vectorize(fn, otypes=[float])
    return lambda y: v(y) if np.ndim(y) else float(fn(float(y)))


@dataclass(frozen=True, eq=False)
class SurvivalModel:
    """A survival model ``G = exp(-H)`` on ``support``.

    The raw callables (``H_fn``, ``h_fn``, ...) are only evaluated inside the
    support and must accept numpy arrays. ``dh_fn`` falls back to Richardson
    central differences, ``hinv_fn`` to monotone root finding and
    ``rate_domain_`` to endpoint limits of ``h``.
    """

    support: Interval
    H_fn: Callable
    h_fn: Callable
    dh_fn: Optional[Callable] = None
    G_fn: Optional[Callable] = None
    hinv_fn: Optional[Callable] = None
    rate_domain_: Optional[Interval] = None
    higher: Tuple[Callable, ...] = ()
    censor_mass: float = 0.0
    monotone_class: MonotoneClass = MonotoneClass.NONE
    name: str = ""
    xd_builder: Optional[Callable] = field(default=None, repr=False)
    slope_fn: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        cm = float(self.censor_mass)
        if not 0.0 <= cm < 1.0:
            raise DomainError(f"censor mass {cm} outside [0, 1)")
        object.__setattr__(self, "censor_mass", cm)
        mc = MonotoneClass(self.monotone_class)
        object.__setattr__(self, "monotone_class", mc)
        if mc is MonotoneClass.DFR and not math.isfinite(self.support.lower):
            raise DomainError("a DFR model needs a finite lower support endpoint")
        if mc is MonotoneClass.IFR and math.isinf(self.support.upper) and cm > 0:
            raise DomainError("an IFR model on an unbounded support is always proper")

    # -- properties ---------------------------------------------------------

    @property
    def a(self) -> float:
        return self.support.lower

    @property
    def b(self) -> float:
        return self.support.upper

    @property
    def is_proper(self) -> bool:
        return self.censor_mass == 0.0 or math.isfinite(self.b)

    @property
    def is_monotone(self) -> bool:
        return self.monotone_class is not MonotoneClass.NONE

    @cached_property
    def rate_domain(self) -> Interval:
        """``Psi = h(C)`` as an ordered interval."""
        if self.rate_domain_ is not None:
            return self.rate_domain_
        if not self.is_monotone:
            raise NotMonotone(f"{self.name or 'model'} has no monotone hazard")
        ends = [stable_limit(self.hazard, _approach(self.a, self.support.interior_point(), True)),
                stable_limit(self.hazard, _approach(self.b, self.support.interior_point(), False))]
        ends = [max(e, 0.0) for e in ends]
        return Interval(min(ends), max(ends))

    # -- evaluation with conventions ----------------------------------------

    def _split(self, y):
        y = np.asarray(y, dtype=float)
        a, b = self.a, self.b
        tol_a = ENDPOINT_TOL * max(1.0, abs(a)) if math.isfinite(a) else 0.0
        tol_b = ENDPOINT_TOL * max(1.0, abs(b)) if math.isfinite(b) else 0.0
        left = y <= a
        at_b = (y >= b) & (y <= b + tol_b) & ~left if math.isfinite(b) else np.zeros_like(left)
        right = (y > b + tol_b) if math.isfinite(b) else np.isposinf(y)
        inside = ~(left | right | at_b)
        return y, left, right, at_b, inside

    def _eval(self, fn, y, left_val, right_val, b_val):
        y, left, right, at_b, inside = self._split(y)
        out = np.empty(y.shape, dtype=float)
        out[left] = left_val
        out[right] = right_val
        out[at_b] = b_val
        if np.any(inside):
            out[inside] = fn(y[inside])
        return out if out.ndim else float(out)

    @property
    def H_at_b(self) -> float:
        return -math.log(self.censor_mass) if self.censor_mass > 0 else math.inf

    def integrated_hazard(self, y):
        return self._eval(self.H_fn, y, 0.0, math.inf, self.H_at_b)

    def survival(self, y):
        fn = self.G_fn if self.G_fn is not None else (lambda x: np.exp(-self.H_fn(x)))
        return self._eval(fn, y, 1.0, 0.0, self.censor_mass)

    def hazard(self, y):
        return self._eval(self.h_fn, y, 0.0, math.inf, math.inf)

    def hazard_derivative(self, y):
        fn = self.dh_fn if self.dh_fn is not None else self._fd_dh
        return self._eval(fn, y, 0.0, math.nan, math.nan)

    def _fd_dh(self, y):
        def one(x):
            step = max(1e-6, 1e-6 * abs(x))
            if not (self.support.contains(x - step) and self.support.contains(x + step)):
                raise NumericalError(f"difference stencil at {x} leaves the support")
            return central_diff(self.h_fn, x, step)
        return _vec(one)(y)

    def density(self, y):
        return np.asarray(self.hazard(y)) * np.asarray(self.survival(y))

    def inverse_hazard(self, mu):
        """``h^{-1}(mu)``; requires a monotone hazard and ``mu`` in the rate domain."""
        if not self.is_monotone:
            raise NotMonotone("inverse hazard needs a monotone hazard")
        psi = self.rate_domain
        mu_arr = np.asarray(mu, dtype=float)
        if np.any(~((mu_arr > psi.lower) & (mu_arr < psi.upper))):
            raise RateOutOfDomain(f"rate {mu} outside {psi}")
        if self.hinv_fn is not None:
            out = self.hinv_fn(mu_arr)
            return np.asarray(out, dtype=float) if mu_arr.ndim else float(out)
        return _vec(self._root_hinv)(mu_arr)

    def _root_hinv(self, mu: float) -> float:
        lo, hi = _bracket_monotone(self.hazard, mu, self.support,
                                   self.monotone_class is MonotoneClass.IFR)
        return brentq(lambda y: float(self.hazard(y)) - mu, lo, hi, xtol=1e-15, rtol=1e-15,
                      maxiter=200)

    def higher_derivative(self, k: int, y: float) -> float:
        """``h^{(k)}(y)`` for k in {2, 3}: closed form when supplied, else differences."""
        if len(self.higher) >= k - 1:
            return float(self.higher[k - 2](np.float64(y)))
        step = 1e-3 * max(1.0, abs(y))
        dh = lambda x: float(self.hazard_derivative(x))
        if k == 2:
            return central_diff(dh, y, step, 1)
        if k == 3:
            return central_diff(dh, y, step, 2)
        raise UnsupportedOrder(f"derivative order {k}")

    def with_(self, **changes) -> "SurvivalModel":
        return replace(self, **changes)


def _approach(end: float, ref: float, lower: bool):
    if math.isfinite(end):
        d = abs(ref - end)
        return [end + (d if lower else -d) * 2.0 ** (-k) for k in range(10, 40, 3)]
    s = 1.0 if not lower else -1.0
    return [ref + s * max(1.0, abs(ref)) * 10.0 ** k for k in range(1, 9)]


def _bracket_monotone(fn, target, support: Interval, increasing: bool):
    """Find ``lo < hi`` inside ``support`` with ``fn - target`` changing sign."""
    ref = support.interior_point()
    lo_lim = support.clamp(np.float64(support.lower)) if math.isfinite(support.lower) else None
    hi_lim = support.clamp(np.float64(support.upper)) if math.isfinite(support.upper) else None

    def expand(toward_upper):
        lim = hi_lim if toward_upper else lo_lim
        if lim is not None:
            return float(lim)
        step = max(1.0, abs(ref))
        x = ref
        for _ in range(1100):
            x = x + step if toward_upper else x - step
            val = float(fn(x)) - target
            if (val > 0) == (increasing == toward_upper) and val != 0:
                return x
            step *= 2.0
            if not math.isfinite(x + step):
                break
        return x

    return expand(False), expand(True)


@dataclass(frozen=True)
class Semiinvariants:
    order: int
    values: Tuple[float, ...]


def _require_zero(model: SurvivalModel):
    if not model.support.contains(0.0):
        raise DomainError(f"0 is outside the support {model.support}")


def rate_and_slope(model: SurvivalModel) -> Tuple[float, float]:
    """Rate ``h(0)`` and slope ``h'(0)``."""
    _require_zero(model)
    return float(model.hazard(0.0)), float(model.hazard_derivative(0.0))


def slope_via_varform(model: SurvivalModel) -> float:
    """Slope as ``mu * (mu - g'(0))`` with ``g = -log f``, ``g'`` by differences."""
    _require_zero(model)
    step = 1e-6
    if not (model.support.contains(-2 * step) and model.support.contains(2 * step)):
        raise NumericalError("difference stencil leaves the support")
    g = lambda y: -math.log(float(model.hazard(y))) + float(model.integrated_hazard(y))
    mu = float(model.hazard(0.0))
    return mu * (mu - central_diff(g, 0.0, step))


def semiinvariants(model: SurvivalModel, order: int) -> Semiinvariants:
    """Derivatives ``H^{(i)}(0)`` for ``i = 1..order`` (order at most 4)."""
    if order < 1 or order > 4:
        raise UnsupportedOrder(f"order {order} not supported (1..4)")
    _require_zero(model)
    vals = [float(model.hazard(0.0)), float(model.hazard_derivative(0.0))]
    for k in (2, 3):
        vals.append(model.higher_derivative(k, 0.0))
    return Semiinvariants(order, tuple(vals[:order]))


def infer_monotone_class(support: Interval, hazard: Callable, n: int = 200) -> MonotoneClass:
    ys = support.grid(n)
    hs = np.asarray(hazard(ys), dtype=float)
    d = np.diff(hs)
    if np.all(d > 0):
        return MonotoneClass.IFR
    if np.all(d < 0):
        return MonotoneClass.DFR
    return MonotoneClass.NONE


def min_of(models: Sequence[SurvivalModel]) -> SurvivalModel:
    """Law of the minimum of independent variables: integrated hazards add."""
    models = list(models)
    if not models:
        raise EmptySupport("min_of needs at least one model")
    lo = min(m.a for m in models)
    hi = min(m.b for m in models)
    if not max(m.a for m in models) < hi:
        raise EmptySupport("supports do not overlap")
    support = Interval(lo, hi)
    H = lambda y: sum(np.asarray(m.integrated_hazard(y)) for m in models)
    h = lambda y: sum(np.asarray(m.hazard(y)) for m in models)

    def dh(y):
        total = 0.0
        for m in models:
            inside = (np.asarray(y) > m.a) & (np.asarray(y) < m.b)
            total = total + np.where(inside, np.nan_to_num(m.hazard_derivative(y)), 0.0)
        return total

    higher = ()
    if all(len(m.higher) >= 2 for m in models):
        higher = tuple(
            (lambda y, i=i: sum(np.where((np.asarray(y) > m.a) & (np.asarray(y) < m.b),
                                         m.higher[i](np.asarray(y, dtype=float)), 0.0)
                                for m in models))
            for i in range(2))
    cm = math.exp(-sum(float(m.integrated_hazard(hi)) for m in models)) if math.isfinite(hi) else \
        math.prod(m.censor_mass for m in models)
    mc = infer_monotone_class(support, h)
    return SurvivalModel(support, H, h, dh, higher=higher, censor_mass=cm,
                         monotone_class=mc, name="min(" + ",".join(m.name for m in models) + ")")


def scale_model(model: SurvivalModel, c: float) -> SurvivalModel:
    """Law of ``cY``: integrated hazard ``H(y/c)``."""
    if not c > 0 or not math.isfinite(c):
        raise InvalidScale(f"scale must be positive, got {c}")
    c = float(c)
    if c == 1.0:
        return model
    m = model
    psi = m.rate_domain_
    return SurvivalModel(
        Interval(c * m.a, c * m.b),
        lambda y: m.H_fn(y / c),
        lambda y: m.h_fn(y / c) / c,
        (lambda y: m.dh_fn(y / c) / c ** 2) if m.dh_fn is not None else None,
        (lambda y: m.G_fn(y / c)) if m.G_fn is not None else None,
        (lambda mu: c * m.hinv_fn(c * mu)) if m.hinv_fn is not None else None,
        Interval(psi.lower / c, psi.upper / c) if psi is not None else None,
        tuple((lambda y, f=f, k=k: f(y / c) / c ** (k + 3)) for k, f in enumerate(m.higher)),
        m.censor_mass, m.monotone_class, f"{c}*{m.name}",
    )


def translate(model: SurvivalModel, t: float) -> SurvivalModel:
    """Law of ``Y + t``: survival ``G(y - t)``."""
    t = float(t)
    if t == 0.0:
        return model
    m = model
    return SurvivalModel(
        Interval(m.a + t, m.b + t),
        lambda y: m.H_fn(y - t),
        lambda y: m.h_fn(y - t),
        (lambda y: m.dh_fn(y - t)) if m.dh_fn is not None else None,
        (lambda y: m.G_fn(y - t)) if m.G_fn is not None else None,
        (lambda mu: m.hinv_fn(mu) + t) if m.hinv_fn is not None else None,
        m.rate_domain_,
        tuple((lambda y, f=f: f(y - t)) for f in m.higher),
        m.censor_mass, m.monotone_class, m.name, slope_fn=m.slope_fn,
    )


def exponential_model(rate: float, lower: float = 0.0) -> SurvivalModel:
    """Shifted exponential ``lower + E_rate`` (constant hazard, so no monotone class).

    Also stands in for a frailty concentrated at a single value ``rate``.
    """
    if not rate > 0:
        raise DomainError("exponential rate must be positive")
    return SurvivalModel(
        Interval(lower, math.inf),
        lambda y: rate * (y - lower),
        lambda y: np.full_like(np.asarray(y, dtype=float), rate),
        lambda y: np.zeros_like(np.asarray(y, dtype=float)),
        higher=(lambda y: np.zeros_like(np.asarray(y, dtype=float)),) * 2,
        name=f"exponential({rate})",
    )


# -- sampling ---------------------------------------------------------------

def sample(model: SurvivalModel, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. draws by inverse transform; censored draws land on the right end."""
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    u = np.maximum(u, np.finfo(float).tiny)
    out = np.empty(n)
    cens = u < model.censor_mass
    out[cens] = model.b
    if np.any(~cens):
        out[~cens] = solve_integrated_hazard(model, -np.log(u[~cens]))
    return out


def solve_integrated_hazard(model: SurvivalModel, target: np.ndarray,
                            tol: float = 1e-12, maxiter: int = 200) -> np.ndarray:
    """Solve ``H(y) = target`` elementwise by bracketed bisection with Newton steps."""
    t = np.asarray(target, dtype=float)
    sup = model.support
    ref = sup.interior_point()
    lo = np.full(t.shape, float(sup.clamp(np.float64(sup.lower))) if math.isfinite(sup.lower) else ref)
    hi = np.full(t.shape, float(sup.clamp(np.float64(sup.upper))) if math.isfinite(sup.upper) else ref)
    if not math.isfinite(sup.lower):
        step = np.full(t.shape, max(1.0, abs(ref)))
        todo = np.asarray(model.integrated_hazard(lo)) >= t
        for _ in range(1100):
            if not todo.any():
                break
            lo[todo] -= step[todo]
            step[todo] *= 2.0
            todo = todo & (np.asarray(model.integrated_hazard(lo)) >= t) & np.isfinite(lo)
    if not math.isfinite(sup.upper):
        step = np.full(t.shape, max(1.0, abs(ref)))
        todo = np.asarray(model.integrated_hazard(hi)) < t
        for _ in range(1100):
            if not todo.any():
                break
            hi[todo] += step[todo]
            step[todo] *= 2.0
            todo = todo & (np.asarray(model.integrated_hazard(hi)) < t) & np.isfinite(hi + step)
    y = 0.5 * (lo + hi)
    for _ in range(maxiter):
        f = np.asarray(model.integrated_hazard(y)) - t
        lo = np.where(f < 0, y, lo)
        hi = np.where(f >= 0, y, hi)
        hz = np.asarray(model.hazard(y))
        with np.errstate(all="ignore"):
            newton = y - f / hz
        mid = 0.5 * (lo + hi)
        bad = ~np.isfinite(newton) | (newton <= lo) | (newton >= hi)
        y_new = np.where(bad, mid, newton)
        done = (np.abs(y_new - y) <= tol * np.maximum(1.0, np.abs(y))) | \
               (hi - lo <= tol * np.maximum(1.0, np.abs(y)))
        y = y_new
        if np.all(done):
            break
    return y


@dataclass(frozen=True, eq=False)
class HazardLocationFamily:
    """Location family generated by a monotone-hazard model, indexed by its rate."""

    generator: SurvivalModel
    rate_domain: Interval = field(default=None)

    def __post_init__(self):
        if not self.generator.is_monotone:
            raise NotMonotone("a hazard location family needs a monotone generator")
        if self.rate_domain is None:
            object.__setattr__(self, "rate_domain", self.generator.rate_domain)

    def member(self, mu: float) -> SurvivalModel:
        """Member with rate ``mu``: survival ``y -> G(y + h^{-1}(mu))``."""
        if not self.rate_domain.contains(mu):
            raise RateOutOfDomain(f"rate {mu} outside {self.rate_domain}")
        return translate(self.generator, -float(self.generator.inverse_hazard(mu)))


def check_in_support(model: SurvivalModel, c: float):
    if not model.support.contains(c):
        raise OutOfSupport(f"{c} is not inside the support {model.support}")

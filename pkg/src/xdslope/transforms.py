"""Transformations of models and slope functions.

Truncation and censoring restrict the rate domain; reflections flip the
slope function horizontally or vertically; exponential components translate
it; location-and-scaling combines the last two with multiplication.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import (DomainNotFull, DomainTooSmall, DomainViolation, NegativityViolation,
                     NotCensorable, NotCensored, NotMonotone, UnboundedSupport)
from .survival import (HazardLocationFamily, Interval, MonotoneClass, SurvivalModel,
                       check_in_support, infer_monotone_class)
from .slope import SlopeFunction

__all__ = [
    "HazardLocationFamily", "hl_member", "truncate_left", "censor_right", "reflect_horizontal",
    "reflect_vertical", "add_exponential_component", "location_scale_slope", "shift_transform",
]

_POSITIVITY_TOL = 1e-9


def hl_member(family: HazardLocationFamily, mu: float) -> SurvivalModel:
    return family.member(mu)


def _rate_at(model: SurvivalModel, c: float) -> float:
    return float(model.hazard(c))


def _class_after_restriction(model: SurvivalModel, support: Interval) -> MonotoneClass:
    if model.is_monotone:
        return model.monotone_class
    return infer_monotone_class(support, model.hazard)


def truncate_left(model: SurvivalModel, c: float) -> SurvivalModel:
    """Condition on ``Y > c``: survival ``G(y)/G(c)`` on ``(c, b)``."""
    check_in_support(model, c)
    m = model
    support = Interval(c, m.b)
    Hc = float(m.integrated_hazard(c))
    Gc = math.exp(-Hc)
    # far tails underflow G(c); the ratio is then formed from H instead
    G_fn = (lambda y: m.G_fn(y) / Gc) if m.G_fn is not None and Gc > 1e-250 else None
    cm = math.exp(Hc - m.H_at_b) if m.censor_mass > 0 else 0.0
    mc = _class_after_restriction(m, support)
    psi = None
    if mc is not MonotoneClass.NONE and (m.rate_domain_ is not None or m.is_monotone):
        full = m.rate_domain
        hc = _rate_at(m, c)
        psi = Interval(hc, full.upper) if mc is MonotoneClass.IFR else Interval(full.lower, hc)
    return SurvivalModel(
        support,
        lambda y: m.H_fn(y) - Hc,
        m.h_fn, m.dh_fn,
        G_fn, m.hinv_fn, psi, m.higher, cm, mc, f"{m.name}|>{c:g}",
    )


def censor_right(model: SurvivalModel, c: float) -> SurvivalModel:
    """Replace ``Y`` by ``min(Y, c)``: support ``(a, c)`` with mass ``G(c)`` at ``c``."""
    check_in_support(model, c)
    m = model
    support = Interval(m.a, c)
    mc = _class_after_restriction(m, support)
    psi = None
    if mc is not MonotoneClass.NONE:
        hc = _rate_at(m, c)
        if m.is_monotone:
            full = m.rate_domain
            psi = Interval(full.lower, hc) if mc is MonotoneClass.IFR else Interval(hc, full.upper)
        else:
            ha = float(m.hazard(support.clamp(np.float64(m.a)))) if math.isfinite(m.a) else 0.0
            psi = Interval(max(ha, 0.0), hc) if mc is MonotoneClass.IFR else Interval(hc, ha)
    return SurvivalModel(
        support, m.H_fn, m.h_fn, m.dh_fn, m.G_fn, m.hinv_fn, psi, m.higher,
        float(m.survival(c)), mc, f"min({m.name},{c:g})",
    )


def reflect_horizontal(model: SurvivalModel) -> SurvivalModel:
    """Survival ``G(b)/G(-y)`` on ``-C``: hazard ``h(-y)``, slope ``-v``. Needs censoring."""
    m = model
    if m.censor_mass <= 0:
        raise NotCensored("horizontal reflection needs a right censored model")
    Hb = m.H_at_b
    cm = m.censor_mass
    mc = {MonotoneClass.IFR: MonotoneClass.DFR, MonotoneClass.DFR: MonotoneClass.IFR}.get(
        m.monotone_class, MonotoneClass.NONE)
    signs = (1.0, -1.0)
    return SurvivalModel(
        Interval(-m.b, -m.a),
        lambda y: Hb - m.H_fn(-y),
        lambda y: m.h_fn(-y),
        (lambda y: -m.dh_fn(-y)) if m.dh_fn is not None else None,
        (lambda y: cm / m.G_fn(-y)) if m.G_fn is not None else None,
        (lambda mu: -m.hinv_fn(mu)) if m.hinv_fn is not None else None,
        m.rate_domain if m.is_monotone else None,
        tuple((lambda y, f=f, s=s: s * f(-y)) for f, s in zip(m.higher, signs)),
        cm, mc, f"hreflect({m.name})",
    )


def reflect_vertical(model: SurvivalModel, m: float) -> SurvivalModel:
    """Vertical reflection with slope ``mu -> v(m - mu)`` on ``(0, m)``.

    The support is first restricted to ``(a, h^{-1}(m))`` (IFR) or
    ``(h^{-1}(m), b)`` (DFR); the restricted model must be right censored at a
    finite point ``b0``.
    """
    g = model
    if not g.is_monotone:
        raise NotMonotone("vertical reflection needs a monotone hazard")
    psi = g.rate_domain
    if not (m > 0 and psi.lower <= _POSITIVITY_TOL and m <= psi.upper):
        raise DomainTooSmall(f"(0, {m}) is not inside the rate domain {psi}")
    cut = float(g.inverse_hazard(m)) if m < psi.upper else None
    if g.monotone_class is MonotoneClass.IFR:
        a0, b0 = g.a, (cut if cut is not None else g.b)
    else:
        a0, b0 = (cut if cut is not None else g.a), g.b
    if not math.isfinite(b0):
        raise NotCensorable("restricted support has an infinite right end")
    Hb0 = float(g.integrated_hazard(b0))
    if not math.isfinite(Hb0):
        raise NotCensorable(f"restricted model has no mass at b0={b0}")
    if math.isfinite(a0):
        cm = math.exp(-(float(g.integrated_hazard(a0)) - Hb0 + m * (b0 - a0)))
    else:
        cm = 0.0
    signs = (-1.0, 1.0)
    return SurvivalModel(
        Interval(-b0, -a0),
        lambda y: g.H_fn(-y) - Hb0 + m * (y + b0),
        lambda y: m - g.h_fn(-y),
        (lambda y: g.dh_fn(-y)) if g.dh_fn is not None else None,
        (lambda y: g.G_fn(-y) * math.exp(Hb0) * np.exp(-m * (y + b0))) if g.G_fn is not None else None,
        (lambda mu: -g.hinv_fn(m - mu)) if g.hinv_fn is not None else
        (lambda mu: -g.inverse_hazard(m - mu)),
        Interval(0.0, m),
        tuple((lambda y, f=f, s=s: s * f(-y)) for f, s in zip(g.higher, signs)),
        cm, g.monotone_class, f"vreflect({g.name},{m:g})",
    )


def add_exponential_component(model: SurvivalModel, m: float) -> SurvivalModel:
    """Integrated hazard ``m (y - a) + H(y)``; ``m > 0`` adds, ``m < 0`` removes a component."""
    g = model
    if m == 0:
        return g
    a = g.a
    if not math.isfinite(a):
        raise UnboundedSupport("exponential components need a finite lower support end")
    psi = g.rate_domain if g.is_monotone else None
    low = psi.lower if psi is not None else 0.0
    if m < -low - _POSITIVITY_TOL:
        raise NegativityViolation(f"m={m} would make the hazard negative (inf Psi = {low})")
    if math.isfinite(g.b):
        cm = g.censor_mass * math.exp(-m * (g.b - a))
    else:
        cm = g.censor_mass if m < 0 else 0.0
    new_psi = None
    if psi is not None:
        new_psi = Interval(max(psi.lower + m, 0.0), psi.upper + m)
    return SurvivalModel(
        g.support,
        lambda y: m * (y - a) + g.H_fn(y),
        lambda y: m + g.h_fn(y),
        g.dh_fn,
        (lambda y: g.G_fn(y) * np.exp(-m * (y - a))) if g.G_fn is not None else None,
        (lambda mu: g.hinv_fn(mu - m)) if g.hinv_fn is not None else None,
        new_psi, g.higher, cm, g.monotone_class, f"{g.name}+exp({m:g})",
    )


def location_scale_slope(v: SlopeFunction, alpha: float, beta: float, gamma: float) -> SlopeFunction:
    """``mu -> gamma * v((mu - alpha)/beta)`` on ``alpha + beta * Psi``."""
    if not (beta > 0 and gamma > 0):
        raise DomainViolation("beta and gamma must be positive")
    lo = alpha + beta * v.domain.lower
    hi = alpha + beta * v.domain.upper
    if lo < -1e-12:
        raise DomainViolation(f"transformed domain ({lo}, {hi}) leaves (0, inf)")
    fn = v.v
    return SlopeFunction(lambda mu: gamma * fn((mu - alpha) / beta), Interval(max(lo, 0.0), hi),
                         v.sign_class, v.label)


def shift_transform(xd, m: float):
    """Shift transformation of an XD model (unit rate domain must be ``(0, inf)``).

    Truncate (IFR) or censor (DFR) the generator to rates above ``m``, then
    remove the exponential component. The result has unit slope ``v(m + .)``
    and keeps ``mu`` and ``lambda``; reparametrize with ``XDModel.with_params``.
    """
    from .xd import xd_make

    gen = xd.generator
    psi = gen.rate_domain
    if not (psi.lower == 0.0 and math.isinf(psi.upper)):
        raise DomainNotFull(f"shift transformation needs rate domain (0, inf), got {psi}")
    if not m > 0:
        raise DomainViolation("shift must be positive")
    c = float(gen.inverse_hazard(m))
    restricted = truncate_left(gen, c) if gen.monotone_class is MonotoneClass.IFR else censor_right(gen, c)
    shifted = add_exponential_component(restricted, -m)
    shifted = shifted.with_(rate_domain_=Interval(0.0, math.inf), name=f"shift({gen.name},{m:g})")
    return xd_make(shifted, xd.mu, xd.lam)

"""Convergence experiments for rescaled and shifted extreme dispersion models.

Two limit regimes are covered. Power asymptotics ``v(mu) ~ C mu^p`` near the
relevant end of the rate domain lead to generalized extreme value limits of
``n^(1/(p-2)) XD(n^(1/(p-2)) mu, n lambda)``. Exponential asymptotics
``v(mu) ~ c e^(beta mu)`` lead to exponential-slope limits of the shifted
models ``XD_m(mu, lambda e^(beta m))``.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ._numerics import improper_integral
from .catalog import gamma_from_p, get_family, gev_slope, make_gev
from .errors import (ExponentialDomain, InvalidParameter, NoExponentialAsymptotics,
                     NoPowerAsymptotics, NotMonotone, WindowOutOfDomain)
from .slope import SlopeFunction, slope_function_of
from .survival import Interval, MonotoneClass, SurvivalModel, scale_model
from .transforms import location_scale_slope, shift_transform
from .xd import XDModel, xd_make

GRID_POINTS = 512
SURVIVAL_GRID = 401
FIT_DECADES_IFR = (1e-8, 1e-6)
FIT_DECADES_DFR = (1e3, 1e5)
FIT_RESIDUAL = 1e-2
P_CONSISTENCY = 0.05
P_SNAP = 1e-3
EXP_PROBE = 30.0
EXP_TOLERANCE = 0.1


class Side(str, enum.Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"


@dataclass(frozen=True)
class ConvergenceStep:
    index: float
    slope_sup_distance: float
    survival_sup_distance: float
    tightness_integral: float
    rate: float


@dataclass(frozen=True)
class ConvergenceReport:
    steps: List[ConvergenceStep]
    limit_family: str
    compact_window: Interval
    passed: bool
    tightness_bound: float = math.inf
    tolerance: float = 1e-2

    @property
    def survival_distances(self) -> List[float]:
        return [s.survival_sup_distance for s in self.steps]

    @property
    def strictly_decreasing(self) -> bool:
        d = self.survival_distances
        return all(b < a for a, b in zip(d, d[1:]))


@dataclass(frozen=True)
class PowerAsymptotics:
    p: float
    constant: float
    residual: float


def slope_sequence_distance(v_n: SlopeFunction, v_limit: SlopeFunction, window: Interval) -> float:
    """Sup of ``|v_n - v_limit|`` over a 512-point grid on ``window``."""
    if not window.bounded:
        raise WindowOutOfDomain("window must be compact")
    for v in (v_n, v_limit):
        if window.lower < v.domain.lower or window.upper > v.domain.upper:
            raise WindowOutOfDomain(f"window {window} not inside {v.domain}")
    mu = np.linspace(window.lower, window.upper, GRID_POINTS)
    return float(np.max(np.abs(np.asarray(v_n(mu)) - np.asarray(v_limit(mu)))))


def tightness_integral(v: SlopeFunction, eta: float, side: Side = Side.LEFT) -> float:
    """``int mu/|v(mu)|`` between ``eta`` and the endpoint matching ``side``.

    LEFT integrates toward the rate of the lower support end (``inf Psi`` for
    IFR, ``sup Psi`` for DFR); RIGHT integrates toward the other end. Returns
    ``inf`` when the integral diverges.
    """
    side = Side(side)
    if not v.domain.contains(eta):
        raise WindowOutOfDomain(f"eta={eta} outside {v.domain}")
    end = v.a_side if side is Side.LEFT else v.b_side
    val, ok = improper_integral(lambda mu: mu / np.abs(v(mu)), eta, end)
    return abs(val) if ok else math.inf


def estimate_power_asymptotics(v: SlopeFunction) -> PowerAsymptotics:
    """Least-squares fit of ``log|v|`` against ``log mu`` over two decades near the approach end.

    The power is snapped to a nearby fraction with denominator at most 12. The
    constant is extrapolated from ``|v(mu)|/mu^p`` linearly in ``mu`` (IFR) or
    ``1/mu`` (DFR), which removes the leading correction term.
    """
    ifr = v.ifr
    lo, hi = FIT_DECADES_IFR if ifr else FIT_DECADES_DFR
    if ifr and v.domain.lower > 0:
        raise ExponentialDomain(f"rate domain {v.domain} has a positive lower end")
    if not ifr and math.isfinite(v.domain.upper):
        raise ExponentialDomain(f"rate domain {v.domain} has a finite upper end")
    mu = np.geomspace(lo, hi, 41)
    with np.errstate(all="ignore"):
        y = np.log(np.abs(np.asarray(v(mu), dtype=float)))
    if not np.all(np.isfinite(y)):
        raise NoPowerAsymptotics("slope function is not finite near the approach end")
    x = np.log(mu)
    p, c = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (p * x + c)) ** 2)))
    if resid > FIT_RESIDUAL:
        raise NoPowerAsymptotics(f"log-log fit residual {resid:.3g} exceeds {FIT_RESIDUAL}")
    snapped = float(Fraction(float(p)).limit_denominator(12))
    if abs(snapped - p) < P_SNAP:
        p = snapped
    t = mu if ifr else 1.0 / mu
    _, const = np.polyfit(t, np.exp(y - p * x), 1)
    sign = 1.0 if ifr else -1.0
    return PowerAsymptotics(float(p), sign * float(const), resid)


def _default_window(limit: SurvivalModel) -> Interval:
    lo = max(limit.a, -3.0) + 1e-3
    hi = min(limit.b, 3.0) - 1e-3
    return Interval(lo, hi)


def _check_window(window: Interval, limit: SurvivalModel):
    if not window.bounded:
        raise WindowOutOfDomain("survival window must be compact")
    if window.lower < limit.a or window.upper > limit.b:
        raise WindowOutOfDomain(f"window {window} not inside the limit support {limit.support}")


def _survival_distance(model: SurvivalModel, limit: SurvivalModel, window: Interval) -> float:
    y = np.linspace(window.lower, window.upper, SURVIVAL_GRID)
    return float(np.max(np.abs(np.asarray(model.survival(y)) - np.asarray(limit.survival(y)))))


def _slope_window(mu: float, domains: Sequence[Interval]) -> Interval:
    lo, hi = mu / 4.0, 4.0 * mu
    for d in domains:
        lo, hi = max(lo, d.lower), min(hi, d.upper)
    if not lo < hi:
        raise WindowOutOfDomain("no common compact window for the slope functions")
    inset = 1e-9 * (hi - lo)
    return Interval(lo + inset, hi - inset)


def _check_class(model: SurvivalModel, expected: MonotoneClass):
    if model.monotone_class is not expected:
        raise NotMonotone("sequence mixes IFR and DFR members")


def gev_convergence_experiment(generator: SurvivalModel, mu: float, lam: float,
                               n_values: Sequence[int], window: Optional[Interval] = None,
                               p: Optional[float] = None, constant: Optional[float] = None,
                               tolerance: float = 1e-2,
                               tightness_factor: float = 2.0) -> ConvergenceReport:
    """Distances between ``n^(1/(p-2)) XD(n^(1/(p-2)) mu, n lam)`` and its GEV limit.

    The limit is ``EV_gamma(mu, lam / (C (2 - p)))`` with ``gamma = (p-1)/(2-p)``
    where ``v(mu) ~ C mu^p`` is fitted from the unit slope function. A supplied
    ``p`` must agree with the fit to within 0.05; a supplied ``constant``
    replaces the fitted ``C``.
    """
    v = slope_function_of(generator)
    fit = estimate_power_asymptotics(v)
    if p is not None:
        if abs(p - fit.p) > P_CONSISTENCY:
            raise NoPowerAsymptotics(f"supplied p={p} disagrees with fitted p={fit.p:.4g}")
    else:
        p = fit.p
    const = fit.constant if constant is None else float(constant)
    if p == 2.0:
        raise ExponentialDomain("p = 2 corresponds to the exponential distribution")
    gamma = gamma_from_p(p)
    lam_limit = lam / (const * (2.0 - p))
    limit = make_gev(gamma, mu, lam_limit).model
    window = window if window is not None else _default_window(limit)
    _check_window(window, limit)
    limit_slope = gev_slope(gamma, lam_limit)
    eta = mu
    bound = tightness_factor * tightness_integral(limit_slope, eta)
    steps = []
    for n in sorted(n_values):
        s = float(n) ** (1.0 / (p - 2.0))
        model = scale_model(xd_make(generator, s * mu, n * lam).model, s)
        _check_class(model, generator.monotone_class)
        scale = 1.0 / (n * lam * s * s)
        vn = SlopeFunction(lambda m, s=s, scale=scale: scale * v(s * m),
                           Interval(v.domain.lower / s, v.domain.upper / s), v.sign_class)
        sw = _slope_window(mu, [vn.domain, limit_slope.domain])
        steps.append(ConvergenceStep(
            n, slope_sequence_distance(vn, limit_slope, sw),
            _survival_distance(model, limit, window), tightness_integral(vn, eta),
            float(model.hazard(0.0))))
    passed = bool(steps) and steps[-1].survival_sup_distance < tolerance and \
        all(st.tightness_integral <= bound for st in steps)
    return ConvergenceReport(steps, f"EV[{gamma:g}]({mu:g},{lam_limit:g})", window, passed,
                             bound, tolerance)


# -- exponential slope functions ---------------------------------------------

def exponential_slope_limit(beta: float, mu: float, lam: float) -> XDModel:
    """Limit model with slope function ``c_beta e^(beta mu) / lam``.

    ``beta > 0`` uses the right-censored generator with slope ``-e^mu``,
    ``beta < 0`` the one with slope ``e^-mu`` (both rescaled by ``|beta|``),
    and ``beta = 0`` the Rayleigh generator.
    """
    if beta == 0:
        return xd_make(get_family("rayleigh").model, mu, lam)
    base = get_family("exp_slope_dfr" if beta > 0 else "exp_slope_ifr").model
    c = abs(beta)
    return xd_make(scale_model(base, c), mu, lam / (c * c))


def _exp_limit_name(beta: float) -> str:
    if beta == 0:
        return "rayleigh"
    return "exp_slope_dfr" if beta > 0 else "exp_slope_ifr"


def check_exponential_asymptotics(v: SlopeFunction, beta: float) -> float:
    """Return ``e^(-beta mu) v(mu)`` at a large probe rate, validated against ``c_beta``."""
    if not (v.domain.lower == 0.0 and math.isinf(v.domain.upper)):
        raise NoExponentialAsymptotics(f"rate domain must be (0, inf), got {v.domain}")
    c_beta = -1.0 if beta > 0 else 1.0
    with np.errstate(all="ignore"):
        r = float(np.exp(-beta * EXP_PROBE) * v(np.float64(EXP_PROBE)))
    if not (math.isfinite(r) and abs(r - c_beta) <= EXP_TOLERANCE):
        raise NoExponentialAsymptotics(
            f"e^(-beta mu) v(mu) = {r:.4g} at mu={EXP_PROBE}, expected about {c_beta}")
    return r


def exp_slope_convergence_experiment(generator: SurvivalModel, beta: float, mu: float, lam: float,
                                     m_values: Sequence[float], window: Optional[Interval] = None,
                                     tolerance: float = 1e-2,
                                     tightness_factor: float = 2.0) -> ConvergenceReport:
    """Distances between the shifted models ``XD_m(mu, lam e^(beta m))`` and their limit."""
    v = slope_function_of(generator)
    check_exponential_asymptotics(v, beta)
    c_beta = -1.0 if beta > 0 else 1.0
    limit_xd = exponential_slope_limit(beta, mu, lam)
    limit = limit_xd.model
    window = window if window is not None else _default_window(limit)
    _check_window(window, limit)
    limit_slope = SlopeFunction(lambda m: c_beta * np.exp(beta * np.asarray(m, dtype=float)) / lam,
                                Interval(0.0, math.inf))
    eta = mu
    bound = tightness_factor * tightness_integral(limit_slope, eta)
    base = xd_make(generator, mu, lam)
    steps = []
    for m in sorted(m_values):
        shifted = shift_transform(base, m).with_params(lam=lam * math.exp(beta * m))
        model = shifted.model
        _check_class(model, generator.monotone_class)
        scale = math.exp(-beta * m) / lam
        vm = SlopeFunction(lambda x, m=m, scale=scale: scale * v(m + np.asarray(x, dtype=float)),
                           Interval(0.0, math.inf), v.sign_class)
        sw = _slope_window(mu, [vm.domain])
        steps.append(ConvergenceStep(
            m, slope_sequence_distance(vm, limit_slope, sw),
            _survival_distance(model, limit, window), tightness_integral(vm, eta),
            float(model.hazard(0.0))))
    passed = bool(steps) and steps[-1].survival_sup_distance < tolerance and \
        all(st.tightness_integral <= bound for st in steps)
    return ConvergenceReport(steps, f"{_exp_limit_name(beta)}({mu:g},{lam:g})", window, passed,
                             bound, tolerance)


def power_to_exponential_slope(p: float) -> SlopeFunction:
    """Relocate and rescale the power slope ``mu^p/(2-p)`` (``p > 2``) into ``-(1 + mu/p)^p``.

    The power slope is restricted to ``(1, inf)`` and mapped with
    ``mu -> (p - 2) v((mu + p)/p)``; it tends to ``-e^mu`` as ``p`` grows.
    """
    if not p > 2:
        raise InvalidParameter("the exponential limit needs p > 2")
    gamma = gamma_from_p(p)
    power = gev_slope(gamma).restrict(Interval(1.0, math.inf))
    return location_scale_slope(power, -p, p, p - 2.0)


__all__ = [
    "Side", "ConvergenceStep", "ConvergenceReport", "PowerAsymptotics", "slope_sequence_distance",
    "tightness_integral", "estimate_power_asymptotics", "gev_convergence_experiment",
    "exponential_slope_limit", "check_exponential_asymptotics", "exp_slope_convergence_experiment",
    "power_to_exponential_slope",
]

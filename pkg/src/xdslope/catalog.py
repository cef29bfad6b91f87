"""Closed-form constructors for the named families.

Each constructor returns a :class:`FamilySpec` holding the model, its analytic
slope function and the rate domain. Higher hazard derivatives are obtained
from the slope function: ``h'' = v'(h) v(h)`` and ``h''' = v(h) (v''(h) v(h) + v'(h)^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import expit, logit

from .errors import ExponentialCase, InvalidParameter, MissingParameter, UnknownFamily
from .slope import SlopeFunction
from .survival import Interval, MonotoneClass, SurvivalModel

INF = math.inf
GUMBEL_BAND = 1e-8

QUADRATIC = ("rayleigh", "gumbel", "uniform", "pareto", "logistic", "neg_exponential", "cosine")
REFLECTED = ("reflected_gumbel", "reflected_logistic", "reflected_neg_exponential")
EXAMPLES = ("negative_pareto", "burr", "gompertz_makeham", "uniform_no_exp",
            "exp_slope_ifr", "exp_slope_dfr")


@dataclass(frozen=True, eq=False)
class FamilySpec:
    name: str
    parameters: Dict[str, float]
    model: SurvivalModel
    slope_closed_form: Optional[SlopeFunction]
    citation: str = ""

    @property
    def rate_domain(self) -> Interval:
        return self.model.rate_domain


def _arr(y):
    return np.asarray(y, dtype=float)


def _higher(h, v, dv, ddv):
    """Second and third hazard derivatives through the slope function."""
    def d2(y):
        mu = h(y)
        return dv(mu) * v(mu)

    def d3(y):
        mu = h(y)
        return v(mu) * (ddv(mu) * v(mu) + dv(mu) ** 2)

    return (d2, d3)


def _model(name, support, H, h, dh, v, dv, ddv, hinv, psi, mc, G=None, cm=0.0):
    higher = _higher(h, v, dv, ddv) if ddv is not None else ()
    return SurvivalModel(Interval(*support), H, h, dh, G, hinv, Interval(*psi), higher, cm,
                         mc, name)


def _slope(v, psi, label):
    return SlopeFunction(v, Interval(*psi), label=label)


IFR, DFR, NONE = MonotoneClass.IFR, MonotoneClass.DFR, MonotoneClass.NONE
_zero = lambda mu: 0.0 * _arr(mu)
_one = lambda mu: 1.0 + 0.0 * _arr(mu)


def _quadratic_rows():
    rows = {}

    rows["rayleigh"] = dict(
        support=(0.0, INF), H=lambda y: 0.5 * _arr(y) ** 2, h=lambda y: _arr(y) + 0.0,
        dh=lambda y: 1.0 + 0.0 * _arr(y),
        v=_one, dv=_zero, ddv=_zero, hinv=lambda mu: _arr(mu) + 0.0, psi=(0.0, INF), mc=IFR,
        G=lambda y: np.exp(-0.5 * _arr(y) ** 2))
    rows["gumbel"] = dict(
        support=(-INF, INF), H=np.exp, h=np.exp, dh=np.exp, v=lambda mu: _arr(mu) + 0.0, dv=_one, ddv=_zero,
        hinv=np.log, psi=(0.0, INF), mc=IFR, G=lambda y: np.exp(-np.exp(y)))
    rows["uniform"] = dict(
        support=(0.0, 1.0), H=lambda y: -np.log1p(-_arr(y)), h=lambda y: 1.0 / (1.0 - _arr(y)),
        dh=lambda y: 1.0 / (1.0 - _arr(y)) ** 2,
        v=lambda mu: _arr(mu) ** 2, dv=lambda mu: 2.0 * _arr(mu), ddv=lambda mu: 2.0 + _zero(mu),
        hinv=lambda mu: 1.0 - 1.0 / _arr(mu), psi=(1.0, INF), mc=IFR, G=lambda y: 1.0 - _arr(y))
    rows["pareto"] = dict(
        support=(1.0, INF), H=np.log, h=lambda y: 1.0 / _arr(y), dh=lambda y: -1.0 / _arr(y) ** 2,
        v=lambda mu: -_arr(mu) ** 2, dv=lambda mu: -2.0 * _arr(mu), ddv=lambda mu: -2.0 + _zero(mu),
        hinv=lambda mu: 1.0 / _arr(mu), psi=(0.0, 1.0), mc=DFR, G=lambda y: 1.0 / _arr(y))
    rows["logistic"] = dict(
        support=(-INF, INF), H=lambda y: np.logaddexp(0.0, y), h=expit,
        dh=lambda y: expit(y) * expit(-_arr(y)),
        v=lambda mu: _arr(mu) * (1.0 - _arr(mu)), dv=lambda mu: 1.0 - 2.0 * _arr(mu),
        ddv=lambda mu: -2.0 + _zero(mu), hinv=logit, psi=(0.0, 1.0), mc=IFR,
        G=lambda y: expit(-_arr(y)))
    rows["neg_exponential"] = dict(
        support=(-INF, 0.0), H=lambda y: -np.log(-np.expm1(y)), h=lambda y: 1.0 / np.expm1(-_arr(y)),
        dh=lambda y: np.exp(-_arr(y)) / np.expm1(-_arr(y)) ** 2,
        v=lambda mu: _arr(mu) * (1.0 + _arr(mu)), dv=lambda mu: 1.0 + 2.0 * _arr(mu),
        ddv=lambda mu: 2.0 + _zero(mu), hinv=lambda mu: -np.log1p(1.0 / _arr(mu)),
        psi=(0.0, INF), mc=IFR, G=lambda y: -np.expm1(y))
    rows["cosine"] = dict(
        support=(0.0, math.pi / 2), H=lambda y: -np.log(np.cos(y)), h=np.tan,
        dh=lambda y: 1.0 / np.cos(y) ** 2,
        v=lambda mu: 1.0 + _arr(mu) ** 2, dv=lambda mu: 2.0 * _arr(mu),
        ddv=lambda mu: 2.0 + _zero(mu), hinv=np.arctan, psi=(0.0, INF), mc=IFR, G=np.cos)
    return rows


def _reflected_rows():
    rows = {}
    rows["reflected_gumbel"] = dict(
        support=(0.0, INF), H=lambda y: _arr(y) + np.expm1(-_arr(y)), h=lambda y: -np.expm1(-_arr(y)),
        dh=lambda y: np.exp(-_arr(y)),
        v=lambda mu: 1.0 - _arr(mu), dv=lambda mu: -1.0 + _zero(mu), ddv=_zero,
        hinv=lambda mu: -np.log1p(-_arr(mu)), psi=(0.0, 1.0), mc=IFR,
        G=lambda y: np.exp(-_arr(y) - np.expm1(-_arr(y))))

    def logcosh_half(y):
        x = 0.5 * np.abs(_arr(y))
        return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)

    rows["reflected_logistic"] = dict(
        support=(0.0, INF), H=logcosh_half, h=lambda y: 0.5 * np.tanh(0.5 * _arr(y)),
        dh=lambda y: 0.25 / np.cosh(0.5 * _arr(y)) ** 2,
        v=lambda mu: 0.25 - _arr(mu) ** 2, dv=lambda mu: -2.0 * _arr(mu),
        ddv=lambda mu: -2.0 + _zero(mu), hinv=lambda mu: 2.0 * np.arctanh(2.0 * _arr(mu)),
        psi=(0.0, 0.5), mc=IFR, G=lambda y: 1.0 / np.cosh(0.5 * _arr(y)))
    rows["reflected_neg_exponential"] = dict(
        support=(math.log(2.0), INF),
        H=lambda y: -math.log(4.0) + _arr(y) - np.log(-np.expm1(-_arr(y))),
        h=lambda y: 1.0 - 1.0 / np.expm1(y), dh=lambda y: np.exp(y) / np.expm1(y) ** 2,
        v=lambda mu: (_arr(mu) - 1.0) * (_arr(mu) - 2.0), dv=lambda mu: 2.0 * _arr(mu) - 3.0,
        ddv=lambda mu: 2.0 + _zero(mu), hinv=lambda mu: np.log((2.0 - _arr(mu)) / (1.0 - _arr(mu))),
        psi=(0.0, 1.0), mc=IFR, G=lambda y: 4.0 * (np.exp(-_arr(y)) - np.exp(-2.0 * _arr(y))))
    return rows


_QUAD = _quadratic_rows()
_REFL = _reflected_rows()


def _from_row(name, row, citation, params=None) -> FamilySpec:
    model = _model(name, row["support"], row["H"], row["h"], row["dh"], row["v"], row["dv"], row["ddv"],
                   row["hinv"], row["psi"], row["mc"], row.get("G"), row.get("cm", 0.0))
    return FamilySpec(name, dict(params or {}), model, _slope(row["v"], row["psi"], name), citation)


def make_quadratic_family(name: str) -> FamilySpec:
    """One of the seven families whose slope function is a quadratic in the rate."""
    if name not in _QUAD:
        raise UnknownFamily(f"unknown quadratic family {name!r}; choose from {', '.join(QUADRATIC)}")
    return _from_row(name, _QUAD[name], "quadratic hazard slope family")


def make_reflected_family(name: str) -> FamilySpec:
    """Vertical reflections of the Gumbel, logistic and negative exponential families."""
    if name not in _REFL:
        raise UnknownFamily(f"unknown reflected family {name!r}; choose from {', '.join(REFLECTED)}")
    return _from_row(name, _REFL[name], "vertically reflected quadratic hazard slope")


# -- generalized extreme value ---------------------------------------------

def gev_p(gamma: float) -> float:
    """Power of the slope function ``v(mu) = mu^p / (2 - p)``."""
    return (1.0 + 2.0 * gamma) / (1.0 + gamma)


def gamma_from_p(p: float) -> float:
    return (p - 1.0) / (2.0 - p)


def _check_gamma(gamma: float) -> float:
    g = float(gamma)
    if g == -1.0:
        raise ExponentialCase("gamma = -1 gives the exponential distribution, which has no slope")
    return g


def _gev_closed(gamma: float, mu: float, lam: float) -> SurvivalModel:
    """``EV_gamma(mu, lam)`` written through ``u(y) = mu^(-gamma/(1+gamma)) - gamma y / lam``."""
    g, mu, lam = float(gamma), float(mu), float(lam)
    builder = lambda mu2, lam2: _gev_closed(g, mu2, lam2 * lam)
    if abs(g) < GUMBEL_BAND:
        lm = math.log(mu)
        z = lambda y: _arr(y) / lam + lm
        return SurvivalModel(
            Interval(-INF, INF), lambda y: lam * np.exp(z(y)), lambda y: np.exp(z(y)),
            lambda y: np.exp(z(y)) / lam, lambda y: np.exp(-lam * np.exp(z(y))),
            lambda m: lam * (np.log(m) - lm), Interval(0.0, INF),
            (lambda y: np.exp(z(y)) / lam ** 2, lambda y: np.exp(z(y)) / lam ** 3),
            0.0, IFR, f"EV[0]({mu:g},{lam:g})", builder)
    k = 1.0 + g
    u0 = mu ** (-g / k)
    u = lambda y: u0 - g * _arr(y) / lam
    pw = lambda y, e: np.exp(e * np.log(u(y)))
    end = lam * u0 / g
    support = Interval(-INF, end) if g > 0 else Interval(end, INF)
    return SurvivalModel(
        support, lambda y: lam * pw(y, -1.0 / g), lambda y: pw(y, -1.0 / g - 1.0),
        lambda y: k * pw(y, -1.0 / g - 2.0) / lam, lambda y: np.exp(-lam * pw(y, -1.0 / g)),
        lambda m: lam * (u0 - _arr(m) ** (-g / k)) / g, Interval(0.0, INF),
        (lambda y: k * (1.0 + 2.0 * g) * pw(y, -1.0 / g - 3.0) / lam ** 2,
         lambda y: k * (1.0 + 2.0 * g) * (1.0 + 3.0 * g) * pw(y, -1.0 / g - 4.0) / lam ** 3),
        0.0, IFR if g > -1.0 else DFR, f"EV[{g:g}]({mu:g},{lam:g})", builder)


def gev_generator(gamma: float) -> SurvivalModel:
    """Unit generator of the GEV family with its finite support end placed at 0.

    ``H(x) = (-gamma x)^(-1/gamma)``; Gumbel ``H(x) = e^x`` for ``|gamma| < 1e-8``.
    Anchoring the end at 0 keeps rates near the end resolvable; the XD models
    it generates do not depend on location.
    """
    g = _check_gamma(gamma)
    builder = lambda mu, lam: _gev_closed(g, mu, lam)
    if abs(g) < GUMBEL_BAND:
        return make_quadratic_family("gumbel").model.with_(name="gev(0)", xd_builder=builder)
    k = 1.0 + g
    pw = lambda x, e: np.exp(e * np.log(-g * _arr(x)))
    support = Interval(-INF, 0.0) if g > 0 else Interval(0.0, INF)
    return SurvivalModel(
        support, lambda x: pw(x, -1.0 / g), lambda x: pw(x, -1.0 / g - 1.0),
        lambda x: k * pw(x, -1.0 / g - 2.0), lambda x: np.exp(-pw(x, -1.0 / g)),
        lambda m: -(_arr(m) ** (-g / k)) / g, Interval(0.0, INF),
        (lambda x: k * (1.0 + 2.0 * g) * pw(x, -1.0 / g - 3.0),
         lambda x: k * (1.0 + 2.0 * g) * (1.0 + 3.0 * g) * pw(x, -1.0 / g - 4.0)),
        0.0, IFR if g > -1.0 else DFR, f"gev({g:g})", builder)


def gev_slope(gamma: float, lam: float = 1.0) -> SlopeFunction:
    p = 1.0 if abs(gamma) < GUMBEL_BAND else gev_p(gamma)
    c = 1.0 / (lam * (2.0 - p))
    return SlopeFunction(lambda mu: c * _arr(mu) ** p, Interval(0.0, INF), label=f"gev({gamma:g})")


def make_gev(gamma: float, mu: float, lam: float) -> FamilySpec:
    """``EV_gamma(mu, lam)``: survival ``exp{-lam (mu^(-gamma/(1+gamma)) - gamma y/lam)^(-1/gamma)}``."""
    g = _check_gamma(gamma)
    if not (mu > 0 and lam > 0):
        raise InvalidParameter("mu and lambda must be positive")
    return FamilySpec("gev", {"gamma": g, "mu": float(mu), "lambda": float(lam)},
                      _gev_closed(g, mu, lam), gev_slope(g, lam), "generalized extreme value")


# -- further examples -------------------------------------------------------

def _burr(alpha: float) -> FamilySpec:
    a = float(alpha)
    if not a > 0:
        raise InvalidParameter("burr needs alpha > 0")
    H = lambda y: np.log1p(_arr(y) ** a)
    h = lambda y: a * _arr(y) ** (a - 1.0) / (1.0 + _arr(y) ** a)

    def dh(y):
        y = _arr(y)
        ya = y ** a
        return a * (a - 1.0) * y ** (a - 2.0) / (1.0 + ya) - a * a * y ** (2.0 * a - 2.0) / (1.0 + ya) ** 2

    G = lambda y: 1.0 / (1.0 + _arr(y) ** a)
    params = {"alpha": a}
    if a > 1.0:
        model = SurvivalModel(Interval(0.0, INF), H, h, dh, G, None, None, (), 0.0, NONE, "burr")
        return FamilySpec("burr", params, model, None, "Burr")
    hinv, slope = None, None
    if a == 1.0:
        hinv = lambda mu: 1.0 / _arr(mu) - 1.0
        slope = _slope(lambda mu: -_arr(mu) ** 2, (0.0, 1.0), "burr")
        psi = Interval(0.0, 1.0)
    else:
        psi = Interval(0.0, INF)
        if a == 0.5:
            def hinv(mu):
                r = 1.0 / _arr(mu)
                s = r / (1.0 + np.sqrt(1.0 + 2.0 * r))
                return s * s
            slope = _slope(lambda mu: -_arr(mu) ** 2 * (_arr(mu) + 2.0 + np.sqrt(_arr(mu) ** 2 + 2.0 * _arr(mu))),
                           (0.0, INF), "burr")
    model = SurvivalModel(Interval(0.0, INF), H, h, dh, G, hinv, psi, (), 0.0, DFR, "burr")
    return FamilySpec("burr", params, model, slope, "Burr")


def _gompertz_makeham(m: Optional[float], beta: float) -> FamilySpec:
    if m is None:
        raise MissingParameter("gompertz_makeham needs the parameter m")
    m, b = float(m), float(beta)
    if not m > 0:
        raise InvalidParameter("gompertz_makeham needs m > 0")
    if not b > 0:
        raise InvalidParameter("gompertz_makeham needs beta > 0; reflect horizontally for beta < 0")
    row = dict(
        support=(0.0, INF), H=lambda y: m * _arr(y) + np.expm1(b * _arr(y)) / b,
        h=lambda y: m + np.exp(b * _arr(y)), dh=lambda y: b * np.exp(b * _arr(y)), v=lambda mu: b * (_arr(mu) - m),
        dv=lambda mu: b + _zero(mu), ddv=_zero, hinv=lambda mu: np.log(_arr(mu) - m) / b,
        psi=(1.0 + m, INF), mc=IFR)
    return _from_row("gompertz_makeham", row, "Gompertz-Makeham", {"m": m, "beta": b})


def _example_rows():
    rows = {}

    def np_hinv(mu):
        mu = _arr(mu)
        return -2.0 / (mu * (1.0 + np.sqrt(1.0 + 4.0 / mu)))

    def np_v(mu):
        mu = _arr(mu)
        return mu * np.sqrt(mu * mu + 4.0 * mu)

    def np_dv(mu):
        mu = _arr(mu)
        r = np.sqrt(mu * mu + 4.0 * mu)
        return r + mu * (mu + 2.0) / r

    def np_ddv(mu):
        mu = _arr(mu)
        r = np.sqrt(mu * mu + 4.0 * mu)
        return (2.0 * (mu + 2.0) + mu) / r - mu * (mu + 2.0) ** 2 / r ** 3

    rows["negative_pareto"] = dict(
        support=(-INF, 0.0), H=lambda y: np.log1p(-1.0 / _arr(y)),
        h=lambda y: 1.0 / (_arr(y) ** 2 - _arr(y)),
        dh=lambda y: (1.0 - 2.0 * _arr(y)) / (_arr(y) ** 2 - _arr(y)) ** 2, v=np_v, dv=np_dv, ddv=np_ddv, hinv=np_hinv,
        psi=(0.0, INF), mc=IFR, G=lambda y: -_arr(y) / (1.0 - _arr(y)))
    rows["uniform_no_exp"] = dict(
        support=(0.0, 1.0), H=lambda y: -_arr(y) - np.log1p(-_arr(y)),
        h=lambda y: _arr(y) / (1.0 - _arr(y)), dh=lambda y: 1.0 / (1.0 - _arr(y)) ** 2, v=lambda mu: (1.0 + _arr(mu)) ** 2,
        dv=lambda mu: 2.0 * (1.0 + _arr(mu)), ddv=lambda mu: 2.0 + _zero(mu),
        hinv=lambda mu: _arr(mu) / (1.0 + _arr(mu)), psi=(0.0, INF), mc=IFR,
        G=lambda y: np.exp(_arr(y)) * (1.0 - _arr(y)))
    rows["exp_slope_ifr"] = dict(
        support=(0.0, INF), H=lambda y: (1.0 + _arr(y)) * np.log1p(y) - _arr(y), h=np.log1p,
        dh=lambda y: 1.0 / (1.0 + _arr(y)),
        v=lambda mu: np.exp(-_arr(mu)), dv=lambda mu: -np.exp(-_arr(mu)),
        ddv=lambda mu: np.exp(-_arr(mu)), hinv=np.expm1, psi=(0.0, INF), mc=IFR)

    def dfr_H(y):
        y = _arr(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return y - np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0)), 0.0)

    rows["exp_slope_dfr"] = dict(
        support=(0.0, 1.0), H=dfr_H, h=lambda y: -np.log(y), dh=lambda y: -1.0 / _arr(y), v=lambda mu: -np.exp(_arr(mu)),
        dv=lambda mu: -np.exp(_arr(mu)), ddv=lambda mu: -np.exp(_arr(mu)),
        hinv=lambda mu: np.exp(-_arr(mu)), psi=(0.0, INF), mc=DFR, cm=math.exp(-1.0))
    return rows


_EX = _example_rows()


def make_example_family(name: str, alpha: Optional[float] = None, m: Optional[float] = None,
                        beta: float = 1.0) -> FamilySpec:
    """Further worked examples: negative Pareto, Burr, Gompertz-Makeham and the
    exponential-slope generators."""
    if name == "burr":
        if alpha is None:
            raise MissingParameter("burr needs the parameter alpha")
        return _burr(alpha)
    if name == "gompertz_makeham":
        return _gompertz_makeham(m, beta)
    if name not in _EX:
        raise UnknownFamily(f"unknown example family {name!r}; choose from {', '.join(EXAMPLES)}")
    return _from_row(name, _EX[name], "worked example")


# -- registry used by the command line --------------------------------------

FAMILY_PARAMETERS: Dict[str, tuple] = {
    **{n: () for n in QUADRATIC + REFLECTED},
    "negative_pareto": (), "uniform_no_exp": (), "exp_slope_ifr": (), "exp_slope_dfr": (),
    "burr": ("alpha",), "gompertz_makeham": ("m", "beta"), "gev": ("gamma",),
}


def family_names():
    return sorted(FAMILY_PARAMETERS)


def get_family(name: str, **params: float) -> FamilySpec:
    """Look a family up by name. The ``gev`` entry is the anchored unit generator."""
    if name not in FAMILY_PARAMETERS:
        raise UnknownFamily(f"unknown family {name!r}; see 'catalog list'")
    allowed = FAMILY_PARAMETERS[name]
    extra = set(params) - set(allowed)
    if extra:
        raise InvalidParameter(f"family {name!r} does not take {', '.join(sorted(extra))}")
    if name in _QUAD:
        return make_quadratic_family(name)
    if name in _REFL:
        return make_reflected_family(name)
    if name == "gev":
        if "gamma" not in params:
            raise MissingParameter("gev needs the parameter gamma")
        g = _check_gamma(params["gamma"])
        return FamilySpec("gev", {"gamma": g}, gev_generator(g), gev_slope(g),
                          "generalized extreme value")
    return make_example_family(name, **params)


__all__ = [
    "FamilySpec", "make_quadratic_family", "make_reflected_family", "make_gev", "gev_generator",
    "gev_slope", "gev_p", "gamma_from_p", "make_example_family", "get_family", "family_names",
    "FAMILY_PARAMETERS", "QUADRATIC", "REFLECTED", "EXAMPLES",
]

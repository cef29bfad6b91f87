import math

import numpy as np
import pytest

from xdslope import catalog


def catalog_specs():
    """Every catalog family with a monotone hazard, parameters fixed."""
    out = [catalog.make_quadratic_family(n) for n in catalog.QUADRATIC]
    out += [catalog.make_reflected_family(n) for n in catalog.REFLECTED]
    out += [catalog.make_example_family(n) for n in
            ("negative_pareto", "uniform_no_exp", "exp_slope_ifr", "exp_slope_dfr")]
    out += [catalog.make_example_family("burr", alpha=0.5),
            catalog.make_example_family("burr", alpha=1.0),
            catalog.make_example_family("gompertz_makeham", m=0.5)]
    return out


def spec_id(spec):
    extra = ",".join(f"{k}={v:g}" for k, v in spec.parameters.items())
    return f"{spec.name}({extra})" if extra else spec.name


def sup_rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def location_match(model, reference, grid_support=None, points=50):
    """Sup relative distance between the hazards of ``model`` and of ``reference``
    shifted so both share the rate at 0."""
    mu0 = float(model.hazard(0.0))
    shift = float(reference.inverse_hazard(mu0))
    sup = grid_support or model.support.compact(inset=0.1, reach=3.0)
    ys = sup.grid(points)
    return sup_rel(model.hazard(ys), reference.hazard(ys + shift))

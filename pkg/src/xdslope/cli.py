"""Command-line front end.

All tabular output is CSV with a header row and floats written with 17
significant digits. Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from typing import Dict, List, Optional, Sequence

import jsonschema
import numpy as np

from . import catalog
from .convergence import exp_slope_convergence_experiment, gev_convergence_experiment
from .errors import ConfigError, InvalidParameter, NumericalError, ValidationError
from .expr import parse_endpoint, parse_slope_expression
from .slope import SlopeFunction, reconstruct_from_slope, slope_function_of, validate_slope
from .survival import Interval, SurvivalModel, sample
from .transforms import (add_exponential_component, censor_right, reflect_horizontal,
                         reflect_vertical, shift_transform, truncate_left)
from .xd import xd_make

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(out, header: Sequence[str], rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _params(pairs: Optional[List[str]]) -> Dict[str, float]:
    out = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise InvalidParameter(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise InvalidParameter(f"parameter {key!r} is not a number: {val!r}") from None
    return out


def _family_model(args) -> SurvivalModel:
    return catalog.get_family(args.family, **_params(args.param)).model


def _domain(pair) -> Interval:
    return Interval(parse_endpoint(pair[0]), parse_endpoint(pair[1]))


def _expr_slope(expr: str, domain) -> SlopeFunction:
    return SlopeFunction(parse_slope_expression(expr), _domain(domain), label=expr)


def _model_rows(model, ys):
    ys = np.asarray(ys, dtype=float)
    G = np.atleast_1d(model.survival(ys))
    H = np.atleast_1d(model.integrated_hazard(ys))
    h = np.atleast_1d(model.hazard(ys))
    inside = (ys > model.a) & (ys < model.b)
    dh = np.full(ys.shape, math.nan)
    if np.any(inside):
        dh[inside] = np.atleast_1d(model.hazard_derivative(ys[inside]))
    return zip(ys, G, H, h, dh)


# -- subcommands -------------------------------------------------------------

def cmd_catalog(args, out):
    rows = []
    for name in catalog.family_names():
        rows.append((name, ";".join(catalog.FAMILY_PARAMETERS[name])))
    write_csv(out, ["name", "parameters"], rows)


def cmd_eval(args, out):
    model = xd_make(_family_model(args), args.mu, args.lam).model
    write_csv(out, ["y", "G", "H", "h", "dh"], _model_rows(model, args.at))


def cmd_slope(args, out):
    if args.expr is not None:
        if args.domain is None:
            raise InvalidParameter("--expr needs --domain LO HI")
        v = _expr_slope(args.expr, args.domain)
    elif args.family is not None:
        v = slope_function_of(_family_model(args))
    else:
        raise InvalidParameter("slope needs --family or --expr")
    d = validate_slope(v)
    write_csv(out, ["slope", "sign_class", "domain_lower", "domain_upper", "left_integral",
                    "right_integral", "verdict"],
              [(v.label or "v", v.sign_class.value, v.domain.lower, v.domain.upper, d.left_integral,
                d.right_integral, d.verdict.value)])
    if args.table:
        mus = v.domain.grid(args.points)
        with open(args.table, "w", newline="") as fh:
            write_csv(fh, ["mu", "v"], zip(mus, np.asarray(v(mus))))


def cmd_reconstruct(args, out):
    v = _expr_slope(args.expr, args.domain)
    gen = reconstruct_from_slope(v, args.mu0).generator
    ys = gen.support.grid(args.points)
    write_csv(out, ["y", "G", "h"], zip(ys, gen.survival(ys), gen.hazard(ys)))


def cmd_sample(args, out):
    model = xd_make(_family_model(args), args.mu, args.lam).model
    write_csv(out, ["y"], ((y,) for y in sample(model, args.n, args.seed)))


def cmd_transform(args, out):
    gen = _family_model(args)
    need = {"truncate": "c", "censor": "c", "vreflect": "m", "addexp": "m", "shift": "m"}
    key = need.get(args.op)
    if key is not None and getattr(args, key) is None:
        raise InvalidParameter(f"--op {args.op} needs --{key}")
    if args.op == "shift":
        if args.mu is None or args.lam is None:
            raise InvalidParameter("--op shift needs --mu and --lambda")
        model = shift_transform(xd_make(gen, args.mu, args.lam), args.m).model
    else:
        base = xd_make(gen, args.mu, args.lam if args.lam is not None else 1.0).model \
            if args.mu is not None else gen
        model = {
            "truncate": lambda: truncate_left(base, args.c),
            "censor": lambda: censor_right(base, args.c),
            "hreflect": lambda: reflect_horizontal(base),
            "vreflect": lambda: reflect_vertical(base, args.m),
            "addexp": lambda: add_exponential_component(base, args.m),
        }[args.op]()
    write_csv(out, ["y", "G", "H", "h", "dh"], _model_rows(model, args.at))


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    schema = json.loads(resources.files("xdslope").joinpath("schemas/converge.schema.json").read_text())
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config {path}: {exc.message}") from None
    return cfg


def run_config(cfg: dict):
    if "family" in cfg:
        gen = catalog.get_family(cfg["family"]["name"], **cfg["family"].get("parameters", {})).model
    else:
        v = _expr_slope(cfg["slope_expression"], cfg["domain"])
        gen = reconstruct_from_slope(v, cfg.get("mu0", v.domain.interior_point())).generator
    window = Interval(*cfg["window"]) if "window" in cfg else None
    common = dict(window=window, tolerance=cfg.get("tolerance", 1e-2),
                  tightness_factor=cfg.get("tightness_factor", 2.0))
    if cfg["command"] == "gev":
        return gev_convergence_experiment(gen, cfg["mu"], cfg["lambda"], cfg["n_values"],
                                          p=cfg.get("p"), constant=cfg.get("constant"), **common)
    return exp_slope_convergence_experiment(gen, cfg["beta"], cfg["mu"], cfg["lambda"],
                                            cfg["m_values"], **common)


def cmd_converge(args, out):
    cfg = load_config(args.config)
    report = run_config(cfg)
    header = ["n" if cfg["command"] == "gev" else "m", "slope_dist", "surv_dist", "tight", "rate"]
    rows = [(s.index, s.slope_sup_distance, s.survival_sup_distance, s.tightness_integral, s.rate)
            for s in report.steps]
    if "output_path" in cfg:
        with open(cfg["output_path"], "w", newline="") as fh:
            write_csv(fh, header, rows)
    else:
        write_csv(out, header, rows)
    print(f"limit={report.limit_family} passed={report.passed}", file=sys.stderr)


# -- parser ------------------------------------------------------------------

def _add_family(p, required=True):
    p.add_argument("--family", required=required, help="catalog family name")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xdslope", description="Hazard slope functions and "
                                     "extreme dispersion models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the named families")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("eval", help="evaluate XD(mu, lambda) of a family")
    _add_family(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--at", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("slope", help="diagnose a slope function")
    _add_family(p, required=False)
    p.add_argument("--expr", help="slope expression in mu, e.g. 'mu^2'")
    p.add_argument("--domain", nargs=2, metavar=("LO", "HI"))
    p.add_argument("--table", metavar="PATH", help="also write a (mu, v) table here")
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("reconstruct", help="rebuild a generator from a slope function")
    p.add_argument("--expr", required=True)
    p.add_argument("--domain", nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--mu0", type=float, required=True, help="rate of the generator at 0")
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sample", help="draw from XD(mu, lambda)")
    _add_family(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("transform", help="apply a model transformation")
    _add_family(p)
    p.add_argument("--op", required=True,
                   choices=["truncate", "censor", "hreflect", "vreflect", "addexp", "shift"])
    p.add_argument("--mu", type=float, help="apply to XD(mu, lambda) instead of the generator")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--c", type=float, help="truncation or censoring point")
    p.add_argument("--m", type=float, help="reflection level, component rate or shift")
    p.add_argument("--at", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("converge", help="run a convergence experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_converge)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

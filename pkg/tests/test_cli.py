import csv
import io
import json
import math
from importlib import resources

import pytest

from xdslope.catalog import get_family
from xdslope.cli import fmt, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def example_config(tmp_path, **overrides):
    cfg = json.loads(resources.files("xdslope").joinpath("schemas/negpareto.json").read_text())
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_eval_gumbel():
    code, text = call("eval", "--family", "gumbel", "--mu", "1", "--lambda", "1", "--at", "0")
    assert code == 0
    (row,) = rows(text)
    assert float(row["G"]) == pytest.approx(math.exp(-1), rel=1e-15)
    assert float(row["h"]) == pytest.approx(1.0, rel=1e-12)
    assert float(row["dh"]) == pytest.approx(1.0, rel=1e-12)


def test_slope_mu_squared_invalid():
    code, text = call("slope", "--expr", "mu^2", "--domain", "0", "inf")
    assert code == 0
    assert rows(text)[0]["verdict"] == "INVALID"


def test_slope_family_valid(tmp_path):
    table = tmp_path / "v.csv"
    code, text = call("slope", "--family", "logistic", "--table", str(table), "--points", "7")
    assert code == 0
    assert rows(text)[0]["verdict"] == "VALID_PROPER"
    tab = rows(table.read_text())
    assert len(tab) == 7
    for r in tab:
        mu = float(r["mu"])
        assert float(r["v"]) == pytest.approx(mu * (1 - mu), abs=1e-8)


def test_converge_negpareto(tmp_path):
    code, text = call("converge", "--config", example_config(tmp_path))
    assert code == 0
    table = rows(text)
    assert [int(r["n"]) for r in table] == [10, 100, 1000, 10000]
    dist = [float(r["surv_dist"]) for r in table]
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_converge_output_path(tmp_path):
    target = tmp_path / "out.csv"
    code, text = call("converge", "--config", example_config(tmp_path, output_path=str(target)))
    assert code == 0 and text == ""
    assert target.read_text().splitlines()[0] == "n,slope_dist,surv_dist,tight,rate"


def test_converge_byte_identical(tmp_path):
    path = example_config(tmp_path, seed=3)
    assert call("converge", "--config", path) == call("converge", "--config", path)


def test_converge_from_expression(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"command": "gev", "slope_expression": "mu", "domain": [0, "inf"],
                                "mu": 0.5, "lambda": 1, "n_values": [10, 100, 1000]}))
    code, text = call("converge", "--config", str(path))
    assert code == 0
    assert len(rows(text)) == 3


@pytest.mark.parametrize("content", [
    "{not json",
    json.dumps({"command": "gev", "family": {"name": "logistic"}, "mu": 0.5, "lambda": 1}),
    json.dumps({"command": "gev", "family": {"name": "logistic"}, "mu": 0.5, "lambda": 1,
                "n_values": [10], "colour": "red"}),
    json.dumps({"command": "exp_slope", "family": {"name": "gumbel"}, "mu": 1, "lambda": 1,
                "m_values": [1]}),
    json.dumps({"command": "gev", "mu": 0.5, "lambda": 1, "n_values": [10]}),
])
def test_bad_config(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert call("converge", "--config", str(path))[0] == 2


def test_missing_config_file(tmp_path):
    assert call("converge", "--config", str(tmp_path / "nope.json"))[0] == 2


def test_catalog_list():
    code, text = call("catalog", "list")
    assert code == 0
    names = {r["name"] for r in rows(text)}
    assert {"gumbel", "logistic", "negative_pareto", "burr"} <= names


def test_reconstruct_gumbel():
    code, text = call("reconstruct", "--expr", "mu", "--domain", "0", "inf", "--mu0", "1",
                      "--points", "20")
    assert code == 0
    table = rows(text)
    assert len(table) == 20
    for r in table:
        y = float(r["y"])
        assert float(r["h"]) == pytest.approx(math.exp(y), rel=1e-6)
        assert float(r["G"]) == pytest.approx(math.exp(-math.exp(y)), rel=1e-6, abs=1e-300)


def test_sample_deterministic():
    args = ("sample", "--family", "logistic", "--mu", "0.5", "--lambda", "2", "--n", "50",
            "--seed", "11")
    first, second = call(*args), call(*args)
    assert first == second and first[0] == 0
    assert len(rows(first[1])) == 50
    other = call(*args[:-1], "12")
    assert other[1] != first[1]


def test_sample_needs_seed():
    assert call("sample", "--family", "logistic", "--mu", "0.5", "--lambda", "2", "--n", "5")[0] == 2


@pytest.mark.parametrize("family,extra", [
    ("gumbel", ("--op", "truncate", "--c", "0.5")),
    ("gumbel", ("--op", "censor", "--c", "1.0")),
    ("exp_slope_dfr", ("--op", "hreflect")),
    ("gumbel", ("--op", "vreflect", "--m", "1")),
    ("rayleigh", ("--op", "addexp", "--m", "0.3")),
    ("gumbel", ("--op", "shift", "--mu", "1", "--lambda", "1", "--m", "2")),
    ("gumbel", ("--op", "censor", "--c", "1.0", "--mu", "1", "--lambda", "3")),
])
def test_transform_ops(family, extra):
    code, text = call("transform", "--family", family, *extra, "--at", "0.2", "0.7")
    assert code == 0
    table = rows(text)
    assert len(table) == 2
    assert set(table[0]) == {"y", "G", "H", "h", "dh"}


def test_transform_truncate_keeps_hazard():
    code, text = call("transform", "--family", "neg_exponential", "--op", "truncate", "--c", "-1",
                      "--at", "-0.5")
    gen = get_family("neg_exponential").model
    r = rows(text)[0]
    assert float(r["h"]) == pytest.approx(float(gen.hazard(-0.5)), rel=1e-12)
    assert float(r["G"]) == pytest.approx(float(gen.survival(-0.5) / gen.survival(-1.0)), rel=1e-12)


def test_transform_addexp_hazard():
    gen = get_family("rayleigh").model
    code, text = call("transform", "--family", "rayleigh", "--op", "addexp", "--m", "0.3",
                      "--at", "0.5")
    assert code == 0
    assert float(rows(text)[0]["h"]) == pytest.approx(float(gen.hazard(0.5)) + 0.3, rel=1e-12)


def test_transform_missing_argument():
    assert call("transform", "--family", "gumbel", "--op", "truncate", "--at", "0")[0] == 2


def test_unknown_family():
    assert call("eval", "--family", "nosuch", "--mu", "1", "--lambda", "1", "--at", "0")[0] == 2


def test_bad_expression():
    assert call("slope", "--expr", "__import__('os')", "--domain", "0", "1")[0] == 2


def test_bad_param_syntax():
    assert call("eval", "--family", "burr", "--param", "k", "--mu", "1", "--lambda", "1",
                "--at", "0")[0] == 2


def test_eval_outside_support_gives_nan_derivative():
    code, text = call("eval", "--family", "negative_pareto", "--mu", "1", "--lambda", "1",
                      "--at", "100")
    assert code == 0
    r = rows(text)[0]
    assert r["dh"] == "nan"


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(math.inf) == "inf" and fmt(-math.inf) == "-inf" and fmt(math.nan) == "nan"
    assert float(fmt(1 / 3)) == 1 / 3


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "xdslope", "catalog", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("name,parameters\n")

import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from gammachaos import cli, experiments
from gammachaos.errors import ConfigError, NumericError
from gammachaos.experiments import ExperimentConfig, n_seed, render_csv, render_json, render_svg, run


def cfg(**kw):
    base = {"family": "concrete", "n_grid": [10, 20, 40]}
    base.update(kw)
    return ExperimentConfig.from_dict(base)


@pytest.mark.parametrize(
    "bad",
    [
        {"family": "nope"},
        {"n_grid": []},
        {"n_grid": [20, 10]},
        {"metrics": ["delta9"]},
        {"metrics": ["delta0", "delta0"]},
        {"family": "ustat", "metrics": ["dtv"]},
        {"metrics": ["mc_kolmogorov"], "mc_samples": 10},
        {"formats": ["png"]},
        {"b": 0.1},
        {"colour": "red"},
        {"family": {"name": "delta", "params": {"delta": 2.0}}},
    ],
)
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        c = cfg(**bad)
        run(c)


def test_config_nested_forms(tmp_path):
    c = cfg(family={"name": "toy2", "params": {"alpha": 0.5}}, output={"path": "x.csv", "formats": ["csv"]})
    assert c.family == "toy2" and c.family_params == {"alpha": 0.5} and c.nu == 1.0
    assert c.output_path == "x.csv" and c.formats == ["csv"]
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"family": "ustat", "n_grid": [10, 100]}))
    assert ExperimentConfig.from_json(p).nu == 1.0
    p.write_text("{oops")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(p)


def test_variance_mismatch_names_n():
    with pytest.raises(ConfigError, match=r"n = 10"):
        run(cfg(nu=1.0))


def test_kappa4_gap_rate():
    rep = run(cfg(n_grid=[10, 100, 1000], metrics=["kappa4_gap"]))
    s = rep.series_for("kappa4_gap")
    assert s.fit.slope == pytest.approx(-2.0, abs=1e-9)
    assert s.fit.r_squared > 0.999999
    for n, v in s.points:
        assert v == pytest.approx(96 / n**2, rel=1e-12)


def test_csv_round_trip():
    rep = run(cfg(metrics=["delta0", "d1", "kolmogorov"]))
    rows = list(csv.reader(io.StringIO(render_csv(rep))))
    assert rows[0] == ["n", "metric", "value"]
    got = {(int(n), m): float(v) for n, m, v in rows[1:]}
    for s in rep.series:
        for n, v in s.points:
            assert got[(n, s.metric)] == v


def test_json_report():
    rep = run(cfg(metrics=["kolmogorov", "dtv"]))
    d = json.loads(render_json(rep))
    assert d["version"] and d["config"]["family"] == "concrete"
    assert {s["metric"] for s in d["series"]} == {"kolmogorov", "dtv"}
    assert "kolmogorov" in d["details"]


def test_mc_reproducible_and_seed_split():
    c = cfg(metrics=["mc_kolmogorov"], mc_samples=5000, seed=11)
    a, b = render_json(run(c)), render_json(run(c))
    assert a == b
    c4 = cfg(metrics=["mc_kolmogorov"], mc_samples=5000, seed=11, workers=3)
    assert run(c4).series_for("mc_kolmogorov").points == run(c).series_for("mc_kolmogorov").points
    assert n_seed(11, 10) != n_seed(11, 20) and n_seed(11, 10) == n_seed(11, 10)


def test_svg_parses():
    rep = run(cfg(metrics=["delta0", "delta2"]))
    root = ET.fromstring(render_svg(rep))
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) >= 2


def test_emit_io_error(tmp_path):
    rep = run(cfg())
    with pytest.raises(OSError, match="cannot write"):
        experiments.emit(rep, "json", tmp_path / "missing" / "out.json")


# CLI


def run_cli(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_cumulants(capsys):
    code, out, _ = run_cli(["cumulants", "--spec", "[1, 1]", "--p-max", "4"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["cumulants"]["4"] == 96.0 and d["variance"] == 4.0


def test_cli_verbs(capsys, tmp_path):
    for argv in (
        ["delta", "--family", "ustat", "--n", "20"],
        ["bounds", "--family", "concrete", "--n", "10"],
        ["characterize", "--spec", "[1, 1, 1]"],
        ["dtv-example", "--n-list", "50", "100"],
        ["kolmogorov", "--family", "delta", "--n", "10", "--param", "delta=0.5", "--mc", "2000"],
        ["coeffs-verify", "--q", "3", "--s-max", "3"],
    ):
        code, out, err = run_cli(argv, capsys)
        assert code == 0, (argv, err)
        json.loads(out)
    code, out, _ = run_cli(["characterize", "--spec", "[1, 1, 1]"], capsys)
    assert json.loads(out)["is_centered_gamma"]["is_gamma"] is True
    code, out, _ = run_cli(["coeffs-verify", "--q", "3", "--s-max", "3"], capsys)
    assert json.loads(out)["witness"]["rs"] == [1, 1]


def test_cli_rates(capsys, tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"family": "concrete", "n_grid": [10, 100], "metrics": ["kappa4_gap"]}))
    out = tmp_path / "r.csv"
    assert cli.main(["rates", "--config", str(conf), "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("n,metric,value\n")
    first = out.read_text()
    cli.main(["rates", "--config", str(conf), "--format", "csv", "--out", str(out)])
    assert out.read_text() == first
    conf.write_text(
        json.dumps({"family": "ustat", "n_grid": [10, 100], "output": {"path": str(tmp_path / "u"), "formats": ["json", "svg"]}})
    )
    assert cli.main(["rates", "--config", str(conf)]) == 0
    assert (tmp_path / "u.json").exists() and (tmp_path / "u.svg").exists()


def test_cli_exit_codes(capsys, tmp_path, monkeypatch):
    assert run_cli(["bounds", "--family", "concrete", "--n", "10", "--nu", "1"], capsys)[0] == 2
    assert run_cli(["cumulants", "--spec", "[1,"], capsys)[0] == 2
    assert run_cli(["rates"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "ustat", "n_grid": [10], "metrics": ["dtv"]}))
    code, _, err = run_cli(["rates", "--config", str(bad)], capsys)
    assert code == 2 and "dtv" in err
    code, _, _ = run_cli(["delta", "--spec", "[1]", "--out", str(tmp_path / "no" / "x.json")], capsys)
    assert code == 4

    def boom(*a, **k):
        raise NumericError("quadrature did not converge", estimate=0.1, error=1.0)

    monkeypatch.setattr(cli.distances, "dtv_two_eig", boom)
    code, _, err = run_cli(["dtv-example", "--n-list", "10"], capsys)
    assert code == 3 and "estimate=0.1" in err

"""
Tests for run configuration, the command-line commands, export and charts
"""
import json

import numpy as np
import pandas as pd
import pytest
import yaml

from heatkernel.cli import Exporter, line_chart, main, plot_csv, run_checks
from heatkernel.config.schema import load_config, parse_config, parse_tolerances
from heatkernel.models import FactorKind
from heatkernel.utils import ConfigError, PlotError


def _data(config_dir, name):
    return yaml.safe_load((config_dir / name).read_text(encoding="utf-8"))


def _small_contagion(config_dir, tmp_path, steps=30):
    data = _data(config_dir, "sovereign_baseline.yaml")
    data["grid"]["steps"] = steps
    path = tmp_path / "contagion.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


# Configuration files

def test_load_quadratic_config(config_dir):
    config = load_config(config_dir / "quadratic_rates.yaml")
    assert config.factor.kind == FactorKind.QUADRATIC
    assert config.seed == 7
    assert config.bridge.dimension == 1
    assert [i.id for i in config.instruments] == ["bond_2y", "caplet_1x2", "swaption_1x3"]
    grid = np.linspace(0.0, 5.0, 11)
    assert np.max(np.abs(config.bond_model.curve(grid) - np.exp(-0.02 * grid))) < 1e-12


def test_overrides_replace_seed_and_paths(config_dir):
    config = load_config(config_dir / "quadratic_rates.yaml", {"seed": 99, "n_paths": 500})
    assert config.seed == 99
    assert config.n_paths == 500


def test_load_contagion_config(config_dir):
    config = load_config(config_dir / "sovereign_baseline.yaml")
    assert config.bond_model is None
    assert config.scenario.names == ("GER", "FRA", "ESP", "ITA")
    assert config.scenario.grid.size == 501


@pytest.mark.parametrize("edit,path", [
    (lambda d: d["bridge"][0]["prior"].update(probs=[0.25, 0.5, 0.24]), "bridge.0.prior.probs"),
    (lambda d: d["model"]["family"].update(gamma=1.0), "model.family.gamma"),
    (lambda d: d.update(colour="blue"), "colour"),
    (lambda d: d.update(horizon=-1.0), "horizon"),
], ids=["probs", "gamma", "unknown_key", "horizon"])
def test_config_errors_name_the_field(config_dir, edit, path):
    data = _data(config_dir, "quadratic_rates.yaml")
    edit(data)
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.path == path


def _with_second_component(data):
    data["bridge"].append({"law": "brownian", "sigma": 0.2, "prior": {"atoms": [0.0, 2.0], "probs": [0.6, 0.4]}})
    return data


def test_joint_prior_replaces_the_product(config_dir):
    data = _with_second_component(_data(config_dir, "quadratic_rates.yaml"))
    for component in data["bridge"]:
        del component["prior"]
    data["joint_prior"] = {"atoms": [[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0]], "probs": [0.45, 0.45, 0.10]}
    config = parse_config(data)
    prior = config.bridge.prior
    assert prior.size == 3
    assert np.array_equal(prior.support, [[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0]])
    assert np.allclose(prior.probs, [0.45, 0.45, 0.10])


def test_joint_prior_must_match_the_bridge(config_dir):
    data = _data(config_dir, "quadratic_rates.yaml")
    data["joint_prior"] = {"atoms": [[-1.0, -1.0], [1.0, 1.0]], "probs": [0.5, 0.5]}
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.path == "joint_prior.atoms"


def test_components_need_a_prior_without_joint_table(config_dir):
    data = _data(config_dir, "quadratic_rates.yaml")
    del data["bridge"][0]["prior"]
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert "prior" in str(info.value)


def test_contagion_joint_prior(config_dir):
    data = _data(config_dir, "sovereign_baseline.yaml")
    data["contagion"]["joint_prior"] = {"atoms": [[0.0] * 4 + [1.0] * 4, [1.0] * 4 + [2.0] * 4], "probs": [0.7, 0.3]}
    config = parse_config(data)
    assert config.scenario.bridge().prior.size == 2
    data["contagion"]["joint_prior"] = {"atoms": [[0.0] * 4], "probs": [1.0]}
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.path == "contagion.joint_prior.atoms"


def test_contagion_needs_a_seed(config_dir):
    data = _data(config_dir, "sovereign_baseline.yaml")
    del data["seed"]
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.path == "seed"


def test_yaml_syntax_error_reports_line(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("schema: 1\nhorizon: [5.0\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert "line" in str(info.value)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_tolerance_overrides():
    assert parse_tolerances(["mc_sigmas=5"]).mc_sigmas == 5.0
    assert parse_tolerances([]).loop_sigmas == 4.0
    with pytest.raises(ConfigError):
        parse_tolerances(["bogus=1"])
    with pytest.raises(ConfigError):
        parse_tolerances(["mc_sigmas"])
    with pytest.raises(ConfigError):
        parse_tolerances(["mc_sigmas=-1"])


# Commands

def test_curve_command(config_dir, tmp_path):
    code = main(["curve", "--config", str(config_dir / "quadratic_rates.yaml"), "--out", str(tmp_path)])
    assert code == 0
    frame = pd.read_csv(tmp_path / "curve.csv")
    assert list(frame.columns) == ["t", "P0", "f0", "f1", "b", "market"]
    assert np.max(np.abs(frame["P0"] - frame["market"])) < 1e-12


def test_price_command(config_dir, tmp_path):
    code = main(["price", "--config", str(config_dir / "quadratic_rates.yaml"), "--paths", "2000",
                 "--out", str(tmp_path)])
    assert code == 0
    frame = pd.read_csv(tmp_path / "prices.csv")
    assert list(frame["method"]) == ["monte_carlo", "closed_form", "monte_carlo", "closed_form", "monte_carlo"]
    assert np.all(frame["estimate"] > 0)


def test_simulate_command(config_dir, tmp_path):
    code = main(["simulate", "--config", str(config_dir / "quadratic_rates.yaml"), "--paths", "3",
                 "--out", str(tmp_path)])
    assert code == 0
    paths = pd.read_csv(tmp_path / "paths.csv")
    assert list(paths.columns) == ["path", "t", "component_1"]
    assert len(paths) == 3 * 201
    coefficients = pd.read_csv(tmp_path / "coefficients.csv")
    assert list(coefficients.columns) == ["t", "r", "lambda_1", "sigma_1"]


def test_simulate_is_reproducible(config_dir, tmp_path):
    args = ["simulate", "--config", str(config_dir / "quadratic_rates.yaml"), "--paths", "3", "--seed", "5"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    assert (tmp_path / "a" / "paths.csv").read_bytes() == (tmp_path / "b" / "paths.csv").read_bytes()


def _asset_config(config_dir, tmp_path, **asset):
    data = _with_second_component(_data(config_dir, "quadratic_rates.yaml"))
    data["grid"] = {"steps": 10, "end": 1.0}
    data["assets"] = [{"id": "equity", "kind": "diffusion", "maturity": 1.0, **asset}]
    path = tmp_path / "assets.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def test_asset_section_builds_models(config_dir, tmp_path):
    config = load_config(_asset_config(config_dir, tmp_path, S0=1.0, g1=0.01))
    asset = config.assets["equity"]
    assert not asset.limited_liability
    assert asset.bridge is config.bridge
    assert config.asset_maturity("equity") == 1.0


def test_asset_components_must_exist(config_dir):
    data = _data(config_dir, "quadratic_rates.yaml")
    data["assets"] = [{"id": "equity", "kind": "diffusion", "maturity": 1.0}]
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.path == "assets"


def test_simulate_reports_limited_liability_breaches(config_dir, tmp_path, caplog):
    config = _asset_config(config_dir, tmp_path, S0=-0.01, g1=50.0, limited_liability=True)
    out = tmp_path / "out"
    with caplog.at_level("WARNING"):
        code = main(["simulate", "--config", str(config), "--paths", "3", "--seed", "5", "--out", str(out)])
    assert code == 0
    frame = pd.read_csv(out / "assets.csv")
    assert list(frame.columns) == ["path", "t", "asset", "S"]
    assert len(frame) == 3 * 11
    assert np.all(frame[frame["t"] == 0.0]["S"] < 0)
    breaches = [r.getMessage() for r in caplog.records if "breaks limited liability" in r.getMessage()]
    assert breaches == ["Asset equity breaks limited liability on 3 path(s): 0, 1, 2"]


def test_price_includes_asset_claims(config_dir, tmp_path):
    config = _asset_config(config_dir, tmp_path, S0=1.0, g1=0.01)
    assert main(["price", "--config", str(config), "--paths", "2000", "--out", str(tmp_path)]) == 0
    frame = pd.read_csv(tmp_path / "prices.csv")
    row = frame[frame["id"] == "equity"].iloc[0]
    assert row["method"] == "monte_carlo"
    assert abs(row["estimate"] - 1.0) < 5 * row["se"] + 1e-12


def test_contagion_command(config_dir, tmp_path):
    config = _small_contagion(config_dir, tmp_path)
    out = tmp_path / "out"
    assert main(["contagion", "--config", str(config), "--out", str(out)]) == 0
    frame = pd.read_csv(out / "contagion.csv")
    assert len(frame) == 4 * 31
    for q in ("P", "y", "s"):
        assert (out / f"contagion_{q}.svg").is_file()


def test_verify_command(config_dir, tmp_path):
    config = str(config_dir / "quadratic_rates.yaml")
    code = main(["verify", "--config", config, "--paths", "5000", "--tol", "mc_sigmas=4", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert report["passed"]
    names = {check["name"] for check in report["checks"]}
    assert {"calibration", "martingale", "short_rate", "positivity", "quadrature", "euler"} <= names
    assert "closed_form:caplet_1x2" in names


def test_verify_fails_on_impossible_tolerance(config_dir, tmp_path):
    config = str(config_dir / "quadratic_rates.yaml")
    code = main(["verify", "--config", config, "--paths", "2000", "--tol", "loop_sigmas=1e-9",
                 "--out", str(tmp_path)])
    assert code == 1


def test_verify_scenario_checks(config_dir, tmp_path):
    config = load_config(_small_contagion(config_dir, tmp_path, steps=20))
    report = run_checks(config, parse_tolerances([]))
    assert report["passed"]
    assert [c["name"] for c in report["checks"]] == ["base_spread", "determinism", "bond_bounds"]


def test_config_problems_exit_with_code_2(config_dir, tmp_path):
    assert main(["curve", "--config", str(tmp_path / "absent.yaml"), "--out", str(tmp_path)]) == 2
    config = str(config_dir / "quadratic_rates.yaml")
    assert main(["verify", "--config", config, "--tol", "bogus=1", "--out", str(tmp_path)]) == 2
    assert main(["price", "--config", config, "--paths", "0", "--out", str(tmp_path)]) == 2


# Export and charts

def test_export_round_trips_doubles(tmp_path):
    exporter = Exporter(tmp_path)
    values = np.array([0.1 + 0.2, np.pi, 1e-300, -2.5e17])
    result = exporter.export_frame(pd.DataFrame({"t": np.arange(4.0), "v": values}), "values.csv")
    assert result["success"]
    assert result["rows"] == 4
    back = pd.read_csv(tmp_path / "values.csv", float_precision="round_trip")
    assert np.array_equal(back["v"].to_numpy(), values)


def test_export_of_empty_frame_is_reported(tmp_path):
    result = Exporter(tmp_path).export_frame(pd.DataFrame(), "empty.csv")
    assert not result["success"]


def test_export_report_serialises_numpy(tmp_path):
    exporter = Exporter(tmp_path)
    result = exporter.export_report({"value": np.float64(0.5), "flag": np.bool_(True)}, "report.json")
    assert result["success"]
    assert json.loads((tmp_path / "report.json").read_text()) == {"value": 0.5, "flag": True}


def test_charts_are_byte_identical(tmp_path):
    csv = tmp_path / "series.csv"
    pd.DataFrame({"t": np.linspace(0.0, 1.0, 21), "a": np.linspace(0.0, 1.0, 21) ** 2}).to_csv(csv, index=False)
    first = plot_csv(csv, tmp_path / "one")
    second = plot_csv(csv, tmp_path / "two")
    assert [p.name for p in first] == ["series.svg"]
    assert first[0].read_bytes() == second[0].read_bytes()


def test_plot_rejects_bad_inputs(tmp_path):
    header_only = tmp_path / "header.csv"
    header_only.write_text("t,a\n", encoding="utf-8")
    with pytest.raises(PlotError):
        plot_csv(header_only, tmp_path)
    no_time = tmp_path / "no_time.csv"
    no_time.write_text("x,a\n1,2\n", encoding="utf-8")
    with pytest.raises(PlotError):
        plot_csv(no_time, tmp_path)
    with pytest.raises(PlotError):
        line_chart({}, "empty", "value", tmp_path / "empty.svg")
    assert main(["plot", str(header_only), "--out", str(tmp_path)]) == 2

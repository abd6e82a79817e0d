"""
Tests for the sovereign contagion scenario
"""
import dataclasses

import numpy as np
import pytest

from heatkernel.lrb import LawKind
from heatkernel.models import F0F1Family
from heatkernel.pricing import bond_bounds
from heatkernel.scenario import (
    CountrySpec,
    ExposureMatrix,
    baseline_config,
    combined_debt,
    contagion_bond,
    contagion_factor,
    contagion_model,
    run_scenario,
    spread_frame,
    yield_jump_sign,
)
from heatkernel.scenario.contagion import BASELINE_EXPOSURES
from heatkernel.utils import InvalidParameterError

STEPS = 40


@pytest.fixture(scope="module")
def config():
    return baseline_config(seed=2024, steps=STEPS)


@pytest.fixture(scope="module")
def result(config):
    return run_scenario(config)


def test_baseline_exposure_table():
    weights = np.array(BASELINE_EXPOSURES)
    assert weights[0].sum() == pytest.approx(2.06)
    assert np.allclose(np.diag(weights), 1.0)
    assert weights[2].sum() == 1.0


def test_exposure_validation():
    names = ("A", "B")
    with pytest.raises(InvalidParameterError):
        ExposureMatrix(names, np.array([[1.0, 0.2], [0.1, 0.9]]))
    with pytest.raises(InvalidParameterError):
        ExposureMatrix(names, np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(InvalidParameterError):
        ExposureMatrix(names, np.eye(3))
    with pytest.raises(InvalidParameterError):
        ExposureMatrix(("A", "A"), np.eye(2))
    with pytest.raises(InvalidParameterError):
        ExposureMatrix(names, np.eye(2)).index("C")


def test_country_validation():
    family = F0F1Family(0.02, 0.001, 2.0)
    with pytest.raises(InvalidParameterError):
        CountrySpec("X", family, own_loading=1.0)
    with pytest.raises(InvalidParameterError):
        CountrySpec("", family)


def test_scenario_bridge_layout(config):
    bridge = config.bridge()
    assert bridge.dimension == 8
    assert [law.kind for law in bridge.laws[:4]] == [LawKind.BROWNIAN] * 4
    assert [law.kind for law in bridge.laws[4:]] == [LawKind.GAMMA] * 4
    assert bridge.sigma[:4] == (0.5,) * 4
    assert bridge.prior.size == 4**4 * 3**4


def test_combined_debt_uses_own_loading(config):
    debt = np.array([2.0, 3.0, 4.0, 5.0])
    value = combined_debt(config.exposures, debt, 0, own_loading=0.5)
    assert value == pytest.approx(0.5 * 2.0 + 0.57 * 4.0 + 0.49 * 5.0)
    assert combined_debt(config.exposures, debt, 0) == pytest.approx(2.0 + 0.57 * 4.0 + 0.49 * 5.0)
    with pytest.raises(InvalidParameterError):
        combined_debt(config.exposures, debt[:3], 0)


def test_contagion_factor_reads_exposed_sources(config):
    factor = contagion_factor(config, 0)
    assert factor.components == (0, 4, 6, 7)
    assert factor.weights == pytest.approx((0.5, 0.57, 0.49))
    assert factor.power == 3.0
    spain = contagion_factor(config, 2)
    assert spain.components == (2, 6)
    assert spain.weights == (0.5,)


def test_bond_starts_on_initial_curve(config):
    state = np.zeros(8)
    for j, country in enumerate(config.countries):
        model = contagion_model(config, j)
        assert contagion_bond(config, j, 0.0, 2.0, state) == pytest.approx(float(model.curve(2.0)))


def test_result_layout(result, config):
    assert list(result.columns) == ["t", "country", "P", "y", "s", "A", "L_tilde"]
    assert len(result) == 4 * (STEPS + 1)
    assert list(dict.fromkeys(result["country"])) == list(config.names)
    assert np.all(np.isfinite(result[["P", "y", "s", "A"]].to_numpy()))


def test_base_country_has_zero_spread(result):
    base = result[result["country"] == "GER"]
    assert np.all(base["s"].to_numpy() == 0.0)


def test_prices_respect_bounds(result, config):
    for j, name in enumerate(config.names):
        model = contagion_model(config, j)
        rows = result[(result["country"] == name) & (result["t"] < config.maturity)]
        for t, price in zip(rows["t"], rows["P"]):
            low, high = bond_bounds(model, float(t), config.maturity)
            assert low - 1e-12 <= price <= high + 1e-12


def test_maturity_yield_is_short_rate(result):
    final = result[result["t"] == result["t"].max()]
    assert np.all(final["P"].to_numpy() == 1.0)
    assert np.all(final["y"].to_numpy() > 0)


def test_run_is_deterministic(config, result):
    again = run_scenario(config, workers=3)
    assert result.equals(again)


def test_removing_contagion_leaves_unexposed_countries_unchanged(config, result):
    isolated = dataclasses.replace(config, exposures=config.exposures.without_contagion())
    other = run_scenario(isolated)
    for name in ("ESP", "ITA"):
        assert np.array_equal(result[result["country"] == name]["y"].to_numpy(),
                              other[other["country"] == name]["y"].to_numpy())
    assert not np.array_equal(result[result["country"] == "GER"]["y"].to_numpy(),
                              other[other["country"] == "GER"]["y"].to_numpy())


def test_many_paths_carry_a_path_column():
    frame = run_scenario(baseline_config(seed=1, steps=10, n_paths=3))
    assert frame.columns[0] == "path"
    assert sorted(frame["path"].unique()) == [0, 1, 2]
    wide = spread_frame(frame, "s")
    assert list(wide.columns) == sorted(["GER", "FRA", "ESP", "ITA"])
    assert len(wide) == 11


def test_yield_jump_sign(config):
    model = contagion_model(config, 3)
    state = np.zeros(8)
    sign = yield_jump_sign(model, 0.5, config.maturity, state)
    assert sign in (-1.0, 0.0, 1.0)


def test_scenario_validation(config):
    with pytest.raises(InvalidParameterError):
        dataclasses.replace(config, base_country="NED")
    with pytest.raises(InvalidParameterError):
        dataclasses.replace(config, grid=np.linspace(0.0, 3.0, 10))
    with pytest.raises(InvalidParameterError):
        dataclasses.replace(config, maturity=6.0)

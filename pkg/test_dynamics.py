"""
Tests for SDE coefficients and the Euler evolution of rational prices
"""
import numpy as np
import pytest

from heatkernel.dynamics import (
    CorrelationSpec,
    asset_euler,
    asset_sde_coeffs,
    bond_euler,
    bond_sde_coeffs,
    coefficient_frame,
    euler_evolve,
    nu,
    risk_neutral_increments,
    theta,
)
from heatkernel.lrb import BridgeSpec, LevyLaw, Measure, TerminalPrior, bayes_estimate, simulate
from heatkernel.models import DebtFactor, SmoothFunction
from heatkernel.pricing import AssetModel, BondModel, asset_price, bond_price, short_rate
from heatkernel.utils import GridError, InvalidParameterError

U = 5.0


def _price_at_A(model, t, T, A):
    leg = model.single_leg
    return (model.curve(T) + leg.coefficient(T) * A) / (model.curve(t) + leg.coefficient(t) * A)


def _rate_at_A(model, t, A):
    leg = model.single_leg
    slope = model.curve.derivative(t, 1) + leg.coefficient.derivative(t, 1) * A
    return -slope / (model.curve(t) + leg.coefficient(t) * A)


def test_bond_coefficients(quadratic_model):
    t, T = 1.2, 3.0
    state = np.array([0.8])
    co = bond_sde_coeffs(quadratic_model, t, T, state)
    factor = quadratic_model.single_leg.factor
    A = float(factor.A(t, state))
    v = float(factor.nu(t, state[0]))

    assert co.r == pytest.approx(float(short_rate(quadratic_model, t, state)))
    assert co.nu[0] == pytest.approx(2.0 * U * 0.8 / (U - t) ** 2)

    eps = 1e-6
    d_log_price = (np.log(_price_at_A(quadratic_model, t, T, A + eps))
                   - np.log(_price_at_A(quadratic_model, t, T, A - eps))) / (2 * eps)
    assert co.sigma_price[0] == pytest.approx(v * d_log_price, rel=1e-6)

    d_rate = (_rate_at_A(quadratic_model, t, A + eps) - _rate_at_A(quadratic_model, t, A - eps)) / (2 * eps)
    assert co.rate_vol == pytest.approx(v * d_rate, rel=1e-6)

    expected_theta = 0.3 * U / (U - t) * bayes_estimate(quadratic_model.bridge, t, state)[0]
    assert co.theta[0] == pytest.approx(expected_theta)
    assert co.lam[0] == pytest.approx(co.theta[0] - v * float(quadratic_model.single_leg.coefficient(t))
                                      / float(quadratic_model.numerator(t, t, state)))
    assert co.drift == pytest.approx(co.r + co.lam[0] * co.sigma_price[0])


def test_coefficients_are_vectorised(quadratic_model):
    states = np.array([[0.1], [0.5], [-1.0]])
    co = bond_sde_coeffs(quadratic_model, 1.0, 2.0, states)
    assert co.r.shape == (3,)
    assert co.sigma_price.shape == (3, 1)
    single = bond_sde_coeffs(quadratic_model, 1.0, 2.0, states[1])
    assert co.sigma_price[1, 0] == pytest.approx(float(single.sigma_price[0]))


def test_jump_factors_have_no_sde_coefficients(family):
    bridge = BridgeSpec(U, (LevyLaw.brownian(), LevyLaw.gamma()), TerminalPrior.point_mass([0.0, 1.0]))
    model = BondModel.first_order(DebtFactor(U), family, bridge)
    with pytest.raises(InvalidParameterError):
        bond_sde_coeffs(model, 1.0, 2.0, np.array([0.0, 0.5]))
    with pytest.raises(InvalidParameterError):
        theta(bridge, 1, 1.0, np.array([0.0, 0.5]))
    with pytest.raises(InvalidParameterError):
        nu(DebtFactor(U), 1.0, 0.0)


def test_correlation_validation():
    assert CorrelationSpec.pair(0.3).rho(0, 1) == 0.3
    with pytest.raises(InvalidParameterError):
        CorrelationSpec.pair(1.0)
    with pytest.raises(InvalidParameterError):
        CorrelationSpec(np.array([[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]]))
    with pytest.raises(InvalidParameterError):
        CorrelationSpec(np.array([[1.0, 0.2], [0.3, 1.0]]))


def test_risk_neutral_increments():
    dW = np.array([0.1, -0.2])
    assert np.allclose(risk_neutral_increments(dW, np.array([0.5, 1.0]), 0.01), [0.105, -0.19])


def test_euler_evolve_deterministic_growth():
    grid = np.linspace(0.0, 1.0, 11)
    dW = np.zeros((2, 10))

    def provider(k, t):
        return np.full(2, 0.05), np.zeros((2, 1))

    path = euler_evolve(provider, 1.0, dW, grid)
    assert np.allclose(path[:, -1], 1.005**10)


def test_euler_grid_guard(quadratic_model):
    grid = np.linspace(0.0, U, 11)
    with pytest.raises(GridError):
        euler_evolve(lambda k, t: (np.zeros(1), np.zeros((1, 1))), 1.0, np.zeros((1, 10)), grid, horizon=U)
    batch = simulate(quadratic_model.bridge, [1.0, 2.0], 5, 1, Measure.L)
    with pytest.raises(InvalidParameterError):
        bond_euler(quadratic_model, 3.0, batch)


def test_bond_euler_tracks_rational_price(quadratic_model):
    """Euler-evolved P_tT stays within 1% RMS of the rational price at t = 0.4U"""
    grid = np.linspace(0.0, 0.4 * U, 801)
    batch = simulate(quadratic_model.bridge, grid[1:], 300, 31, Measure.P)
    euler, exact = bond_euler(quadratic_model, 0.5 * U, batch)
    assert euler.shape == exact.shape == (300, 801)
    assert np.allclose(euler[:, 0], exact[:, 0])
    rms = np.sqrt(np.mean(((euler[:, -1] - exact[:, -1]) / exact[:, -1]) ** 2))
    assert rms < 0.01
    expected = bond_price(quadratic_model, 0.4 * U, 0.5 * U, batch.states(800))
    assert np.allclose(exact[:, -1], expected)


def test_asset_coefficients_and_euler(family, two_brownian_bridge):
    g1 = SmoothFunction.constant(0.01, name="g1")
    model = AssetModel.diffusion(U, SmoothFunction.constant(1.0, name="S0"), g1, family,
                                 bridge=two_brownian_bridge)
    corr = CorrelationSpec.pair(0.0)
    state = np.array([0.2, -0.4])
    co = asset_sde_coeffs(model, corr, 1.0, 2.0, state)
    assert co.sigma_price.shape == (2,)
    assert co.r == pytest.approx(float(short_rate(model.discount, 1.0, state)))

    grid = np.linspace(0.0, 0.3 * U, 601)
    batch = simulate(two_brownian_bridge, grid[1:], 200, 32, Measure.P)
    for risk_neutral in (False, True):
        euler, exact = asset_euler(model, corr, 2.0, batch, risk_neutral=risk_neutral)
        assert np.allclose(euler[:, 0], exact[:, 0])
    euler, exact = asset_euler(model, corr, 2.0, batch)
    rms = np.sqrt(np.mean(((euler[:, -1] - exact[:, -1]) / exact[:, -1]) ** 2))
    assert rms < 0.01
    assert np.allclose(exact[:, 0], asset_price(model, 0.0, 2.0, batch.states(0)))


def test_coefficient_frame(quadratic_model):
    grid = np.linspace(0.0, 2.0, 21)
    batch = simulate(quadratic_model.bridge, grid[1:], 1, 4, Measure.P)
    frame = coefficient_frame(quadratic_model, 2.0, batch.grid, batch.values[0])
    assert list(frame.columns) == ["t", "r", "lambda_1", "sigma_1"]
    assert len(frame) == 21
    assert frame["sigma_1"].iloc[-1] == pytest.approx(0.0, abs=1e-12)

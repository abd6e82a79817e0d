"""
Tests for the bridge engine: Lévy laws, priors, path samplers and measure changes
"""
import numpy as np
import pytest
from scipy import integrate, stats

from heatkernel.lrb import (
    BridgeSpec,
    LevyLaw,
    Measure,
    TerminalPrior,
    bayes_estimate,
    brownian_posterior,
    characteristic_exponent,
    check_grid,
    density,
    ell,
    ell_inverse,
    innovation_increments,
    laplace_exponent,
    m_density,
    posterior,
    sample_bridge,
    sample_increments,
    sample_terminal,
    simulate,
    simulate_under_L,
    simulate_under_M,
    simulate_under_P,
)
from heatkernel.utils import GridError, InvalidParameterError, SingularStateError, SupportError, stream


# Laws

def test_densities_match_scipy():
    """Brownian, gamma and stable-1/2 densities agree with scipy's parametrisations"""
    y = np.linspace(0.05, 6.0, 40)
    t = 0.7
    assert np.allclose(density(LevyLaw.brownian(), t, y - 3.0), stats.norm.pdf(y - 3.0, scale=np.sqrt(t)))
    law = LevyLaw.gamma(1.5)
    assert np.allclose(density(law, t, y), stats.gamma.pdf(y, a=1.5 * t))
    law = LevyLaw.stable_half(1.3)
    assert np.allclose(density(law, t, y), stats.levy.pdf(y, scale=law.stable_scale(t)))


def test_subordinator_density_vanishes_off_support():
    for law in (LevyLaw.gamma(2.0), LevyLaw.stable_half()):
        assert np.all(density(law, 1.0, np.array([-1.0, 0.0])) == 0.0)


def test_density_rejects_non_positive_time():
    with pytest.raises(InvalidParameterError):
        density(LevyLaw.brownian(), 0.0, 1.0)


def test_laplace_exponents():
    assert laplace_exponent(LevyLaw.brownian(), 2.0) == pytest.approx(-2.0)
    assert laplace_exponent(LevyLaw.gamma(3.0), 1.0) == pytest.approx(3.0 * np.log(2.0))
    assert laplace_exponent(LevyLaw.stable_half(2.0), 0.5) == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        laplace_exponent(LevyLaw.gamma(), -0.5)


@pytest.mark.parametrize("law", [LevyLaw.gamma(1.5), LevyLaw.stable_half(1.0)], ids=["gamma", "stable"])
def test_increments_reproduce_laplace_transform(law, rng):
    """E[exp(-kappa L_dt)] = exp(-psi(kappa) dt) for sampled increments"""
    kappa, dt = 0.5, 0.8
    values = np.exp(-kappa * sample_increments(law, dt, 200_000, rng))
    se = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean() - np.exp(-laplace_exponent(law, kappa) * dt)) < 4 * se


def test_invalid_law_parameters():
    with pytest.raises(InvalidParameterError):
        LevyLaw.gamma(0.0)
    with pytest.raises(InvalidParameterError):
        LevyLaw.stable_half(-1.0)


# Priors

def test_prior_probabilities_must_sum_to_one():
    with pytest.raises(InvalidParameterError):
        TerminalPrior.univariate([1.0, 2.0], [0.5, 0.49])
    with pytest.raises(InvalidParameterError):
        TerminalPrior.univariate([1.0, 2.0], [1.2, -0.2])


def test_product_prior_drops_zero_atoms():
    prior = TerminalPrior.product(
        TerminalPrior.univariate([0.0, 1.0], [1.0, 0.0]),
        TerminalPrior.univariate([2.0, 3.0], [0.5, 0.5]),
    )
    assert prior.dimension == 2
    assert prior.size == 2
    assert np.allclose(prior.mean(), [0.0, 2.5])
    marginal = prior.marginal(1)
    assert np.allclose(marginal.support.ravel(), [2.0, 3.0])
    assert np.allclose(marginal.probs, [0.5, 0.5])


def test_zero_probability_atom_outside_support_is_ignored():
    prior = TerminalPrior.univariate([-1.0, 2.0], [0.0, 1.0])
    spec = BridgeSpec(1.0, (LevyLaw.gamma(),), prior)
    assert spec.prior.size == 1


def test_atom_outside_support_is_rejected():
    with pytest.raises(SupportError):
        BridgeSpec(1.0, (LevyLaw.gamma(),), TerminalPrior.univariate([-1.0, 2.0], [0.5, 0.5]))
    with pytest.raises(SupportError):
        sample_bridge(LevyLaw.stable_half(), 1.0, 0.0, [0.5], stream(1, 0, 0))


def test_prior_dimension_must_match_laws():
    with pytest.raises(InvalidParameterError):
        BridgeSpec(1.0, (LevyLaw.brownian(), LevyLaw.gamma()), TerminalPrior.point_mass([1.0]))


# Grids

def test_check_grid():
    assert np.allclose(check_grid([0.5, 1.0], 2.0), [0.0, 0.5, 1.0])
    with pytest.raises(GridError):
        check_grid([], 2.0)
    with pytest.raises(GridError):
        check_grid([0.5, 0.5], 2.0)
    with pytest.raises(GridError):
        check_grid([0.5, 2.0], 2.0)


# Bridge samplers

def _terminal_slice(spec, grid, n=20_000, seed=5):
    batch = simulate(spec, grid, n, seed, Measure.P)
    return batch


def test_brownian_bridge_marginal():
    """A Brownian information process pinned at sigma U x is N(sigma x t, t (U - t) / U)"""
    spec = BridgeSpec(2.0, (LevyLaw.brownian(),), TerminalPrior.point_mass([1.0]), (0.5,))
    batch = _terminal_slice(spec, [1.0])
    values = batch.component(0)[:, 1]
    assert stats.kstest(values, stats.norm(loc=0.5, scale=np.sqrt(0.5)).cdf).pvalue > 1e-4


def test_gamma_bridge_marginals():
    """L_t / z of a gamma bridge is Beta(m t, m (U - t)) at every grid time"""
    spec = BridgeSpec(2.0, (LevyLaw.gamma(1.0),), TerminalPrior.point_mass([3.0]))
    batch = _terminal_slice(spec, [0.5, 1.0])
    first = batch.component(0)[:, 1] / 3.0
    second = batch.component(0)[:, 2] / 3.0
    assert stats.kstest(first, stats.beta(0.5, 1.5).cdf).pvalue > 1e-4
    assert stats.kstest(second, stats.beta(1.0, 1.0).cdf).pvalue > 1e-4
    assert np.all(np.diff(batch.component(0), axis=1) >= 0)


def test_stable_bridge_marginal():
    """One stable-1/2 bridge step has density proportional to rho_t(y) rho_(U-t)(z - y)"""
    U, z, t = 2.0, 1.5, 0.8
    law = LevyLaw.stable_half(1.0)
    spec = BridgeSpec(U, (law,), TerminalPrior.point_mass([z]))
    values = _terminal_slice(spec, [t]).component(0)[:, 1]
    assert np.all((values > 0) & (values < z))

    def bridge_density(y):
        return density(law, t, y) * density(law, U - t, z - y)

    total = integrate.quad(bridge_density, 0.0, z, limit=200)[0]
    for q in (0.3, 0.6, 0.9, 1.2):
        cdf = integrate.quad(bridge_density, 0.0, q, limit=200)[0] / total
        empirical = np.mean(values <= q)
        assert abs(empirical - cdf) < 4 * np.sqrt(cdf * (1 - cdf) / values.size) + 2e-3


def test_stable_bridge_paths_increase_to_terminal():
    path = sample_bridge(LevyLaw.stable_half(0.7), 1.0, 2.0, np.linspace(0.05, 0.95, 19), stream(3, 0, 1))
    assert path[0] == 0.0
    assert np.all(np.diff(path) >= 0)
    assert path[-1] <= 2.0


def test_single_path_samplers(brownian_bridge):
    path = simulate_under_P(brownian_bridge, [1.0, 2.0], stream(9, 0, 0))
    assert path.values.shape == (1, 3)
    assert path.terminal[0] in (-1.0, 0.0, 1.0)
    free = simulate_under_L(brownian_bridge, [1.0, 2.0], stream(9, 0, 0))
    assert free.terminal is None
    assert free.measure == Measure.L


def test_bridge_to_zero_needs_brownian_components():
    spec = BridgeSpec(1.0, (LevyLaw.gamma(),), TerminalPrior.point_mass([1.0]))
    with pytest.raises(InvalidParameterError):
        simulate(spec, [0.5], 10, 1, Measure.M)


def test_simulation_is_independent_of_worker_count(two_brownian_bridge):
    grid = np.linspace(0.1, 4.0, 12)
    one = simulate(two_brownian_bridge, grid, 300, 42, workers=1, block_size=64)
    many = simulate(two_brownian_bridge, grid, 300, 42, workers=4, block_size=64)
    assert np.array_equal(one.values, many.values)
    assert np.array_equal(one.terminal, many.terminal)
    other = simulate(two_brownian_bridge, grid, 300, 43, workers=1, block_size=64)
    assert not np.array_equal(one.values, other.values)


def test_seed_must_be_unsigned_64_bit():
    with pytest.raises(ValueError):
        stream(-1, 0, 0)
    with pytest.raises(ValueError):
        stream(2**64, 0, 0)


# Measure changes

def test_ell_starts_at_one(two_brownian_bridge):
    assert ell(two_brownian_bridge, 0.0, np.zeros(2)) == pytest.approx(1.0, abs=1e-12)


def test_density_ratios_have_unit_mean(brownian_bridge, mc_within):
    """E^P[ell_t] = E^L[1/ell_t] = E^P[dM/dP] = 1"""
    t = 2.5
    p_states = simulate(brownian_bridge, [t], 20_000, 17, Measure.P).states(1)
    l_states = simulate(brownian_bridge, [t], 20_000, 18, Measure.L).states(1)
    for values in (ell(brownian_bridge, t, p_states),
                   ell_inverse(brownian_bridge, t, l_states),
                   m_density(brownian_bridge, t, p_states)):
        se = values.std(ddof=1) / np.sqrt(values.size)
        assert mc_within(values.mean(), 1.0, se)


def test_posterior_closed_form(two_brownian_bridge):
    states = np.array([[0.3, -0.2], [1.5, 2.0], [-2.0, 0.5]])
    weights = posterior(two_brownian_bridge, 1.7, states)
    assert np.allclose(weights.sum(axis=-1), 1.0)
    assert np.allclose(weights, brownian_posterior(two_brownian_bridge, 1.7, states))


def test_bayes_estimate_starts_at_prior_mean(two_brownian_bridge):
    assert np.allclose(bayes_estimate(two_brownian_bridge, 0.0, np.zeros(2)), [0.0, 0.8])


def test_unreachable_state_is_singular():
    spec = BridgeSpec(1.0, (LevyLaw.gamma(),), TerminalPrior.point_mass([1.0]))
    with pytest.raises(SingularStateError):
        ell(spec, 0.5, np.array([2.0]))


def test_innovations_are_brownian(brownian_bridge):
    """Innovation increments along P-paths sum to N(0, t)"""
    grid = np.linspace(0.01, 2.0, 200)
    batch = simulate(brownian_bridge, grid, 4000, 23, Measure.P)
    dW = innovation_increments(batch, brownian_bridge, 0)
    assert dW.shape == (4000, 200)
    total = dW.sum(axis=1)
    assert abs(total.mean()) < 4 * total.std(ddof=1) / np.sqrt(total.size)
    assert total.var(ddof=1) == pytest.approx(2.0, rel=0.1)


def test_characteristic_exponent(rng):
    """E[exp(-i y L_dt)] = exp(-dt Psi(y)); Psi continues the Laplace exponent"""
    assert characteristic_exponent(LevyLaw.brownian(), 2.0) == pytest.approx(2.0 + 0.0j)
    law = LevyLaw.gamma(1.5)
    y, dt = 0.7, 0.8
    values = np.exp(-1j * y * sample_increments(law, dt, 100_000, rng))
    expected = np.exp(-dt * characteristic_exponent(law, y))
    assert abs(values.mean() - expected) < 4.0 / np.sqrt(values.size)
    stable = LevyLaw.stable_half(2.0)
    assert characteristic_exponent(stable, 1.0) == pytest.approx(2.0 * np.sqrt(1j) / np.sqrt(2.0))


def test_bridge_to_zero_marginal(brownian_bridge):
    """Under M a Brownian component is a standard bridge to 0: N(0, t (U - t) / U)"""
    values = simulate(brownian_bridge, [2.5], 20_000, 29, Measure.M).component(0)[:, 1]
    assert stats.kstest(values, stats.norm(scale=np.sqrt(1.25)).cdf).pvalue > 1e-4
    path = simulate_under_M(brownian_bridge, [1.0, 2.0], stream(9, 0, 0))
    assert path.measure == Measure.M
    assert path.values[0, 0] == 0.0


def test_sample_terminal_follows_prior(brownian_bridge):
    gen = stream(12, 0, 0)
    draws = np.array([sample_terminal(brownian_bridge.prior, gen)[0] for _ in range(4000)])
    assert set(np.unique(draws)) <= {-1.0, 0.0, 1.0}
    assert np.mean(draws == 0.0) == pytest.approx(0.5, abs=0.05)


def test_dependent_joint_prior_frequencies():
    """Terminal draws follow a joint table that is not a product of its marginals"""
    atoms = np.array([[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0]])
    probs = np.array([0.45, 0.45, 0.10])
    spec = BridgeSpec(5.0, (LevyLaw.brownian(), LevyLaw.brownian()), TerminalPrior(atoms, probs), (0.3, 0.2))
    n = 100_000
    batch = simulate(spec, [1.0, 4.5], n, 31, Measure.P)
    for atom, p in zip(atoms, probs):
        frequency = np.mean(np.all(batch.terminal == atom, axis=1))
        se = np.sqrt(p * (1.0 - p) / n)
        assert abs(frequency - p) < 3 * se
    assert not np.any(np.all(batch.terminal == [-1.0, 1.0], axis=1))
    late = batch.values[:, :, 1]
    assert np.corrcoef(late[:, 0], late[:, 1])[0, 1] > 0.5

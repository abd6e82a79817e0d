"""
Shared fixtures for the heat-kernel engine tests
"""
from pathlib import Path

import numpy as np
import pytest

from heatkernel.lrb import BridgeSpec, LevyLaw, TerminalPrior
from heatkernel.models import ExpQuadratic, F0F1Family, Quadratic
from heatkernel.pricing import BondModel

CONFIG_DIR = Path(__file__).parent / "configs"

HORIZON = 5.0


@pytest.fixture
def family():
    return F0F1Family(0.02, 0.001, 2.0)


@pytest.fixture
def brownian_bridge():
    """One Brownian information process, sigma 0.3, atoms {-1, 0, 1}"""
    prior = TerminalPrior.univariate([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
    return BridgeSpec(HORIZON, (LevyLaw.brownian(),), prior, (0.3,))


@pytest.fixture
def quadratic_model(family, brownian_bridge):
    return BondModel.first_order(Quadratic(HORIZON), family, brownian_bridge)


@pytest.fixture
def exp_quadratic_model(family, brownian_bridge):
    return BondModel.first_order(ExpQuadratic(HORIZON, eta=1.0), family, brownian_bridge)


@pytest.fixture
def two_brownian_bridge():
    prior = TerminalPrior.product(
        TerminalPrior.univariate([-1.0, 1.0], [0.5, 0.5]),
        TerminalPrior.univariate([0.0, 2.0], [0.6, 0.4]),
    )
    return BridgeSpec(HORIZON, (LevyLaw.brownian(), LevyLaw.brownian()), prior, (0.3, 0.2))


@pytest.fixture
def config_dir():
    return CONFIG_DIR


def within(estimate: float, exact: float, se: float, sigmas: float = 4.0) -> bool:
    """Monte-Carlo acceptance: |estimate - exact| below sigmas standard errors"""
    return abs(estimate - exact) <= sigmas * se + 1e-15


@pytest.fixture
def mc_within():
    return within


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

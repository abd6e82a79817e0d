"""
Sovereign contagion - country bond yields driven by exposure-weighted debt bridges

Each country j owns a Brownian information process (its structural factor) and a gamma
debt bridge. Country j's bond reads its own structural factor and the combination
L~(j) = sum_i w_ij L(i) of the debt bridges it is exposed to.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config.settings import settings
from ..lrb.bridge import BridgeSpec, Measure, check_grid, simulate
from ..lrb.laws import LevyLaw
from ..lrb.prior import TerminalPrior
from ..models.factors import Contagion
from ..models.families import F0F1Family
from ..pricing.bonds import BondModel, bond_price, short_rate
from ..utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountrySpec:
    """One sovereign issuer.

    own_loading is the weight c_j of the country's own debt in L~(j); the exposure
    table marks own debt with a 1 on the diagonal.
    """

    name: str
    family: F0F1Family
    sigma: float = 0.5
    a: float = 0.5
    own_loading: float = 0.5
    brownian_prior: TerminalPrior = field(default_factory=lambda: TerminalPrior.point_mass([0.0]))
    debt_prior: TerminalPrior = field(default_factory=lambda: TerminalPrior.univariate([2.0, 3.0, 4.0], [0.2, 0.4, 0.4]))

    def __post_init__(self):
        if not self.name:
            raise InvalidParameterError("country needs a name")
        if not self.sigma > 0:
            raise InvalidParameterError(f"{self.name}: sigma must be positive, got {self.sigma}")
        if self.a < 0:
            raise InvalidParameterError(f"{self.name}: a must be non-negative, got {self.a}")
        if not 0 <= self.own_loading < 1:
            raise InvalidParameterError(f"{self.name}: own debt loading must lie in [0, 1), got {self.own_loading}")
        for prior in (self.brownian_prior, self.debt_prior):
            if prior.dimension != 1:
                raise InvalidParameterError(f"{self.name}: country priors are univariate")
        if np.any(self.debt_prior.nonzero().support <= 0):
            raise InvalidParameterError(f"{self.name}: debt atoms must be positive")


@dataclass(frozen=True, eq=False)
class ExposureMatrix:
    """Row j holds the weights w_ij of exposed country j on the debt of country i."""

    countries: Tuple[str, ...]
    weights: np.ndarray
    rates: Tuple[float, ...] = ()

    def __post_init__(self):
        countries = tuple(self.countries)
        n = len(countries)
        weights = np.asarray(self.weights, dtype=float)
        rates = tuple(float(m) for m in self.rates) or tuple(1.0 for _ in countries)
        if len(set(countries)) != n:
            raise InvalidParameterError(f"duplicate country names in {countries}")
        if weights.shape != (n, n):
            raise InvalidParameterError(f"exposure matrix must be {n}x{n}, got {weights.shape}")
        if np.any(weights < 0) or np.any(weights > 1):
            raise InvalidParameterError("exposure weights must lie in [0, 1]")
        if not np.allclose(np.diag(weights), 1.0):
            raise InvalidParameterError("own-debt entries on the diagonal must be 1")
        if np.any(weights[~np.eye(n, dtype=bool)] >= 1):
            raise InvalidParameterError("cross exposures must be below 1")
        if len(rates) != n or any(not m > 0 for m in rates):
            raise InvalidParameterError("one positive debt rate m_i per country is required")
        weights.setflags(write=False)
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rates", rates)

    def index(self, country: str) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise InvalidParameterError(f"unknown country {country!r}") from None

    def row(self, j: int, own_loading: Optional[float] = None) -> np.ndarray:
        """Weights of country j, with the diagonal replaced by own_loading when given"""
        row = np.array(self.weights[j], dtype=float)
        if own_loading is not None:
            row[j] = own_loading
        return row

    def without_contagion(self) -> "ExposureMatrix":
        """Same countries with every cross exposure set to 0"""
        return ExposureMatrix(self.countries, np.eye(len(self.countries)), self.rates)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    horizon: float
    maturity: float
    grid: np.ndarray
    seed: int
    countries: Tuple[CountrySpec, ...]
    exposures: ExposureMatrix
    order: int = 2
    base_country: str = "GER"
    n_paths: int = 1
    joint_prior: Optional[TerminalPrior] = None

    def __post_init__(self):
        countries = tuple(self.countries)
        names = tuple(c.name for c in countries)
        if not 0 < self.maturity < self.horizon:
            raise InvalidParameterError(f"need 0 < T < U, got T={self.maturity}, U={self.horizon}")
        if names != self.exposures.countries:
            raise InvalidParameterError(f"exposure table lists {self.exposures.countries}, countries are {names}")
        if self.base_country not in names:
            raise InvalidParameterError(f"base country {self.base_country!r} is not among {names}")
        if self.order < 0:
            raise InvalidParameterError(f"order n must be non-negative, got {self.order}")
        if self.n_paths < 1:
            raise InvalidParameterError("n_paths must be at least 1")
        grid = check_grid(self.grid, self.horizon)
        if grid[-1] > self.maturity:
            raise InvalidParameterError(f"grid runs past the bond maturity T={self.maturity}")
        if self.joint_prior is not None and self.joint_prior.dimension != 2 * len(countries):
            raise InvalidParameterError(
                f"joint prior has dimension {self.joint_prior.dimension}, expected {2 * len(countries)}"
            )
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "grid", grid)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.exposures.countries

    def bridge(self) -> BridgeSpec:
        """Components (structural_1..n, debt_1..n)"""
        n = len(self.countries)
        laws = (LevyLaw.brownian(),) * n + tuple(LevyLaw.gamma(m) for m in self.exposures.rates)
        sigma = tuple(c.sigma for c in self.countries) + (1.0,) * n
        prior = self.joint_prior
        if prior is None:
            prior = TerminalPrior.product(*[c.brownian_prior for c in self.countries],
                                          *[c.debt_prior for c in self.countries])
        return BridgeSpec(self.horizon, laws, prior, sigma)


# Exposure table of the four-country example, row = exposed country
BASELINE_COUNTRIES = ("GER", "FRA", "ESP", "ITA")
BASELINE_EXPOSURES = (
    (1.0, 0.0, 0.57, 0.49),
    (0.0, 1.0, 0.47, 0.25),
    (0.0, 0.0, 1.0, 0.0),
    (0.0, 0.0, 0.0, 1.0),
)
BASELINE_ALPHA = {"GER": 0.02, "FRA": 0.025, "ESP": 0.04, "ITA": 0.045}
BASELINE_BROWNIAN_ATOMS = {
    "GER": (0.0, 5.0, 6.0, 7.0),
    "FRA": (0.0, 5.0, 8.0, 10.0),
    "ESP": (8.0, 10.0, 15.0, 20.0),
    "ITA": (8.0, 10.0, 15.0, 20.0),
}
BASELINE_BROWNIAN_PROBS = (0.7, 0.2, 0.05, 0.05)


def baseline_config(seed: int = 0, steps: int = 500, n_paths: int = 1) -> ScenarioConfig:
    """Four sovereigns, U = 5, two-year bonds, sigma = 0.5"""
    horizon, maturity = 5.0, 2.0
    countries = tuple(
        CountrySpec(
            name=name,
            family=F0F1Family(BASELINE_ALPHA[name], 0.001, 2.0),
            brownian_prior=TerminalPrior.univariate(BASELINE_BROWNIAN_ATOMS[name], BASELINE_BROWNIAN_PROBS),
        )
        for name in BASELINE_COUNTRIES
    )
    exposures = ExposureMatrix(BASELINE_COUNTRIES, np.array(BASELINE_EXPOSURES))
    grid = np.linspace(0.0, maturity, steps + 1)
    return ScenarioConfig(horizon, maturity, grid, seed, countries, exposures, n_paths=n_paths)


def combined_debt(exposures: ExposureMatrix, debt_values, j: int, own_loading: Optional[float] = None) -> np.ndarray:
    """L~(j) = sum_i w_ij L(i); debt_values has the debt sources on its first axis"""
    debt_values = np.asarray(debt_values, dtype=float)
    n = len(exposures.countries)
    if debt_values.shape[0] != n:
        raise InvalidParameterError(f"expected {n} debt paths, got {debt_values.shape[0]}")
    if not 0 <= j < n:
        raise InvalidParameterError(f"country index {j} out of range")
    return np.tensordot(exposures.row(j, own_loading), debt_values, axes=1)


def contagion_factor(config: ScenarioConfig, j: int) -> Contagion:
    """A of country j over its structural component and the debt sources it is exposed to"""
    n = len(config.countries)
    country = config.countries[j]
    row = config.exposures.row(j, country.own_loading)
    sources = [i for i in range(n) if row[i] > 0]
    return Contagion(
        horizon=config.horizon,
        a=country.a,
        weights=tuple(row[i] for i in sources),
        rates=tuple(config.exposures.rates[i] for i in sources),
        n=config.order,
        components=(j,) + tuple(n + i for i in sources),
    )


def contagion_model(config: ScenarioConfig, j: int, bridge: Optional[BridgeSpec] = None) -> BondModel:
    return BondModel.first_order(contagion_factor(config, j), config.countries[j].family, bridge)


def contagion_bond(config: ScenarioConfig, j: int, t: float, T: float, state) -> np.ndarray:
    """P_tT of country j at the full scenario state (..., 2n)"""
    return bond_price(contagion_model(config, j), t, T, state)


def yield_jump_sign(model: BondModel, t: float, T: float, state) -> np.ndarray:
    """Sign of the yield move caused by an upward move of A: sign(b(t)/D - b(T)/N)"""
    leg = model.single_leg
    A = leg.factor.A(t, state)
    D = model.curve(t) + leg.coefficient(t) * A
    N = model.curve(T) + leg.coefficient(T) * A
    return np.sign(leg.coefficient(t) / D - leg.coefficient(T) / N)


def _yield(model: BondModel, t: float, T: float, state) -> Tuple[np.ndarray, np.ndarray]:
    if t == T:
        price = np.ones(np.shape(state)[:-1])
        return price, short_rate(model, t, state)
    price = bond_price(model, t, T, state)
    return price, -np.log(price) / (T - t)


def run_scenario(config: ScenarioConfig, workers: Optional[int] = None) -> pd.DataFrame:
    """Simulate the scenario under P and tabulate P, y and s per country.

    Columns: t, country, P, y, s, A, L_tilde, plus path when n_paths > 1.
    """
    bridge = config.bridge()
    batch = simulate(bridge, config.grid, config.n_paths, config.seed, Measure.P,
                     workers=workers or settings.workers)
    n = len(config.countries)
    T = config.maturity
    logger.info(f"Simulated {config.n_paths} scenario paths for {', '.join(config.names)}")

    yields, frames = {}, []
    for j, country in enumerate(config.countries):
        model = contagion_model(config, j, bridge)
        factor = model.single_leg.factor
        debt = batch.values[:, n:, :]
        L_tilde = combined_debt(config.exposures, np.moveaxis(debt, 1, 0), j, country.own_loading)
        P = np.empty((batch.n_paths, batch.grid.size))
        y = np.empty_like(P)
        A = np.empty_like(P)
        for k, t in enumerate(batch.grid):
            state = batch.states(k)
            P[:, k], y[:, k] = _yield(model, float(t), T, state)
            A[:, k] = factor.A(t, state)
        yields[country.name] = y
        frames.append((country.name, P, y, A, L_tilde))

    base = yields[config.base_country]
    paths = np.repeat(np.arange(batch.n_paths), batch.grid.size)
    times = np.tile(batch.grid, batch.n_paths)
    rows = []
    for name, P, y, A, L_tilde in frames:
        frame = pd.DataFrame({
            "path": paths,
            "t": times,
            "country": name,
            "P": P.ravel(),
            "y": y.ravel(),
            "s": (y - base).ravel(),
            "A": A.ravel(),
            "L_tilde": L_tilde.ravel(),
        })
        rows.append(frame)
    result = pd.concat(rows, ignore_index=True)
    if config.n_paths == 1:
        result = result.drop(columns="path")
    return result


def spread_frame(result: pd.DataFrame, quantity: str = "y") -> pd.DataFrame:
    """Wide table of one quantity with a column per country (first path only)"""
    if "path" in result.columns:
        result = result[result["path"] == 0]
    return result.pivot(index="t", columns="country", values=quantity)

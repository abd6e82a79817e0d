"""
Euler-Maruyama evolution of price SDEs along simulated information paths
"""
import logging
from typing import Callable, Optional, Tuple

import numpy as np

from ..config.settings import settings
from ..lrb.bridge import Measure, PathBatch
from ..lrb.measures import innovation_increments
from ..pricing.assets import AssetModel, asset_price
from ..pricing.bonds import BondModel, bond_price
from ..utils.errors import GridError, InvalidParameterError, ModelViolationError
from .coefficients import CorrelationSpec, asset_sde_coeffs, bond_sde_coeffs, risk_neutral_increments

logger = logging.getLogger(__name__)

# provider(k, t) -> (relative drift (n,), relative volatility (n, m))
Provider = Callable[[int, float], Tuple[np.ndarray, np.ndarray]]


def check_euler_grid(grid: np.ndarray, horizon: float) -> None:
    limit = horizon * (1.0 - settings.euler_guard)
    if grid[-1] > limit:
        raise GridError(f"Euler grid reaches {grid[-1]:g}; coefficients are singular beyond U - {settings.euler_guard:g}U")


def euler_evolve(provider: Provider, x0, dW, grid, horizon: Optional[float] = None) -> np.ndarray:
    """X_{k+1} = X_k (1 + mu_k dt_k + sigma_k . dW_k); dW is (n, G-1) or (n, m, G-1)"""
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    if np.any(dt <= 0):
        raise GridError("Euler grid must be strictly increasing")
    if horizon is not None:
        check_euler_grid(grid, horizon)
    dW = np.asarray(dW, dtype=float)
    if dW.ndim == 2:
        dW = dW[:, None, :]
    n = dW.shape[0]
    out = np.empty((n, grid.size))
    out[:, 0] = np.broadcast_to(np.asarray(x0, dtype=float), (n,))
    for k in range(grid.size - 1):
        mu, sigma = provider(k, grid[k])
        sigma = np.asarray(sigma, dtype=float).reshape(n, -1)
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ModelViolationError(f"SDE coefficients blow up at t={grid[k]:g}")
        out[:, k + 1] = out[:, k] * (1.0 + mu * dt[k] + np.sum(sigma * dW[:, :, k], axis=1))
    return out


def _check_batch(batch: PathBatch, T: float, horizon: float) -> None:
    if batch.measure != Measure.P:
        raise InvalidParameterError("Euler evolution runs along P-paths")
    if batch.grid[-1] > T:
        raise GridError(f"grid runs past the maturity T={T:g}")
    check_euler_grid(batch.grid, horizon)


def bond_euler(model: BondModel, T: float, batch: PathBatch) -> Tuple[np.ndarray, np.ndarray]:
    """(Euler path, direct rational path) of P_tT, each (n, G)"""
    _check_batch(batch, T, model.horizon)
    component = model.single_leg.factor.components[0]
    dW = innovation_increments(batch, model.bridge, component)

    def provider(k, t):
        co = bond_sde_coeffs(model, t, T, batch.states(k))
        return co.drift, co.sigma_price

    x0 = bond_price(model, 0.0, T, batch.states(0))
    euler = euler_evolve(provider, x0, dW, batch.grid)
    exact = np.stack([bond_price(model, t, T, batch.states(k)) for k, t in enumerate(batch.grid)], axis=1)
    return euler, exact


def asset_euler(model: AssetModel, corr: CorrelationSpec, T: float, batch: PathBatch,
                risk_neutral: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """(Euler path, direct rational path) of S_tT; risk_neutral evolves dS/S = r dt + Sigma . dW^Q"""
    _check_batch(batch, T, model.horizon)
    drivers = (model.numerator.components[0], model.discount.single_leg.factor.components[0])
    dW = np.stack([innovation_increments(batch, model.bridge, c) for c in drivers], axis=1)
    dt = np.diff(batch.grid)

    def provider(k, t):
        co = asset_sde_coeffs(model, corr, t, T, batch.states(k))
        if risk_neutral:
            # dW^Q = dW^P + lambda dt, so sigma . dW^Q carries the lambda . Sigma drift
            dW[:, :, k] = risk_neutral_increments(dW[:, :, k], co.lam, dt[k])
            return co.r, co.sigma_price
        return co.drift, co.sigma_price

    x0 = asset_price(model, 0.0, T, batch.states(0))
    euler = euler_evolve(provider, x0, dW, batch.grid)
    exact = np.stack([asset_price(model, t, T, batch.states(k)) for k, t in enumerate(batch.grid)], axis=1)
    return euler, exact

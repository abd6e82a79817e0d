"""
Density ratios between P, L and M: ell, posteriors, Bayes estimates and innovations
"""
import logging
from typing import Union

import numpy as np
from scipy.special import logsumexp

from ..utils.errors import InvalidParameterError, SingularStateError
from .bridge import BridgeSpec, LrbPath, PathBatch
from .laws import LawKind, log_density

logger = logging.getLogger(__name__)


def _check_time(spec: BridgeSpec, t: float) -> None:
    if t < 0 or t >= spec.horizon:
        raise InvalidParameterError(f"time {t} outside [0, U) with U={spec.horizon}")


def _log_terms(spec: BridgeSpec, t: float, state, terminal: np.ndarray, log_probs: np.ndarray) -> np.ndarray:
    """log p_k + sum_i log[rho_{U-t}(z_ki - x_i) / rho_U(z_ki)], shape (..., K)"""
    _check_time(spec, t)
    state = np.asarray(state, dtype=float)
    if state.shape[-1] != spec.dimension:
        raise InvalidParameterError(f"state has {state.shape[-1]} components, expected {spec.dimension}")
    out = np.broadcast_to(log_probs, state.shape[:-1] + log_probs.shape).copy()
    for i, law in enumerate(spec.laws):
        z = terminal[:, i]
        x = state[..., i, None]
        out += log_density(law, spec.horizon - t, z - x) - log_density(law, spec.horizon, z)
    return out


def _prior_terms(spec: BridgeSpec, t: float, state) -> np.ndarray:
    return _log_terms(spec, t, state, spec.pinned_terminal(), np.log(spec.prior.probs))


def _log_normaliser(terms: np.ndarray) -> np.ndarray:
    total = logsumexp(terms, axis=-1)
    if np.any(~np.isfinite(total)):
        raise SingularStateError("density ratio vanishes: state unreachable from every terminal atom")
    return total


def ell_inverse(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """1/ell_t = dP/dL restricted to time t"""
    return np.exp(_log_normaliser(_prior_terms(spec, t, state)))


def ell(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """ell_t = dL/dP restricted to time t; ell_0 = 1"""
    return np.exp(-_log_normaliser(_prior_terms(spec, t, state)))


def posterior(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """Posterior probabilities of the terminal atoms given the state at t, shape (..., K)"""
    terms = _prior_terms(spec, t, state)
    return np.exp(terms - _log_normaliser(terms)[..., None])


def bayes_estimate(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """E^P[X_U | L_t = state] in terms of the raw atoms"""
    return posterior(spec, t, state) @ spec.prior.support


def brownian_posterior(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """Posterior weights p_k exp[U/(U-t) (sigma x_k L - sigma^2 x_k^2 t / 2)] for all-Brownian specs"""
    if not spec.all_brownian:
        raise InvalidParameterError("closed-form weights need Brownian components only")
    _check_time(spec, t)
    state = np.asarray(state, dtype=float)
    sigma = np.asarray(spec.sigma)
    x = spec.prior.support
    expo = (sigma * x)[None, :, :] * state[..., None, :] - 0.5 * (sigma * x)[None, :, :] ** 2 * t
    log_w = np.log(spec.prior.probs) + spec.horizon / (spec.horizon - t) * expo.sum(axis=-1)
    log_w = log_w.reshape(state.shape[:-1] + (spec.prior.size,))
    return np.exp(log_w - _log_normaliser(log_w)[..., None])


def m_density(spec: BridgeSpec, t: float, state) -> np.ndarray:
    """dM/dP at time t, where M pins every Brownian component at 0"""
    if not spec.all_brownian:
        raise InvalidParameterError("the bridge-to-zero measure M needs Brownian components only")
    origin = np.zeros((1, spec.dimension))
    to_zero = _log_terms(spec, t, state, origin, np.zeros(1))[..., 0]
    return np.exp(to_zero - _log_normaliser(_prior_terms(spec, t, state)))


def innovation_increments(path: Union[LrbPath, PathBatch], spec: BridgeSpec, component: int) -> np.ndarray:
    """Increments of the P-Brownian motion driving a Brownian information component.

    dW = dL - (sigma U E[X | L_t] - L_t) / (U - t) dt, on consecutive grid points.
    """
    if spec.laws[component].kind != LawKind.BROWNIAN:
        raise InvalidParameterError(f"component {component} is not a Brownian information process")
    values = np.asarray(path.values, dtype=float)
    single = values.ndim == 2
    if single:
        values = values[None]
    grid = path.grid
    U = spec.horizon
    sigma = spec.sigma[component]
    out = np.empty((values.shape[0], grid.size - 1))
    for k in range(grid.size - 1):
        t, dt = grid[k], grid[k + 1] - grid[k]
        estimate = bayes_estimate(spec, t, values[:, :, k])[:, component]
        level = values[:, component, k]
        drift = (sigma * U * estimate - level) / (U - t)
        out[:, k] = values[:, component, k + 1] - level - drift * dt
    return out[0] if single else out

"""
SDE coefficients - short rate, market price of risk and price/forward volatilities

For a Gaussian factor dA = nu (dW^P + theta dt), so the rational prices are Ito processes
whose coefficients follow from the (b, A) representation. Jump-driven factors have none.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..lrb.bridge import BridgeSpec
from ..lrb.laws import LawKind
from ..lrb.measures import bayes_estimate
from ..models.factors import RationalFactorModel
from ..pricing.assets import AssetModel
from ..pricing.bonds import BondModel
from ..utils.errors import InvalidParameterError, ModelViolationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SdeCoefficients:
    """Coefficients at one time; vectors have one entry per driving Brownian motion.

    rate_drift and rate_vol are the drift and volatility of dr_t.
    """

    r: np.ndarray
    lam: np.ndarray
    sigma_price: np.ndarray
    sigma_fwd: np.ndarray
    theta: np.ndarray
    nu: np.ndarray
    rate_drift: Optional[np.ndarray] = None
    rate_vol: Optional[np.ndarray] = None

    @property
    def drift(self) -> np.ndarray:
        """r + lambda . Sigma, the relative P-drift of the price"""
        return self.r + np.sum(self.lam * self.sigma_price, axis=-1)


@dataclass(frozen=True, eq=False)
class CorrelationSpec:
    """Correlations rho_ij between the P-Brownian drivers"""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if rho.shape[0] != rho.shape[1]:
            raise InvalidParameterError("correlation matrix must be square")
        if not np.allclose(rho, rho.T, atol=1e-12):
            raise InvalidParameterError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(rho), 1.0, atol=1e-12):
            raise InvalidParameterError("correlation matrix needs a unit diagonal")
        off = rho[~np.eye(rho.shape[0], dtype=bool)]
        if np.any(off < -1.0) or np.any(off >= 1.0):
            raise InvalidParameterError("correlations must lie in [-1, 1)")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-12:
            raise InvalidParameterError("correlation matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pair(cls, rho: float) -> "CorrelationSpec":
        return cls(np.array([[1.0, rho], [rho, 1.0]]))

    @classmethod
    def independent(cls, k: int) -> "CorrelationSpec":
        return cls(np.eye(k))

    def rho(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])


def theta(spec: BridgeSpec, component: int, t: float, state) -> np.ndarray:
    """sigma U / (U - t) E^P[X_U | L_t] for a Brownian information component"""
    if spec.laws[component].kind != LawKind.BROWNIAN:
        raise InvalidParameterError(f"component {component} is not a Brownian information process")
    estimate = bayes_estimate(spec, t, state)[..., component]
    return spec.sigma[component] * spec.horizon / (spec.horizon - t) * estimate


def nu(model: RationalFactorModel, t: float, L) -> np.ndarray:
    """Diffusion loading of A, dA = nu (dW^P + theta dt)"""
    if t < 0 or t >= model.horizon:
        raise InvalidParameterError(f"nu is defined for 0 <= t < U, got {t}")
    return model.nu(t, L)


def _gaussian_factor(factor: RationalFactorModel) -> int:
    if not factor.gaussian:
        raise InvalidParameterError(f"{factor.kind.value} is jump-driven and has no SDE coefficients")
    return factor.components[0]


def _bridge(bridge: Optional[BridgeSpec]) -> BridgeSpec:
    if bridge is None:
        raise InvalidParameterError("SDE coefficients need the model's bridge for theta")
    return bridge


def bond_sde_coeffs(model: BondModel, t: float, T: float, state) -> SdeCoefficients:
    """dP/P = (r + lambda Omega) dt + Omega dW^P for a first-order Gaussian bond model"""
    if not 0 <= t <= T < model.horizon:
        raise InvalidParameterError(f"need 0 <= t <= T < U, got t={t}, T={T}")
    leg = model.single_leg
    bridge = _bridge(model.bridge)
    c = _gaussian_factor(leg.factor)
    state = np.asarray(state, dtype=float)
    A = leg.factor.A(t, state)
    L = state[..., c]
    P0, b = model.curve, leg.coefficient

    D = P0(t) + b(t) * A
    N = P0(T) + b(T) * A
    if np.any(D <= 0) or np.any(N <= 0):
        raise ModelViolationError(f"bond numerator is not positive at t={t:g}")
    th = theta(bridge, c, t, state)
    v = nu(leg.factor, t, L)

    r = -(P0.derivative(t, 1) + b.derivative(t, 1) * A) / D
    lam = th - v * b(t) / D
    omega = v * (b(T) / N - b(t) / D)
    sigma_fwd = -v * (b.derivative(T, 1) * P0(T) - P0.derivative(T, 1) * b(T)) / N**2

    # short rate r = g(t, A)
    slope = b.derivative(t, 1) * P0(t) - P0.derivative(t, 1) * b(t)
    g_t = -(P0.derivative(t, 2) + b.derivative(t, 2) * A) / D + r**2
    g_A = -slope / D**2
    g_AA = 2.0 * b(t) * slope / D**3
    rate_drift = g_t + g_A * v * th + 0.5 * g_AA * v**2
    rate_vol = g_A * v

    return SdeCoefficients(
        r=np.asarray(r),
        lam=np.asarray(lam)[..., None],
        sigma_price=np.asarray(omega)[..., None],
        sigma_fwd=np.asarray(sigma_fwd)[..., None],
        theta=np.asarray(th)[..., None],
        nu=np.asarray(v)[..., None],
        rate_drift=np.asarray(rate_drift),
        rate_vol=np.asarray(rate_vol),
    )


def asset_sde_coeffs(model: AssetModel, corr: CorrelationSpec, t: float, T: float, state) -> SdeCoefficients:
    """dS/S = (r + lambda . Sigma) dt + Sigma . dW^P with drivers (numerator, discount)"""
    if not 0 <= t <= T < model.horizon:
        raise InvalidParameterError(f"need 0 <= t <= T < U, got t={t}, T={T}")
    if corr.matrix.shape != (2, 2):
        raise InvalidParameterError("asset dynamics take a 2x2 correlation matrix")
    bridge = _bridge(model.bridge)
    leg = model.discount.single_leg
    c1 = _gaussian_factor(model.numerator)
    c2 = _gaussian_factor(leg.factor)
    state = np.asarray(state, dtype=float)
    A1 = model.numerator.A(t, state)
    A2 = leg.factor.A(t, state)
    P0, b2, b1 = model.discount.curve, leg.coefficient, model.b1

    D = P0(t) + b2(t) * A2
    S = model.S0(T) + b1(T) * A1
    if np.any(D <= 0):
        raise ModelViolationError(f"asset denominator is not positive at t={t:g}")
    th1, th2 = theta(bridge, c1, t, state), theta(bridge, c2, t, state)
    v1, v2 = nu(model.numerator, t, state[..., c1]), nu(leg.factor, t, state[..., c2])

    r = -(P0.derivative(t, 1) + b2.derivative(t, 1) * A2) / D
    lam = np.stack([th1 - corr.rho(0, 1) * v2 * b2(t) / D, th2 - v2 * b2(t) / D], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.stack([b1(T) * v1 / S, -b2(t) * v2 / D], axis=-1)
    N = P0(T) + b2(T) * A2
    fwd = -v2 * (b2.derivative(T, 1) * P0(T) - P0.derivative(T, 1) * b2(T)) / N**2
    sigma_fwd = np.stack([np.zeros_like(fwd), fwd], axis=-1)

    return SdeCoefficients(
        r=np.asarray(r),
        lam=lam,
        sigma_price=sigma,
        sigma_fwd=sigma_fwd,
        theta=np.stack([th1, th2], axis=-1),
        nu=np.stack([v1, v2], axis=-1),
    )


def risk_neutral_increments(dW_P, lam, dt) -> np.ndarray:
    """dW^Q = dW^P + lambda dt"""
    return np.asarray(dW_P, dtype=float) + np.asarray(lam, dtype=float) * np.asarray(dt, dtype=float)


def coefficient_frame(model, T: float, grid: Sequence[float], path_values, corr: Optional[CorrelationSpec] = None
                      ) -> pd.DataFrame:
    """Coefficient series (t, r, lambda_1..k, sigma_1..k) along one path, values (d, G)"""
    values = np.asarray(path_values, dtype=float)
    rows = []
    for k, t in enumerate(grid):
        if t > T:
            break
        if isinstance(model, AssetModel):
            co = asset_sde_coeffs(model, corr or CorrelationSpec.independent(2), t, T, values[:, k])
        else:
            co = bond_sde_coeffs(model, t, T, values[:, k])
        row = {"t": float(t), "r": float(co.r)}
        for i, value in enumerate(np.atleast_1d(co.lam)):
            row[f"lambda_{i + 1}"] = float(value)
        for i, value in enumerate(np.atleast_1d(co.sigma_price)):
            row[f"sigma_{i + 1}"] = float(value)
        rows.append(row)
    return pd.DataFrame(rows)

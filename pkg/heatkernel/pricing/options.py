"""
Closed-form caplets and swaptions for the quadratic and exponential-quadratic classes

Both instruments reduce to E^M[(alpha + beta A_t)^+ | L_s]: for a caplet
alpha = K P0(t) - P0(T), beta = K b(t) - b(T); for a payer swaption
alpha = P0(t) - P0(T_n) - K sum P0(T_i), beta = b(t) - b(T_n) - K sum b(T_i).
"""
import logging
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..models.factors import FactorKind, RationalFactorModel
from ..utils.errors import InvalidParameterError, ModelViolationError
from .bonds import BondModel

logger = logging.getLogger(__name__)

# |beta| at or below this fraction of the coefficient scale selects the zero branch
ZERO_BRANCH = 1e-14

CLOSED_FORM_KINDS = (FactorKind.QUADRATIC, FactorKind.EXP_QUADRATIC)


def _check_kind(factor: RationalFactorModel) -> None:
    if factor.kind not in CLOSED_FORM_KINDS:
        raise InvalidParameterError(f"no closed form for {factor.kind.value}; use mc_price")


def _quadratic_time0(U: float, t: float, alpha: float, beta: float) -> float:
    """A_t = c (Z^2 - 1) with c = t / (U - t)"""
    c = t / (U - t)
    if beta > 0:
        kappa2 = 1.0 - alpha / (beta * c)
        if kappa2 <= 0:
            return alpha
        kappa = np.sqrt(kappa2)
        return 2.0 * alpha * norm.cdf(-kappa) + 2.0 * beta * c * kappa * norm.pdf(kappa)
    kappa2 = 1.0 + alpha / (-beta * c)
    if kappa2 <= 0:
        return 0.0
    kappa = np.sqrt(kappa2)
    return alpha * (2.0 * norm.cdf(kappa) - 1.0) + 2.0 * (-beta) * c * kappa * norm.pdf(kappa)


def _exp_quadratic_time0(U: float, t: float, alpha: float, beta: float) -> float:
    """A_t = s exp(theta Z^2) - 1 with s = sqrt(1 - t/U), theta = t / (2U)"""
    s = np.sqrt(1.0 - t / U)
    theta = t / (2.0 * U)
    if beta > 0:
        r = 1.0 - alpha / beta
        if r <= s:
            return alpha
        nu = np.sqrt(np.log(r / s) / theta)
        return 2.0 * alpha * norm.cdf(-nu) + 2.0 * beta * (norm.cdf(-s * nu) - norm.cdf(-nu))
    r = 1.0 + alpha / (-beta)
    if r <= s:
        return 0.0
    nu = np.sqrt(np.log(r / s) / theta)
    return alpha * (2.0 * norm.cdf(nu) - 1.0) + 2.0 * (-beta) * (norm.cdf(nu) - norm.cdf(s * nu))


def _truncated_moments(mu: float, var: float, lo: float, hi: float) -> Tuple[float, float]:
    """(P, E[L^2 1]) for L ~ N(mu, var) on (lo, hi)"""
    sd = np.sqrt(var)
    a = (lo - mu) / sd
    b = (hi - mu) / sd
    prob = norm.cdf(b) - norm.cdf(a)
    pa, pb = norm.pdf(a), norm.pdf(b)
    apa = a * pa if np.isfinite(a) else 0.0
    bpb = b * pb if np.isfinite(b) else 0.0
    second = mu**2 * prob + 2.0 * mu * sd * (pa - pb) + var * (prob + apa - bpb)
    return prob, second


def _tilted_mass(lam: float, mu: float, var: float, lo: float, hi: float) -> float:
    """E[exp(lam L^2) 1_(lo, hi)] for L ~ N(mu, var), 1 - 2 lam var > 0"""
    k = 1.0 - 2.0 * lam * var
    centre = mu / k
    sd = np.sqrt(var / k)
    mass = norm.cdf((hi - centre) / sd) - norm.cdf((lo - centre) / sd)
    return np.exp(lam * mu**2 / k) / np.sqrt(k) * mass


def _regions(threshold: Optional[float], outside: bool):
    """Intervals of L where L^2 > threshold (outside) or L^2 < threshold"""
    if outside:
        if threshold is None:
            return [(-np.inf, np.inf)]
        k = np.sqrt(threshold)
        return [(-np.inf, -k), (k, np.inf)]
    k = np.sqrt(threshold)
    return [(-k, k)]


def _quadratic_conditional(U: float, s: float, L: float, t: float, alpha: float, beta: float) -> float:
    tau = U - t
    p = alpha - beta * t / tau
    q = beta * U / tau**2
    mu = L * (U - t) / (U - s)
    var = (t - s) * (U - t) / (U - s)
    if q > 0:
        level = -p / q
        intervals = _regions(level if level > 0 else None, outside=True)
    else:
        level = p / -q
        if level <= 0:
            return 0.0
        intervals = _regions(level, outside=False)
    total = 0.0
    for lo, hi in intervals:
        prob, second = _truncated_moments(mu, var, lo, hi)
        total += p * prob + q * second
    return max(total, 0.0)


def _exp_quadratic_conditional(U: float, s: float, L: float, t: float, alpha: float, beta: float) -> float:
    tau = U - t
    lam = 1.0 / (2.0 * tau)
    p = alpha - beta
    q = beta * np.sqrt(tau / U)
    mu = L * (U - t) / (U - s)
    var = (t - s) * (U - t) / (U - s)
    if q > 0:
        level = -p / q
        intervals = _regions(np.log(level) / lam if level > 1 else None, outside=True)
    else:
        level = p / -q
        if level <= 1:
            return 0.0
        intervals = _regions(np.log(level) / lam, outside=False)
    total = 0.0
    for lo, hi in intervals:
        prob, _ = _truncated_moments(mu, var, lo, hi)
        total += p * prob + q * _tilted_mass(lam, mu, var, lo, hi)
    return max(total, 0.0)


def expected_positive_part(factor: RationalFactorModel, t: float, alpha: float, beta: float,
                           scale: float, s: float = 0.0, L: float = 0.0) -> float:
    """E^M[(alpha + beta A_t)^+ | L_s = L], zero when |beta| <= ZERO_BRANCH * scale"""
    _check_kind(factor)
    U = factor.horizon
    if abs(beta) <= ZERO_BRANCH * scale:
        return 0.0
    if s == 0.0 and L == 0.0:
        if factor.kind == FactorKind.QUADRATIC:
            return float(_quadratic_time0(U, t, alpha, beta))
        return float(_exp_quadratic_time0(U, t, alpha, beta))
    if factor.kind == FactorKind.QUADRATIC:
        return float(_quadratic_conditional(U, s, L, t, alpha, beta))
    return float(_exp_quadratic_conditional(U, s, L, t, alpha, beta))


def _rebase(factor: RationalFactorModel, P0: Any, b: Any, s: float, state) -> Tuple[float, float]:
    """(L_s, P0(s) + b(s) A_s) for pricing at s > 0"""
    if s == 0.0:
        return 0.0, 1.0
    if state is None:
        raise InvalidParameterError("pricing after time 0 needs the LRB state at s")
    L = float(factor.select(state)[..., 0])
    denominator = float(P0(s) + b(s) * factor.A(s, state))
    if denominator <= 0:
        raise ModelViolationError(f"P0(s) + b(s) A_s is not positive at s={s:g}")
    return L, denominator


def caplet_price_closed(factor: RationalFactorModel, K: float, t: float, T: float, P0: Any, b: Any,
                        s: float = 0.0, state=None) -> float:
    """Caplet (put on P_tT with strike K) at time s <= t, for the quadratic classes"""
    _check_kind(factor)
    if K <= 0:
        raise InvalidParameterError(f"strike must be positive, got {K}")
    if not 0 <= s <= t < T < factor.horizon:
        raise InvalidParameterError(f"need 0 <= s <= t < T < U, got s={s}, t={t}, T={T}")
    alpha = K * float(P0(t)) - float(P0(T))
    beta = K * float(b(t)) - float(b(T))
    scale = abs(K * float(b(t))) + abs(float(b(T)))
    L, denominator = _rebase(factor, P0, b, s, state)
    if s == t:
        A = 0.0 if t == 0 else float(factor.A(t, state))
        return max(alpha + beta * A, 0.0) / denominator
    return expected_positive_part(factor, t, alpha, beta, scale, s, L) / denominator


def _check_schedule(t: float, resets: Sequence[float], horizon: float) -> np.ndarray:
    resets = np.asarray(resets, dtype=float).ravel()
    if resets.size == 0:
        raise InvalidParameterError("swaption needs at least one reset date after t")
    if resets[0] <= t or np.any(np.diff(resets) <= 0) or resets[-1] >= horizon:
        raise InvalidParameterError(f"reset dates must increase from t={t} and stay below U={horizon}")
    return resets


def swaption_price_closed(factor: RationalFactorModel, K: float, t: float, resets: Sequence[float],
                          P0: Any, b: Any, s: float = 0.0, state=None) -> float:
    """Payer swaption with maturity t = T_0 and resets T_1..T_n, unit notional and year fraction"""
    _check_kind(factor)
    if K <= 0:
        raise InvalidParameterError(f"strike must be positive, got {K}")
    resets = _check_schedule(t, resets, factor.horizon)
    if not 0 <= s <= t:
        raise InvalidParameterError(f"need 0 <= s <= t, got s={s}, t={t}")
    p_resets = np.array([float(P0(T)) for T in resets])
    b_resets = np.array([float(b(T)) for T in resets])
    alpha = float(P0(t)) - p_resets[-1] - K * p_resets.sum()
    beta = float(b(t)) - b_resets[-1] - K * b_resets.sum()
    scale = abs(float(b(t))) + abs(b_resets[-1]) + K * np.abs(b_resets).sum()
    L, denominator = _rebase(factor, P0, b, s, state)
    if s == t:
        A = 0.0 if t == 0 else float(factor.A(t, state))
        return max(alpha + beta * A, 0.0) / denominator
    return expected_positive_part(factor, t, alpha, beta, scale, s, L) / denominator


def caplet_price(model: BondModel, K: float, t: float, T: float, s: float = 0.0, state=None) -> float:
    leg = model.single_leg
    return caplet_price_closed(leg.factor, K, t, T, model.curve, leg.coefficient, s, state)


def swaption_price(model: BondModel, K: float, t: float, resets: Sequence[float], s: float = 0.0,
                   state=None) -> float:
    leg = model.single_leg
    return swaption_price_closed(leg.factor, K, t, resets, model.curve, leg.coefficient, s, state)

"""
Stable-1/2 bridge transition: tabulated inversion with an exact mixture fallback.

One bridge step of a stable-1/2 subordinator with remaining distance R splits R
into y and R - y with density proportional to rho_dt(y) rho_rest(R - y). In the
odds variable w = y / (R - y) this density is proportional to

    (1 + w) w^(-3/2) exp(-a / w - b w),   a = c_dt / (2R),  b = c_rest / (2R),

where c_s is the Lévy scale of the law at time s. The table is built in x = log w.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import stats
from scipy.special import expit

from ..config.settings import settings
from .laws import LevyLaw

logger = logging.getLogger(__name__)

# quantile cut of each mixture component when placing the table
_TABLE_QUANTILE = 1e-12
_CHUNK = 256


def odds_parameters(law: LevyLaw, dt, rest, remaining) -> Tuple[np.ndarray, np.ndarray]:
    """(a, b) of the odds density for steps of length dt with `rest` time left afterwards"""
    remaining = np.asarray(remaining, dtype=float)
    a = law.stable_scale(dt) / (2.0 * remaining)
    b = law.stable_scale(rest) / (2.0 * remaining)
    return np.broadcast_to(a, remaining.shape).astype(float), np.broadcast_to(b, remaining.shape).astype(float)


def log_normaliser(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """log of the integral of (1 + w) w^(-3/2) exp(-a/w - b w) over w > 0"""
    return 0.5 * np.log(np.pi) - 2.0 * np.sqrt(a * b) + np.log(a**-0.5 + b**-0.5)


def table_range(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """log-w range holding all but ~1e-12 of the mass of both mixture components"""
    shape = 1.0 / (2.0 * np.sqrt(a * b))
    # w ~ IG(sqrt(a/b), 2a) and 1/w ~ IG(sqrt(b/a), 2b)
    q_lo, q_hi = _TABLE_QUANTILE, 1.0 - _TABLE_QUANTILE
    w1_lo = stats.invgauss.ppf(q_lo, shape, scale=2.0 * a)
    w1_hi = stats.invgauss.ppf(q_hi, shape, scale=2.0 * a)
    w2_lo = 1.0 / stats.invgauss.ppf(q_hi, shape, scale=2.0 * b)
    w2_hi = 1.0 / stats.invgauss.ppf(q_lo, shape, scale=2.0 * b)
    lo = np.log(np.minimum(w1_lo, w2_lo))
    hi = np.log(np.maximum(w1_hi, w2_hi))
    return lo, hi


def build_table(a: np.ndarray, b: np.ndarray, points: Optional[int] = None):
    """Tabulate the odds density on a log-spaced grid per row.

    Returns (x, pdf, cdf, ok) where pdf is scaled to its row maximum, cdf is the
    cumulative trapezoid of pdf, and ok flags rows whose tabulated mass matches the
    closed-form normaliser to within the configured tail tolerance.
    """
    points = points or settings.stable_table_points
    lo, hi = table_range(a, b)
    frac = np.linspace(0.0, 1.0, points)
    x = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    w = np.exp(x)
    with np.errstate(over="ignore", under="ignore"):
        logf = np.logaddexp(0.0, x) - 0.5 * x - a[:, None] / w - b[:, None] * w
    peak = logf.max(axis=1)
    pdf = np.exp(logf - peak[:, None])
    dx = (hi - lo) / (points - 1)
    cdf = np.zeros_like(pdf)
    cdf[:, 1:] = np.cumsum(0.5 * (pdf[:, 1:] + pdf[:, :-1]), axis=1) * dx[:, None]
    log_mass = np.log(cdf[:, -1]) + peak
    ok = np.abs(np.expm1(log_mass - log_normaliser(a, b))) <= settings.stable_tail_mass
    return x, pdf, cdf, ok


def _invert(x: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Monotone linear inversion of per-row cumulative tables"""
    target = u * cdf[:, -1]
    idx = np.clip((cdf < target[:, None]).sum(axis=1), 1, cdf.shape[1] - 1)
    rows = np.arange(cdf.shape[0])
    c0, c1 = cdf[rows, idx - 1], cdf[rows, idx]
    x0, x1 = x[rows, idx - 1], x[rows, idx]
    span = np.where(c1 > c0, c1 - c0, 1.0)
    return x0 + np.clip((target - c0) / span, 0.0, 1.0) * (x1 - x0)


def exact_log_odds(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw log w from the two-component inverse-Gaussian mixture"""
    ra, rb = np.sqrt(a), np.sqrt(b)
    first = rng.random(a.shape) < rb / (ra + rb)
    w_first = rng.wald(ra / rb, 2.0 * a)
    w_second = 1.0 / rng.wald(rb / ra, 2.0 * b)
    return np.log(np.where(first, w_first, w_second))


def sample_log_odds(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw log w row by row from the tabulated CDF, falling back to the exact draw"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = rng.random(a.shape)
    out = np.empty(a.shape)
    fallback = np.zeros(a.shape, dtype=bool)
    for start in range(0, a.size, _CHUNK):
        part = slice(start, start + _CHUNK)
        x, _, cdf, ok = build_table(a[part], b[part])
        out[part] = _invert(x, cdf, u[part])
        fallback[part] = ~ok
    if fallback.any():
        logger.warning(f"Stable bridge table inaccurate for {int(fallback.sum())} rows; using exact draws")
        out[fallback] = exact_log_odds(a[fallback], b[fallback], rng)
    return out


def step_remaining(law: LevyLaw, dt: float, rest: float, remaining: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """Remaining distance to the terminal value after one bridge step"""
    remaining = np.asarray(remaining, dtype=float)
    out = remaining.copy()
    active = remaining > 0
    if not active.any():
        return out
    a, b = odds_parameters(law, dt, rest, remaining[active])
    x = sample_log_odds(a, b, rng)
    # R - y = R / (1 + w)
    out[active] = remaining[active] * expit(-x)
    return out


def bridge_nodes(law: LevyLaw, dt: float, rest: float, remaining: float) -> Tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes y and weights for the increment of one bridge step splitting `remaining`"""
    a, b = odds_parameters(law, dt, rest, np.array([float(remaining)]))
    x, pdf, _, _ = build_table(a, b)
    y = remaining * expit(x[0])
    weights = pdf[0].copy()
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return y, weights / weights.sum()

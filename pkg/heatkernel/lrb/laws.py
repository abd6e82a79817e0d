"""
Generating Lévy laws: densities, Laplace and characteristic exponents, increment samplers
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy import stats
from scipy.special import gammaln

from ..utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class LawKind(str, Enum):
    """Kinds of generating Lévy process"""

    BROWNIAN = "brownian"
    GAMMA = "gamma"
    STABLE_HALF = "stable_half"


@dataclass(frozen=True)
class LevyLaw:
    """A generating Lévy law.

    Gamma: L_t has shape m*t and unit rate. StableHalf: L_t is a Lévy (one-sided
    stable, index 1/2) variable with scale alpha^2 t^2 / 4, so that
    E[exp(-kappa L_t)] = exp(-alpha sqrt(kappa) t / sqrt(2)).
    """

    kind: LawKind
    m: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LawKind(self.kind))
        if self.kind == LawKind.GAMMA and not self.m > 0:
            raise InvalidParameterError(f"gamma rate m must be positive, got {self.m}")
        if self.kind == LawKind.STABLE_HALF and not self.alpha > 0:
            raise InvalidParameterError(f"stable-1/2 activity alpha must be positive, got {self.alpha}")

    @classmethod
    def brownian(cls) -> "LevyLaw":
        return cls(LawKind.BROWNIAN)

    @classmethod
    def gamma(cls, m: float = 1.0) -> "LevyLaw":
        return cls(LawKind.GAMMA, m=m)

    @classmethod
    def stable_half(cls, alpha: float = 1.0) -> "LevyLaw":
        return cls(LawKind.STABLE_HALF, alpha=alpha)

    @property
    def increasing(self) -> bool:
        """True for subordinators (gamma, stable-1/2)"""
        return self.kind != LawKind.BROWNIAN

    def stable_scale(self, t: ArrayLike) -> ArrayLike:
        """Lévy scale parameter c(t) = alpha^2 t^2 / 4 of the stable-1/2 law"""
        return 0.25 * (self.alpha * np.asarray(t, dtype=float)) ** 2

    def describe(self) -> str:
        if self.kind == LawKind.GAMMA:
            return f"gamma(m={self.m:g})"
        if self.kind == LawKind.STABLE_HALF:
            return f"stable_half(alpha={self.alpha:g})"
        return "brownian"


def _check_time(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise InvalidParameterError(f"density requires t > 0, got {t}")
    return t


def log_density(law: LevyLaw, t: ArrayLike, y: ArrayLike) -> np.ndarray:
    """log rho_t(y); -inf outside the support"""
    t = _check_time(t)
    y = np.asarray(y, dtype=float)

    if law.kind == LawKind.BROWNIAN:
        return stats.norm.logpdf(y, scale=np.sqrt(t))

    if law.kind == LawKind.GAMMA:
        shape = law.m * t
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (shape - 1.0) * np.log(np.where(y > 0, y, 1.0)) - y - gammaln(shape)
        return np.where(y > 0, out, -np.inf)

    c = law.stable_scale(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(y > 0, y, 1.0)
        out = 0.5 * np.log(c) - _LOG_SQRT_2PI - 1.5 * np.log(safe) - c / (2.0 * safe)
    return np.where(y > 0, out, -np.inf)


def density(law: LevyLaw, t: ArrayLike, y: ArrayLike) -> np.ndarray:
    """rho_t(y), the density of L_t at y"""
    return np.exp(log_density(law, t, y))


def laplace_exponent(law: LevyLaw, kappa: ArrayLike) -> np.ndarray:
    """psi(kappa) with E[exp(-kappa L_t)] = exp(-psi(kappa) t).

    The Brownian branch is the moment-generating one, psi = -kappa^2/2.
    """
    kappa = np.asarray(kappa, dtype=float)
    if law.kind == LawKind.BROWNIAN:
        return -0.5 * kappa**2
    if np.any(kappa < 0):
        raise InvalidParameterError(f"Laplace exponent requires kappa >= 0, got {kappa}")
    if law.kind == LawKind.GAMMA:
        return law.m * np.log1p(kappa)
    return law.alpha * np.sqrt(kappa) / np.sqrt(2.0)


def characteristic_exponent(law: LevyLaw, y: ArrayLike) -> np.ndarray:
    """Psi(y) with E[exp(-i y L_u)] = exp(-u Psi(y)), principal branches"""
    y = np.asarray(y, dtype=float)
    if law.kind == LawKind.BROWNIAN:
        return (0.5 * y**2).astype(complex)
    if law.kind == LawKind.GAMMA:
        return law.m * np.log(1.0 + 1j * y)
    return law.alpha * np.sqrt(1j * y) / np.sqrt(2.0)


def sample_increments(law: LevyLaw, dt: ArrayLike, size, rng: np.random.Generator) -> np.ndarray:
    """Draw independent increments L_{s+dt} - L_s"""
    dt = np.asarray(dt, dtype=float)
    if law.kind == LawKind.BROWNIAN:
        return rng.standard_normal(size) * np.sqrt(dt)
    if law.kind == LawKind.GAMMA:
        return rng.standard_gamma(law.m * dt, size)
    # Lévy(c) is c / Z^2 for a standard normal Z
    z = rng.standard_normal(size)
    return law.stable_scale(dt) / z**2


def in_support(law: LevyLaw, t: float, z: ArrayLike) -> np.ndarray:
    """Whether the density at horizon t is positive and finite at z"""
    z = np.asarray(z, dtype=float)
    if law.increasing:
        return np.isfinite(z) & (z > 0)
    return np.isfinite(z)

"""
Asset models - S_tT = (S0(T) + b1(T) A1_t) / (P0(t) + b2(t) A2_t)
"""
import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..lrb.bridge import BridgeSpec, Measure
from ..models.factors import ExpLinearDiscount, ExpQuadratic, HeavyTailNumerator, Quadratic, RationalFactorModel
from ..models.families import SmoothFunction
from ..models.kernel import Functions, normaliser
from ..utils.errors import InvalidParameterError, ModelViolationError
from .bonds import BondModel

logger = logging.getLogger(__name__)


def numerator_coefficient(factor: RationalFactorModel, g1: SmoothFunction, pi0: float) -> SmoothFunction:
    """b1(T) = g1(T) h1(T) / pi0"""

    def value(T):
        return g1(T) * factor.loading(T) / pi0

    def first(T):
        return (g1.derivative(T, 1) * factor.loading(T) + g1(T) * factor.loading(T, 1)) / pi0

    return SmoothFunction(value, first, scale=factor.horizon, name="b1")


def calibrate_g0(S0: Any, g1: SmoothFunction, factor: RationalFactorModel, pi0: float) -> SmoothFunction:
    """g0(T) = S0(T) pi0 - g1(T) Z_0T, with Z the numerator factor's heat-kernel process"""

    def value(T):
        return S0(T) * pi0 - g1(T) * factor.y0(T)

    return SmoothFunction(value, scale=factor.horizon, name="g0")


@dataclass(frozen=True, eq=False)
class AssetModel:
    """An asset paying S_TT at T, discounted by a first-order bond model.

    The numerator may change sign; with limited_liability set a negative price is logged.
    """

    numerator: RationalFactorModel
    S0: Any
    b1: SmoothFunction
    discount: BondModel
    g1: Optional[SmoothFunction] = None
    pi0: float = 1.0
    limited_liability: bool = False

    def __post_init__(self):
        leg = self.discount.single_leg
        if self.numerator.horizon != leg.factor.horizon:
            raise InvalidParameterError("numerator and discount factors disagree on the horizon")
        if set(self.numerator.components) & set(leg.factor.components):
            raise InvalidParameterError("numerator and discount factors must read distinct components")
        if self.numerator.measure != leg.factor.measure:
            raise InvalidParameterError("numerator and discount factors need the same auxiliary measure")

    @property
    def horizon(self) -> float:
        return self.numerator.horizon

    @property
    def measure(self) -> Measure:
        return self.numerator.measure

    @property
    def bridge(self) -> Optional[BridgeSpec]:
        return self.discount.bridge

    def g0(self) -> SmoothFunction:
        if self.g1 is None:
            raise InvalidParameterError("g0 needs the g1 the model was built from")
        return calibrate_g0(self.S0, self.g1, self.numerator, self.pi0)

    def cash_numerator(self, T: float, t: float, state) -> np.ndarray:
        """S0(T) + b1(T) A1_t"""
        return self.S0(T) + self.b1(T) * self.numerator.A(t, state)

    @classmethod
    def _build(cls, numerator: RationalFactorModel, discount_factor: RationalFactorModel, S0: Any,
               g1: SmoothFunction, functions: Functions, bridge: Optional[BridgeSpec],
               limited_liability: bool) -> "AssetModel":
        discount = BondModel.first_order(discount_factor, functions, bridge)
        pi0 = normaliser(discount_factor, functions)
        b1 = numerator_coefficient(numerator, g1, pi0)
        return cls(numerator, S0, b1, discount, g1, pi0, limited_liability)

    @classmethod
    def diffusion(cls, horizon: float, S0: Any, g1: SmoothFunction, functions: Functions, eta: float = 1.0,
                  components=(0, 1), bridge: Optional[BridgeSpec] = None,
                  limited_liability: bool = False) -> "AssetModel":
        """Exponential-quadratic numerator on one Brownian bridge, quadratic discount on another"""
        numerator = ExpQuadratic(horizon, eta=eta, components=(components[0],))
        discount = Quadratic(horizon, components=(components[1],))
        return cls._build(numerator, discount, S0, g1, functions, bridge, limited_liability)

    @classmethod
    def heavy_tail(cls, horizon: float, S0: Any, g1: SmoothFunction, functions: Functions,
                   kappa: float = 1.0, c: float = 0.5, m: float = 1.0, alpha: float = 1.0,
                   eta: float = 0.5, a: float = 0.5, q: float = 1.0, components=(0, 1, 2, 3),
                   bridge: Optional[BridgeSpec] = None, limited_liability: bool = False) -> "AssetModel":
        """Stable-1/2 x gamma numerator, gamma x Brownian discount"""
        numerator = HeavyTailNumerator(horizon, kappa=kappa, c=c, m=m, alpha=alpha,
                                       components=tuple(components[:2]))
        discount = ExpLinearDiscount(horizon, eta=eta, a=a, q=q, components=tuple(components[2:]))
        return cls._build(numerator, discount, S0, g1, functions, bridge, limited_liability)


def asset_price(model: AssetModel, t: float, T: float, state) -> np.ndarray:
    """S_tT at the LRB state(s) at time t"""
    if t < 0 or T < t or T >= model.horizon:
        raise InvalidParameterError(f"need 0 <= t <= T < U={model.horizon}, got t={t}, T={T}")
    denominator = model.discount.numerator(t, t, state)
    if np.any(denominator <= 0):
        raise ModelViolationError(f"asset price denominator is not positive at t={t:g}")
    price = model.cash_numerator(T, t, state) / denominator
    if model.limited_liability and np.any(price < 0):
        logger.warning(f"Limited-liability asset price is negative on {int(np.sum(price < 0))} state(s) at t={t:g}")
    return price


def breaching_paths(model: AssetModel, grid, values, T: Optional[float] = None) -> np.ndarray:
    """Indices of the paths whose S_tT goes negative at some grid time t <= T, values (n, d, G).

    T defaults to the last grid time.
    """
    values = np.asarray(values, dtype=float)
    T = float(grid[-1]) if T is None else T
    negative = np.zeros(values.shape[0], dtype=bool)
    for k, t in enumerate(grid):
        if t > T:
            break
        negative |= np.asarray(model.cash_numerator(T, t, values[:, :, k])) < 0
    return np.flatnonzero(negative)


def limited_liability_breaches(model: AssetModel, grid, values) -> int:
    """Number of paths whose S_tT goes negative somewhere on the grid"""
    return int(breaching_paths(model, grid, values).size)

"""
Bond models - rational discount bond prices built from (b, A) legs
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..lrb.bridge import BridgeSpec, Measure
from ..models.factors import RationalFactorModel
from ..models.families import SmoothFunction
from ..models.kernel import Functions, ModelCurve
from ..utils.errors import InvalidParameterError, ModelViolationError

logger = logging.getLogger(__name__)

# short rates below this are treated as negative
RATE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class Leg:
    """One factor A^(j) with its coefficient b_j"""

    factor: RationalFactorModel
    coefficient: SmoothFunction


@dataclass(frozen=True, eq=False)
class Term:
    """Product of legs: Lambda_tT = prod_j b_j(T) A^(j)_t"""

    legs: Tuple[Leg, ...]

    def __post_init__(self):
        legs = tuple(self.legs)
        if not legs:
            raise InvalidParameterError("a term needs at least one leg")
        seen = set()
        for leg in legs:
            overlap = seen & set(leg.factor.components)
            if overlap:
                raise InvalidParameterError(
                    f"factors multiplied in one term must read disjoint components, {sorted(overlap)} repeat"
                )
            seen |= set(leg.factor.components)
        object.__setattr__(self, "legs", legs)

    @property
    def order(self) -> int:
        return len(self.legs)

    def coefficient(self, T, order: int = 0):
        """prod_j b_j(T) or its first T-derivative"""
        values = [leg.coefficient(T) for leg in self.legs]
        if order == 0:
            return np.prod(values, axis=0)
        if order == 1:
            total = 0.0
            for i, leg in enumerate(self.legs):
                others = np.prod([v for j, v in enumerate(values) if j != i] or [1.0], axis=0)
                total = total + leg.coefficient.derivative(T, 1) * others
            return total
        raise InvalidParameterError(f"derivative order {order} not supported for product terms")

    def factor_product(self, t: float, state) -> np.ndarray:
        return np.prod([leg.factor.A(t, state) for leg in self.legs], axis=0)


@dataclass(frozen=True, eq=False)
class BondModel:
    """P_tT = (P0(T) + sum_i Lambda^(i)_tT) / (P0(t) + sum_i Lambda^(i)_tt)"""

    curve: Any
    terms: Tuple[Term, ...]
    bridge: Optional[BridgeSpec] = None
    horizon: float = field(default=0.0)

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        horizons = {leg.factor.horizon for term in terms for leg in term.legs}
        if len(horizons) > 1:
            raise InvalidParameterError(f"factors disagree on the horizon: {sorted(horizons)}")
        if not self.horizon:
            if not horizons:
                raise InvalidParameterError("a bond model without factors needs an explicit horizon")
            object.__setattr__(self, "horizon", horizons.pop())
        if self.bridge is not None:
            used = [c for term in terms for leg in term.legs for c in leg.factor.components]
            if used and max(used) >= self.bridge.dimension:
                raise InvalidParameterError("a factor reads a component the bridge does not have")

    @classmethod
    def first_order(cls, factor: RationalFactorModel, functions: Functions,
                    bridge: Optional[BridgeSpec] = None) -> "BondModel":
        """P = (P0(T) + b(T) A_t) / (P0(t) + b(t) A_t) with (P0, b) implied by (f0, f1)"""
        mc = ModelCurve(factor, functions)
        return cls(mc.P0, (Term((Leg(factor, mc.b),)),), bridge)

    @classmethod
    def multi_factor(cls, factors: Sequence[RationalFactorModel], f0: SmoothFunction,
                     f1s: Sequence[SmoothFunction], bridge: Optional[BridgeSpec] = None) -> "BondModel":
        """Sum of first-order factors with y_i(t) = f_i(t) / (f0(0) + sum_i f_i(0) Y^(i)_00)"""
        if len(factors) != len(f1s) or not factors:
            raise InvalidParameterError("one f_i per factor is required")
        norm = float(f0(0.0)) + sum(float(f(0.0)) * float(m.y0(0.0)) for m, f in zip(factors, f1s))

        def p0(t):
            return (f0(t) + sum(f(t) * m.y0(t) for m, f in zip(factors, f1s))) / norm

        def p0_first(t):
            return (f0.derivative(t, 1) + sum(f.derivative(t, 1) * m.y0(t) + f(t) * m.y0(t, 1)
                                              for m, f in zip(factors, f1s))) / norm

        def p0_second(t):
            return (f0.derivative(t, 2) + sum(f.derivative(t, 2) * m.y0(t) + 2.0 * f.derivative(t, 1) * m.y0(t, 1)
                                              + f(t) * m.y0(t, 2) for m, f in zip(factors, f1s))) / norm

        terms = []
        for m, f in zip(factors, f1s):
            terms.append(Term((Leg(m, _loading_coefficient(m, f, norm)),)))
        curve = SmoothFunction(p0, p0_first, p0_second, scale=factors[0].horizon, name="P0")
        return cls(curve, tuple(terms), bridge)

    @classmethod
    def higher_order(cls, curve: Any, legs: Sequence[Leg], order: int,
                     bridge: Optional[BridgeSpec] = None) -> "BondModel":
        """One term per subset of `order` legs: order = len(legs) gives a single product term"""
        if not 1 <= order <= len(legs):
            raise InvalidParameterError(f"order must lie in [1, {len(legs)}], got {order}")
        terms = tuple(Term(tuple(group)) for group in combinations(legs, order))
        return cls(curve, terms, bridge)

    @property
    def legs(self) -> List[Leg]:
        return [leg for term in self.terms for leg in term.legs]

    @property
    def single_leg(self) -> Leg:
        if len(self.terms) != 1 or self.terms[0].order != 1:
            raise InvalidParameterError("this operation needs a first-order single-term bond model")
        return self.terms[0].legs[0]

    @property
    def auxiliary_measure(self) -> Optional[Measure]:
        """Common auxiliary measure of all factors, or None when they disagree"""
        measures = {leg.factor.measure for leg in self.legs}
        return measures.pop() if len(measures) == 1 else None

    def numerator(self, T, t: float, state) -> np.ndarray:
        """P0(T) + sum_i Lambda^(i)_tT"""
        out = np.asarray(self.curve(T), dtype=float)
        for term in self.terms:
            out = out + term.coefficient(T) * term.factor_product(t, state)
        return out

    def numerator_slope(self, T, t: float, state) -> np.ndarray:
        """d/dT of the numerator"""
        out = np.asarray(self.curve.derivative(T, 1), dtype=float)
        for term in self.terms:
            out = out + term.coefficient(T, 1) * term.factor_product(t, state)
        return out


def _loading_coefficient(model: RationalFactorModel, f: SmoothFunction, norm: float) -> SmoothFunction:
    def value(t):
        return f(t) * model.loading(t) / norm

    def first(t):
        return (f.derivative(t, 1) * model.loading(t) + f(t) * model.loading(t, 1)) / norm

    def second(t):
        return (f.derivative(t, 2) * model.loading(t) + 2.0 * f.derivative(t, 1) * model.loading(t, 1)
                + f(t) * model.loading(t, 2)) / norm

    return SmoothFunction(value, first, second, scale=model.horizon, name="b")


def _check_dates(model: BondModel, t: float, T: float) -> None:
    if t < 0 or T < t or T >= model.horizon:
        raise InvalidParameterError(f"need 0 <= t <= T < U={model.horizon}, got t={t}, T={T}")


def _denominator(model: BondModel, t: float, state) -> np.ndarray:
    denominator = model.numerator(t, t, state)
    if np.any(denominator <= 0):
        raise ModelViolationError(f"bond price denominator is not positive at t={t:g}")
    return denominator


def bond_price(model: BondModel, t: float, T: float, state) -> np.ndarray:
    """P_tT at the LRB state(s) at time t"""
    _check_dates(model, t, T)
    if T == t:
        return np.ones(np.shape(model.numerator(t, t, state)))
    return model.numerator(T, t, state) / _denominator(model, t, state)


def forward_rate(model: BondModel, t: float, T: float, state) -> np.ndarray:
    """f_tT = -d/dT ln P_tT"""
    _check_dates(model, t, T)
    return -model.numerator_slope(T, t, state) / model.numerator(T, t, state)


def short_rate(model: BondModel, t: float, state) -> np.ndarray:
    """r_t = -(P0'(t) + sum Lambda'_tt) / (P0(t) + sum Lambda_tt)"""
    _check_dates(model, t, t)
    r = -model.numerator_slope(t, t, state) / _denominator(model, t, state)
    if np.any(r < -RATE_TOLERANCE):
        raise ModelViolationError(f"negative short rate {np.min(r):.3g} at t={t:g}; check f0/f1")
    return r


def bond_bounds(model: BondModel, t: float, T: float) -> Tuple[float, float]:
    """Analytic (P_low, P_high) of a first-order model over A in [A_low(t), inf)"""
    _check_dates(model, t, T)
    leg = model.single_leg
    p_t, p_T = float(model.curve(t)), float(model.curve(T))
    b_t, b_T = float(leg.coefficient(t)), float(leg.coefficient(T))
    a_low = float(leg.factor.lower_bound(t))
    at_low = (p_T + b_T * a_low) / (p_t + b_t * a_low)
    at_infinity = b_T / b_t if b_t > 0 else p_T / p_t
    return min(at_low, at_infinity), max(at_low, at_infinity)


def price_sensitivity_sign(model: BondModel, t: float, T: float) -> int:
    """sign(b(T) P0(t) - b(t) P0(T)), the sign of dP_tT/dA"""
    leg = model.single_leg
    return int(np.sign(float(leg.coefficient(T) * model.curve(t) - leg.coefficient(t) * model.curve(T))))


def aux_measure(model: BondModel) -> Measure:
    measure = model.auxiliary_measure
    if measure is None:
        raise InvalidParameterError("bond factors mix auxiliary measures; price under P instead")
    return measure

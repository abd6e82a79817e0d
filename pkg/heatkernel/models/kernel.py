"""
Pricing kernel - rational coefficients, initial curves and f0 calibration
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..utils.errors import CalibrationError, InvalidParameterError, ModelViolationError
from .factors import RationalFactorModel
from .families import F0F1Family, KernelFunctions, SmoothFunction

logger = logging.getLogger(__name__)

Functions = Union[F0F1Family, KernelFunctions]

# calibrated f0 is checked on a grid with this spacing relative to U
CALIBRATION_STEP = 1e-3
MONOTONE_TOLERANCE = 1e-12


def normaliser(model: RationalFactorModel, functions: Functions) -> float:
    """pi_0 = f0(0) + f1(0) Y_00"""
    return float(functions.f0(0.0) + functions.f1(0.0) * model.y0(0.0))


@dataclass(frozen=True, eq=False)
class ModelCurve:
    """P0 and b of a factor model driven by (f0, f1), each with T-derivatives"""

    model: RationalFactorModel
    functions: Functions

    @cached_property
    def pi0(self) -> float:
        return normaliser(self.model, self.functions)

    @cached_property
    def P0(self) -> SmoothFunction:
        f0, f1, m, pi0 = self.functions.f0, self.functions.f1, self.model, self.pi0

        def value(t):
            return (f0(t) + f1(t) * m.y0(t)) / pi0

        def first(t):
            return (f0.derivative(t, 1) + f1.derivative(t, 1) * m.y0(t) + f1(t) * m.y0(t, 1)) / pi0

        def second(t):
            return (f0.derivative(t, 2) + f1.derivative(t, 2) * m.y0(t)
                    + 2.0 * f1.derivative(t, 1) * m.y0(t, 1) + f1(t) * m.y0(t, 2)) / pi0

        return SmoothFunction(value, first, second, scale=m.horizon, name="P0")

    @cached_property
    def b(self) -> SmoothFunction:
        f1, m, pi0 = self.functions.f1, self.model, self.pi0

        def value(t):
            return f1(t) * m.loading(t) / pi0

        def first(t):
            return (f1.derivative(t, 1) * m.loading(t) + f1(t) * m.loading(t, 1)) / pi0

        def second(t):
            return (f1.derivative(t, 2) * m.loading(t) + 2.0 * f1.derivative(t, 1) * m.loading(t, 1)
                    + f1(t) * m.loading(t, 2)) / pi0

        return SmoothFunction(value, first, second, scale=m.horizon, name="b")

    def numerator(self, T, A) -> np.ndarray:
        """P0(T) + b(T) A"""
        return self.P0(T) + self.b(T) * np.asarray(A, dtype=float)


def eval_b_P0(model: RationalFactorModel, functions: Functions, t) -> Tuple[float, float]:
    """(b(t), P0(t)) implied by the model and (f0, f1)"""
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(t) > model.horizon):
        raise InvalidParameterError(f"t must lie in [0, U={model.horizon}], got {t}")
    curve = ModelCurve(model, functions)
    return curve.b(t), curve.P0(t)


def calibration_grid(horizon: float) -> np.ndarray:
    n = int(round(1.0 / CALIBRATION_STEP))
    return np.linspace(0.0, horizon, n + 1)


def first_violation(f: Any, horizon: float) -> Optional[Tuple[str, float]]:
    """First grid time where f is not positive or increases, with the kind of violation"""
    grid = calibration_grid(horizon)
    values = np.asarray(f(grid), dtype=float)
    bad = np.flatnonzero(values <= 0)
    rising = np.flatnonzero(np.diff(values) > MONOTONE_TOLERANCE * np.maximum(1.0, np.abs(values[:-1])))
    found = []
    if bad.size:
        found.append(("is not positive", float(grid[bad[0]])))
    if rising.size:
        found.append(("increases", float(grid[rising[0] + 1])))
    return min(found, key=lambda v: v[1]) if found else None


def check_monotone_positive(f: Any, horizon: float, name: str) -> List[str]:
    violation = first_violation(f, horizon)
    return [] if violation is None else [f"{name} {violation[0]} at t={violation[1]:g}"]


def calibrate_f0(market_curve: Any, f1: SmoothFunction, model: RationalFactorModel) -> SmoothFunction:
    """f0(t) = P_0t [1 + f1(0) Y_00] - f1(t) Y_0t.

    market_curve is any object with value(t) and derivative(t, order), e.g. DiscountCurve.
    Raises CalibrationError with the first violating t when f0 is negative or increasing.
    """
    p00 = float(market_curve.value(0.0))
    if abs(p00 - 1.0) > 1e-12:
        raise InvalidParameterError(f"market curve must start at 1, got P(0)={p00}")
    pi = 1.0 + float(f1(0.0)) * float(model.y0(0.0))

    def value(t):
        return market_curve.value(t) * pi - f1(t) * model.y0(t)

    def first(t):
        return market_curve.derivative(t, 1) * pi - f1.derivative(t, 1) * model.y0(t) - f1(t) * model.y0(t, 1)

    def second(t):
        return (market_curve.derivative(t, 2) * pi - f1.derivative(t, 2) * model.y0(t)
                - 2.0 * f1.derivative(t, 1) * model.y0(t, 1) - f1(t) * model.y0(t, 2))

    f0 = SmoothFunction(value, first, second, scale=model.horizon, name="f0")
    violation = first_violation(f0, model.horizon)
    if violation is not None:
        raise CalibrationError(f"calibrated f0 {violation[0]} at t={violation[1]:g}", t=violation[1])
    logger.debug(f"Calibrated f0 for {model.kind.value}: f0(U)={float(f0(model.horizon)):.6g}")
    return f0


def pricing_kernel(model: RationalFactorModel, functions: Functions, t: float, state, M_t=1.0) -> np.ndarray:
    """pi_t = pi_0 [P0(t) + b(t) A_t] M_t with M_0 = 1"""
    curve = ModelCurve(model, functions)
    bracket = np.asarray(curve.numerator(t, model.A(t, state)), dtype=float)
    if np.any(bracket <= 0):
        raise ModelViolationError(f"P0(t) + b(t) A_t is not positive at t={t:g}")
    return curve.pi0 * bracket * np.asarray(M_t, dtype=float)


def check_heat_kernel_spec(spec: Any, points: int = 12) -> Dict[str, Any]:
    """Check f0, f1 positive non-increasing and w(t, u-s) <= w(t-s, u) on a grid of triples"""
    U = spec.horizon
    failures = check_monotone_positive(spec.f0, U, "f0") + check_monotone_positive(spec.f1, U, "f1")

    k = len(spec.components) if spec.separate_offsets else 1
    grid = np.linspace(0.0, U, points + 2)[1:-1]
    checked = 0
    for t in grid:
        for u in grid:
            if t + u >= U:
                continue
            for s in np.linspace(0.0, min(t, u), 5):
                lhs = spec.w(t, *([u - s] * k))
                rhs = spec.w(t - s, *([u] * k))
                checked += 1
                if lhs > rhs * (1.0 + 1e-12) + 1e-300:
                    failures.append(f"w({t:g}, {u - s:g}) > w({t - s:g}, {u:g})")
                    break

    result = {"passed": not failures, "failures": failures, "weight_triples": checked}
    if failures:
        logger.warning(f"Heat-kernel spec check failed: {failures[0]}")
    return result

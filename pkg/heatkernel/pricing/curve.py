"""
Discount curve - initial term structure P_0t, log-linear between grid points
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscountCurve:
    """P_0t on a grid; forward rates are piecewise constant between knots and the
    last forward is extended beyond the final knot."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if times.size < 2 or times.size != values.size:
            raise InvalidParameterError("curve needs at least two (t, P) points of equal length")
        if times[0] != 0.0 or abs(values[0] - 1.0) > 1e-12:
            raise InvalidParameterError(f"curve must start with P(0)=1, got P({times[0]})={values[0]}")
        if np.any(np.diff(times) <= 0):
            raise InvalidParameterError("curve times must be strictly increasing")
        if np.any(values <= 0) or np.any(values > 1.0 + 1e-12):
            raise InvalidParameterError("discount factors must lie in (0, 1]")
        if np.any(np.diff(values) > 0):
            logger.warning("Discount curve is not non-increasing; check the input data")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def flat(cls, rate: float, horizon: float) -> "DiscountCurve":
        """P_0t = exp(-rate t), exact under log-linear interpolation"""
        if rate < 0:
            raise InvalidParameterError(f"flat rate must be non-negative, got {rate}")
        return cls(np.array([0.0, horizon]), np.array([1.0, np.exp(-rate * horizon)]))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "DiscountCurve":
        """Curve from a frame with columns t and P"""
        missing = {"t", "P"} - set(frame.columns)
        if missing:
            raise InvalidParameterError(f"curve frame lacks columns {sorted(missing)}")
        ordered = frame.sort_values("t")
        return cls(ordered["t"].to_numpy(), ordered["P"].to_numpy())

    @property
    def forwards(self) -> np.ndarray:
        """Piecewise-constant forward rate on each interval"""
        return -np.diff(np.log(self.values)) / np.diff(self.times)

    def _segment(self, t: np.ndarray) -> np.ndarray:
        # right-continuous: a knot belongs to the interval it opens
        idx = np.searchsorted(self.times, t, side="right") - 1
        return np.clip(idx, 0, self.times.size - 2)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise InvalidParameterError(f"curve evaluated before 0: {t}")
        k = self._segment(t)
        return self.values[k] * np.exp(-self.forwards[k] * (t - self.times[k]))

    def __call__(self, t):
        return self.value(t)

    def derivative(self, t, order: int = 1):
        """Analytic derivative of the interpolant; right-derivative at knots"""
        t = np.asarray(t, dtype=float)
        f = self.forwards[self._segment(t)]
        if order == 0:
            return self.value(t)
        return (-f) ** order * self.value(t)

    def forward_rate(self, t):
        return self.forwards[self._segment(np.asarray(t, dtype=float))]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "P": self.values})

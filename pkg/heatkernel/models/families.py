"""
Deterministic functions of time used by the kernel: f0/f1 families and their derivatives
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from ..utils.errors import InvalidParameterError, SmoothnessError

logger = logging.getLogger(__name__)

# relative step of the centered difference used when no analytic derivative is given
FD_STEP = 1e-5


@dataclass(frozen=True)
class SmoothFunction:
    """A function of time with optional analytic first and second derivatives.

    A missing first derivative falls back to a centered difference with step
    FD_STEP * scale; a missing second derivative is an error.
    """

    func: Callable
    first: Optional[Callable] = None
    second: Optional[Callable] = None
    scale: float = 1.0
    name: str = "f"

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        return self.func(np.asarray(t, dtype=float))

    def derivative(self, t, order: int = 1):
        t = np.asarray(t, dtype=float)
        if order == 0:
            return self.value(t)
        if order == 1:
            if self.first is not None:
                return self.first(t)
            h = FD_STEP * self.scale
            return (self.func(t + h) - self.func(t - h)) / (2.0 * h)
        if order == 2:
            if self.second is None:
                raise SmoothnessError(f"{self.name} provides no second derivative")
            return self.second(t)
        raise InvalidParameterError(f"derivative order {order} not supported")

    @classmethod
    def constant(cls, c: float, name: str = "const") -> "SmoothFunction":
        return cls(
            lambda t: np.full(np.shape(t), float(c)),
            lambda t: np.zeros(np.shape(t)),
            lambda t: np.zeros(np.shape(t)),
            name=name,
        )

    @classmethod
    def exponential(cls, rate: float, level: float = 1.0, name: str = "exp") -> "SmoothFunction":
        """level * exp(-rate t)"""
        return cls(
            lambda t: level * np.exp(-rate * t),
            lambda t: -rate * level * np.exp(-rate * t),
            lambda t: rate**2 * level * np.exp(-rate * t),
            name=name,
        )


@dataclass(frozen=True)
class F0F1Family:
    """f0(t) = exp(-alpha t), f1(t) = beta / ln(gamma + t)"""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise InvalidParameterError("alpha and beta must be non-negative")
        if not self.gamma > 1:
            raise InvalidParameterError(f"gamma must exceed 1 so that f1 stays finite, got {self.gamma}")

    @cached_property
    def f0(self) -> SmoothFunction:
        return SmoothFunction.exponential(self.alpha, name="f0")

    @cached_property
    def f1(self) -> SmoothFunction:
        beta, gamma = self.beta, self.gamma

        def value(t):
            return beta / np.log(gamma + t)

        def first(t):
            s = gamma + t
            return -beta / (s * np.log(s) ** 2)

        def second(t):
            s = gamma + t
            log_s = np.log(s)
            return beta * (log_s + 2.0) / (s**2 * log_s**3)

        return SmoothFunction(value, first, second, name="f1")


@dataclass(frozen=True)
class KernelFunctions:
    """An arbitrary (f0, f1) pair, e.g. a calibrated f0 with a user f1"""

    f0: SmoothFunction
    f1: SmoothFunction

"""
Rational factor models - the (b, A) atoms every price model is assembled from

Each kind carries its auxiliary-measure martingale A_t (A_0 = 0), the analytic lower
bound of A, and the decomposition Y_tT = y0(T) + h(T) A_t of its heat-kernel process,
where y0(T) = Y_0T and h is the loading of A. The heat-kernel pair (F, w) that produces
the decomposition is available for quadrature checks.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple

import numpy as np

from ..lrb.bridge import Measure
from ..lrb.laws import LevyLaw
from ..utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)


class FactorKind(str, Enum):
    """Supported rational factor models"""

    QUADRATIC = "quadratic"
    EXP_QUADRATIC = "exp_quadratic"
    EXP_LINEAR_TWO_FACTOR = "exp_linear_two_factor"
    DEBT = "debt"
    HEAVY_TAIL_NUMERATOR = "heavy_tail_numerator"
    EXP_LINEAR_DISCOUNT = "exp_linear_discount"
    CONTAGION = "contagion"


def _power(D, p: float, order: int):
    """d^order/dT^order of (U - T)^p, written in D = U - T"""
    if order == 0:
        return D**p
    if order == 1:
        return -p * D ** (p - 1)
    if order == 2:
        return p * (p - 1) * D ** (p - 2)
    raise InvalidParameterError(f"derivative order {order} not supported")


@dataclass(frozen=True)
class HeatKernelPair:
    """F(times, values) and w(t, *offsets) of a weighted heat kernel.

    values has shape (n, k) over the factor's own components; with separate offsets
    component i is evaluated at time t + u_i, otherwise all share one offset.
    """

    F: Callable
    w: Callable
    separate_offsets: bool = False


class RationalFactorModel(ABC):
    """Base class of the (b, A) factor kinds"""

    kind: FactorKind
    measure: Measure = Measure.L
    gaussian: bool = False

    horizon: float
    components: Tuple[int, ...]

    def _validate(self):
        if not self.horizon > 0:
            raise InvalidParameterError(f"horizon U must be positive, got {self.horizon}")
        if len(self.components) != len(self.laws()):
            raise InvalidParameterError(
                f"{self.kind.value} reads {len(self.laws())} components, got {self.components}"
            )

    def _time(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t >= self.horizon):
            raise InvalidParameterError(f"A is defined for 0 <= t < U={self.horizon}, got {t}")
        return t

    def select(self, state) -> np.ndarray:
        """The factor's own components of a full state vector (..., d) -> (..., k)"""
        state = np.asarray(state, dtype=float)
        return state[..., list(self.components)]

    def A(self, t, state) -> np.ndarray:
        """Auxiliary-measure martingale A_t evaluated at the full state"""
        return self._A(self._time(t), self.select(state))

    @abstractmethod
    def _A(self, t, x) -> np.ndarray:
        ...

    @abstractmethod
    def lower_bound(self, t) -> float:
        """Analytic infimum of A_t"""

    @abstractmethod
    def y0(self, T, order: int = 0):
        """Y_0T and its T-derivatives"""

    @abstractmethod
    def loading(self, T, order: int = 0):
        """h(T) with Y_tT - Y_0T = h(T) A_t, and its T-derivatives"""

    @abstractmethod
    def laws(self) -> Tuple[LevyLaw, ...]:
        """Generating law of each component the factor reads"""

    @abstractmethod
    def heat_kernel(self) -> HeatKernelPair:
        ...

    def Y(self, t, T, state) -> np.ndarray:
        """Closed-form heat-kernel process Y_tT"""
        return self.y0(T) + self.loading(T) * self.A(t, state)

    def nu(self, t, L) -> np.ndarray:
        raise InvalidParameterError(f"{self.kind.value} has no Gaussian diffusion loading")

    def _D(self, T):
        return self.horizon - np.asarray(T, dtype=float)


@dataclass(frozen=True)
class Quadratic(RationalFactorModel):
    """F(x) = x^2, w(t, u) = U - t - u on a Brownian bridge, martingale under M"""

    horizon: float
    components: Tuple[int, ...] = (0,)

    kind = FactorKind.QUADRATIC
    measure = Measure.M
    gaussian = True

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def laws(self):
        return (LevyLaw.brownian(),)

    def _A(self, t, x):
        tau = self.horizon - t
        return self.horizon * x[..., 0] ** 2 / tau**2 - t / tau

    def lower_bound(self, t):
        return -t / (self.horizon - t)

    def y0(self, T, order=0):
        D, U = self._D(T), self.horizon
        if order == 0:
            return D**3 / 3.0 - D**4 / (4.0 * U)
        if order == 1:
            return -(D**2) + D**3 / U
        if order == 2:
            return 2.0 * D - 3.0 * D**2 / U
        raise InvalidParameterError(f"derivative order {order} not supported")

    def loading(self, T, order=0):
        return _power(self._D(T), 4, order) / (4.0 * self.horizon)

    def nu(self, t, L):
        return 2.0 * self.horizon * np.asarray(L) / (self.horizon - t) ** 2

    def heat_kernel(self):
        U = self.horizon
        return HeatKernelPair(
            F=lambda times, values: values[:, 0] ** 2,
            w=lambda t, u: U - t - u,
        )


@dataclass(frozen=True)
class ExpQuadratic(RationalFactorModel):
    """F(t, x) = exp(x^2 / (2(U - t))), w(t, u) = (U - t - u)^(eta - 1/2), martingale under M.

    Var A_t is infinite once t >= U/2.
    """

    horizon: float
    eta: float = 1.0
    components: Tuple[int, ...] = (0,)

    kind = FactorKind.EXP_QUADRATIC
    measure = Measure.M
    gaussian = True

    def __post_init__(self):
        if not self.eta > 0.5:
            raise InvalidParameterError(f"eta must exceed 1/2, got {self.eta}")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def laws(self):
        return (LevyLaw.brownian(),)

    def _A(self, t, x):
        tau = self.horizon - t
        return np.sqrt(tau / self.horizon) * np.exp(x[..., 0] ** 2 / (2.0 * tau)) - 1.0

    def lower_bound(self, t):
        return np.sqrt(1.0 - t / self.horizon) - 1.0

    def y0(self, T, order=0):
        return self.loading(T, order)

    def loading(self, T, order=0):
        return _power(self._D(T), self.eta, order) * np.sqrt(self.horizon) / self.eta

    def nu(self, t, L):
        tau = self.horizon - t
        L = np.asarray(L)
        return L / np.sqrt(self.horizon * tau) * np.exp(L**2 / (2.0 * tau))

    def heat_kernel(self):
        U, eta = self.horizon, self.eta
        return HeatKernelPair(
            F=lambda times, values: np.exp(values[:, 0] ** 2 / (2.0 * (U - times[0]))),
            w=lambda t, u: (U - t - u) ** (eta - 0.5),
        )


class _ExponentialLinear(RationalFactorModel):
    """Shared pieces of the exponential-linear kinds: A >= -1, y0 = h = (U - T)^power"""

    power: float = 2.0

    def lower_bound(self, t):
        return -1.0

    def y0(self, T, order=0):
        return _power(self._D(T), self.power, order)

    def loading(self, T, order=0):
        return _power(self._D(T), self.power, order)


@dataclass(frozen=True)
class ExpLinearTwoFactor(_ExponentialLinear):
    """Brownian x gamma factor: A = (c+1)^(mt) exp(a L1 - c L2 - a^2 t / 2) - 1"""

    horizon: float
    a: float = 1.0
    c: float = 0.5
    m: float = 1.0
    components: Tuple[int, ...] = (0, 1)

    kind = FactorKind.EXP_LINEAR_TWO_FACTOR

    def __post_init__(self):
        if self.c < 0:
            raise InvalidParameterError(f"c must be non-negative, got {self.c}")
        if not self.m > 0:
            raise InvalidParameterError(f"m must be positive, got {self.m}")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def laws(self):
        return (LevyLaw.brownian(), LevyLaw.gamma(self.m))

    def _A(self, t, x):
        a, c, m = self.a, self.c, self.m
        return (c + 1.0) ** (m * t) * np.exp(a * x[..., 0] - c * x[..., 1] - 0.5 * a**2 * t) - 1.0

    def heat_kernel(self):
        a, c, m = self.a, self.c, self.m
        return HeatKernelPair(
            F=lambda times, values: np.exp(a * values[:, 0] - c * values[:, 1]),
            w=lambda t, u1, u2: np.exp(-0.5 * a**2 * (t + u1)) * (c + 1.0) ** (m * (t + u2)),
            separate_offsets=True,
        )


@dataclass(frozen=True)
class DebtFactor(_ExponentialLinear):
    """Budget x debt factor: A = (1-c)^(mt) exp(-a L1 - a^2 t / 2 + c L2) - 1"""

    horizon: float
    a: float = 0.5
    c: float = 0.5
    m: float = 1.0
    components: Tuple[int, ...] = (0, 1)

    kind = FactorKind.DEBT

    def __post_init__(self):
        if not 0 <= self.c < 1:
            raise InvalidParameterError(f"c must lie in [0, 1), got {self.c}")
        if not self.m > 0:
            raise InvalidParameterError(f"m must be positive, got {self.m}")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def laws(self):
        return (LevyLaw.brownian(), LevyLaw.gamma(self.m))

    def _A(self, t, x):
        a, c, m = self.a, self.c, self.m
        return (1.0 - c) ** (m * t) * np.exp(-a * x[..., 0] - 0.5 * a**2 * t + c * x[..., 1]) - 1.0

    def heat_kernel(self):
        a, c, m = self.a, self.c, self.m
        return HeatKernelPair(
            F=lambda times, values: np.exp(-a * values[:, 0] + c * values[:, 1]),
            w=lambda t, u1, u2: np.exp(-0.5 * a**2 * (t + u1)) * (1.0 - c) ** (m * (t + u2)),
            separate_offsets=True,
        )


@dataclass(frozen=True)
class HeavyTailNumerator(_ExponentialLinear):
    """Stable-1/2 x gamma asset factor: A = (1-c)^(mt) exp(-kappa L1 + psi t + c L2) - 1"""

    horizon: float
    kappa: float = 1.0
    c: float = 0.5
    m: float = 1.0
    alpha: float = 1.0
    components: Tuple[int, ...] = (0, 1)

    kind = FactorKind.HEAVY_TAIL_NUMERATOR

    def __post_init__(self):
        if self.kappa < 0:
            raise InvalidParameterError(f"kappa must be non-negative, got {self.kappa}")
        if not 0 <= self.c < 1:
            raise InvalidParameterError(f"c must lie in [0, 1), got {self.c}")
        if not self.m > 0 or not self.alpha > 0:
            raise InvalidParameterError("m and alpha must be positive")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    @property
    def psi(self) -> float:
        """Laplace exponent of the stable-1/2 law at kappa"""
        return self.alpha * np.sqrt(self.kappa) / np.sqrt(2.0)

    def laws(self):
        return (LevyLaw.stable_half(self.alpha), LevyLaw.gamma(self.m))

    def _A(self, t, x):
        c, m = self.c, self.m
        return (1.0 - c) ** (m * t) * np.exp(-self.kappa * x[..., 0] + self.psi * t + c * x[..., 1]) - 1.0

    def heat_kernel(self):
        kappa, c, m, psi = self.kappa, self.c, self.m, self.psi
        return HeatKernelPair(
            F=lambda times, values: np.exp(-kappa * values[:, 0] + c * values[:, 1]),
            w=lambda t, u1, u2: np.exp(psi * (t + u1)) * (1.0 - c) ** (m * (t + u2)),
            separate_offsets=True,
        )


@dataclass(frozen=True)
class ExpLinearDiscount(_ExponentialLinear):
    """Gamma x Brownian discount factor: A = (eta+1)^(qt) exp(-eta L1 + a L2 - a^2 t / 2) - 1.

    Component order is (gamma, Brownian).
    """

    horizon: float
    eta: float = 0.5
    a: float = 0.5
    q: float = 1.0
    components: Tuple[int, ...] = (0, 1)

    kind = FactorKind.EXP_LINEAR_DISCOUNT

    def __post_init__(self):
        if self.eta < 0:
            raise InvalidParameterError(f"eta must be non-negative, got {self.eta}")
        if not self.q > 0:
            raise InvalidParameterError(f"q must be positive, got {self.q}")
        object.__setattr__(self, "components", tuple(self.components))
        self._validate()

    def laws(self):
        return (LevyLaw.gamma(self.q), LevyLaw.brownian())

    def _A(self, t, x):
        eta, a, q = self.eta, self.a, self.q
        return (eta + 1.0) ** (q * t) * np.exp(-eta * x[..., 0] + a * x[..., 1] - 0.5 * a**2 * t) - 1.0

    def heat_kernel(self):
        eta, a, q = self.eta, self.a, self.q
        return HeatKernelPair(
            F=lambda times, values: np.exp(-eta * values[:, 0] + a * values[:, 1]),
            w=lambda t, u1, u2: (eta + 1.0) ** (q * (t + u1)) * np.exp(-0.5 * a**2 * (t + u2)),
            separate_offsets=True,
        )


@dataclass(frozen=True)
class Contagion(_ExponentialLinear):
    """Exposure-weighted debt factor of one country.

    A = prod_i (1 - w_i)^(m_i t) exp(-a L_budget - a^2 t / 2 + sum_i w_i L_i) - 1 with
    y0 = h = (U - T)^(n + 1). components lists the budget component first, then the debt
    sources in the order of weights and rates.
    """

    horizon: float
    a: float = 0.5
    weights: Tuple[float, ...] = ()
    rates: Tuple[float, ...] = ()
    n: int = 2
    components: Tuple[int, ...] = ()

    kind = FactorKind.CONTAGION

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        rates = tuple(float(m) for m in self.rates) or tuple(1.0 for _ in weights)
        if len(rates) != len(weights):
            raise InvalidParameterError("one rate per debt source is required")
        if any(not 0 <= w < 1 for w in weights):
            raise InvalidParameterError(f"exposure weights must lie in [0, 1), got {weights}")
        if any(not m > 0 for m in rates):
            raise InvalidParameterError("debt rates m_i must be positive")
        if self.a < 0:
            raise InvalidParameterError(f"a must be non-negative, got {self.a}")
        if self.n < 0:
            raise InvalidParameterError(f"n must be non-negative, got {self.n}")
        components = tuple(self.components) or tuple(range(len(weights) + 1))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "components", components)
        self._validate()

    @property
    def power(self) -> float:
        return self.n + 1.0

    def laws(self):
        return (LevyLaw.brownian(),) + tuple(LevyLaw.gamma(m) for m in self.rates)

    def _log_compensator(self, t):
        return t * sum(m * np.log1p(-w) for w, m in zip(self.weights, self.rates))

    def _A(self, t, x):
        debt = x[..., 1:] @ np.asarray(self.weights) if self.weights else 0.0
        expo = self._log_compensator(t) - self.a * x[..., 0] - 0.5 * self.a**2 * t + debt
        return np.exp(expo) - 1.0

    def heat_kernel(self):
        a, n, weights = self.a, self.n, np.asarray(self.weights)

        def F(times, values):
            return np.exp(-a * values[:, 0] + values[:, 1:] @ weights)

        def w(t, u):
            s = t + u
            return (n + 1.0) * (self.horizon - t - u) ** n * np.exp(-0.5 * a**2 * s + self._log_compensator(s))

        return HeatKernelPair(F=F, w=w)


def eval_A(model: RationalFactorModel, t: float, state) -> np.ndarray:
    """A_t of a factor model at the given LRB state"""
    return model.A(t, state)

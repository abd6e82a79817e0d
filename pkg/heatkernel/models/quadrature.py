"""
Heat-kernel quadrature - numerical Y_tT for arbitrary (F, w) pairs

Y_tT = int_{T-t}^{U-t} E[F(t+u, X_{t+u}) | X_t] w(T, u - T + t) du

The outer u-integral is adaptive Gauss-Kronrod (scipy.integrate.quad / nquad). The inner
conditional expectation is a tensor Gauss rule matched to each component's transition law
under the requested measure; under P it is the posterior mixture over terminal atoms.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import roots_genlaguerre, roots_hermitenorm, roots_jacobi

from ..config.settings import settings
from ..lrb import stable
from ..lrb.bridge import BridgeSpec, Measure
from ..lrb.laws import LawKind, LevyLaw, characteristic_exponent
from ..lrb.measures import posterior
from ..utils.errors import InvalidParameterError, QuadratureError
from .factors import RationalFactorModel
from .families import KernelFunctions, SmoothFunction

logger = logging.getLogger(__name__)

# total tensor nodes allowed for one inner expectation
NODE_BUDGET = 2**16
# shapes below this are treated as a point mass at zero
_TINY = 1e-10
# posterior atoms lighter than this fraction of the heaviest one are skipped
_ATOM_CUTOFF = 1e-16
# Fourier truncation search doubles at most this many times
_MAX_DOUBLINGS = 60
IMAG_TOLERANCE = 1e-8

Rule = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class HeatKernelSpec:
    """A weighted heat kernel on an LRB.

    F(times, values) takes one time per read component and values of shape (N, k);
    w(t, *offsets) takes one offset, or one per component when separate_offsets is set.
    components lists the bridge components F reads (all of them by default).
    """

    bridge: BridgeSpec
    F: Callable
    w: Callable
    f0: SmoothFunction
    f1: SmoothFunction
    measure: Measure = Measure.P
    separate_offsets: bool = False
    components: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        comps = tuple(range(self.bridge.dimension)) if self.components is None else tuple(self.components)
        if not comps or any(c < 0 or c >= self.bridge.dimension for c in comps):
            raise InvalidParameterError(f"components {comps} do not index a {self.bridge.dimension}-dim bridge")
        if len(set(comps)) != len(comps):
            raise InvalidParameterError(f"components {comps} repeat an index")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "measure", Measure(self.measure))
        if self.measure == Measure.M:
            for c in comps:
                if self.bridge.laws[c].kind != LawKind.BROWNIAN:
                    raise InvalidParameterError("the bridge-to-zero measure M needs Brownian components only")

    @property
    def horizon(self) -> float:
        return self.bridge.horizon

    @classmethod
    def from_factor(cls, model: RationalFactorModel, bridge: BridgeSpec, functions: KernelFunctions,
                    measure: Optional[Measure] = None) -> "HeatKernelSpec":
        """The (F, w) pair of a factor model, read under its auxiliary measure by default"""
        pair = model.heat_kernel()
        return cls(
            bridge=bridge,
            F=pair.F,
            w=pair.w,
            f0=functions.f0,
            f1=functions.f1,
            measure=model.measure if measure is None else measure,
            separate_offsets=pair.separate_offsets,
            components=model.components,
        )


@lru_cache(maxsize=32)
def _hermite(n: int) -> Rule:
    z, w = roots_hermitenorm(n)
    return z, w / w.sum()


def _gaussian_rule(mean: float, var: float, n: int) -> Rule:
    z, w = _hermite(n)
    return mean + np.sqrt(max(var, 0.0)) * z, w


def _gamma_rule(shape: float, n: int) -> Rule:
    if shape < _TINY:
        return np.zeros(1), np.ones(1)
    x, w = roots_genlaguerre(n, shape - 1.0)
    return x, w / w.sum()


def _beta_rule(a: float, b: float, n: int) -> Rule:
    """Nodes of Beta(a, b) on [0, 1]"""
    if a < _TINY:
        return np.zeros(1), np.ones(1)
    if b < _TINY:
        return np.ones(1), np.ones(1)
    x, w = roots_jacobi(n, b - 1.0, a - 1.0)
    return 0.5 * (1.0 + x), w / w.sum()


def _stable_rule(law: LevyLaw, dt: float, n: int) -> Rule:
    # Lévy(c) is c / Z^2; an even Hermite rule has no node at 0
    z, w = _hermite(n + n % 2)
    return law.stable_scale(dt) / z**2, w


def _component_rule(bridge: BridgeSpec, measure: Measure, i: int, t: float, s: float,
                    x: float, z: Optional[float], n: int) -> Rule:
    """Nodes and weights of X^i_s given X^i_t = x (and X^i_U pinned at z under P)"""
    law = bridge.laws[i]
    U = bridge.horizon
    dt = s - t
    if dt <= 0:
        return np.array([x]), np.ones(1)
    rest = U - s

    if measure == Measure.L:
        if law.kind == LawKind.BROWNIAN:
            return _gaussian_rule(x, dt, n)
        if law.kind == LawKind.GAMMA:
            y, w = _gamma_rule(law.m * dt, n)
        else:
            y, w = _stable_rule(law, dt, n)
        return x + y, w

    if measure == Measure.M:
        return _gaussian_rule(x * rest / (U - t), dt * rest / (U - t), n)

    if law.kind == LawKind.BROWNIAN:
        return _gaussian_rule(x + (z - x) * dt / (U - t), dt * rest / (U - t), n)
    if z - x <= 0:
        return np.array([x]), np.ones(1)
    if law.kind == LawKind.GAMMA:
        fraction, w = _beta_rule(law.m * dt, law.m * rest, n)
        return x + (z - x) * fraction, w
    y, w = stable.bridge_nodes(law, dt, rest, z - x)
    return x + y, w


def _nodes_per_component(k: int) -> int:
    return int(min(settings.gauss_nodes, max(8, np.floor(NODE_BUDGET ** (1.0 / k)))))


def _tensor(F: Callable, times: np.ndarray, rules: List[Rule]) -> float:
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    values = np.stack([g.ravel() for g in grids], axis=-1)
    weights = reduce(np.multiply.outer, [r[1] for r in rules]).ravel()
    return float(np.asarray(F(times, values), dtype=float) @ weights)


def conditional_expectation(spec: HeatKernelSpec, t: float, times: Sequence[float], state) -> float:
    """E[F(times, X) | X_t = state] under the spec's measure"""
    bridge = spec.bridge
    times = np.asarray(times, dtype=float)
    state = np.asarray(state, dtype=float)
    n = _nodes_per_component(len(spec.components))

    if spec.measure != Measure.P:
        rules = [_component_rule(bridge, spec.measure, c, t, s, state[c], None, n)
                 for c, s in zip(spec.components, times)]
        return _tensor(spec.F, times, rules)

    q = posterior(bridge, t, state)
    pinned = bridge.pinned_terminal()
    keep = np.flatnonzero(q > _ATOM_CUTOFF * q.max())
    total = 0.0
    for k in keep:
        rules = [_component_rule(bridge, Measure.P, c, t, s, state[c], pinned[k, c], n)
                 for c, s in zip(spec.components, times)]
        total += q[k] * _tensor(spec.F, times, rules)
    return total


def _check_times(horizon: float, t: float, T: float) -> None:
    if t < 0 or T < t or T > horizon:
        raise InvalidParameterError(f"need 0 <= t <= T <= U, got t={t}, T={T}, U={horizon}")


def _checked(value: float, abserr: float, what: str) -> float:
    target = max(settings.quad_epsabs, settings.quad_epsrel * abs(value))
    logger.debug(f"{what}: value {value:.12g}, error estimate {abserr:.3g}")
    if abserr > target:
        raise QuadratureError(f"{what} did not converge: error estimate {abserr:.3g} above {target:.3g}")
    return value


def Y_quadrature(spec: HeatKernelSpec, t: float, T: float, state) -> float:
    """Y_tT by adaptive quadrature of the u-integral"""
    U = spec.horizon
    _check_times(U, t, T)
    state = np.asarray(state, dtype=float).ravel()
    if state.size != spec.bridge.dimension:
        raise InvalidParameterError(f"state has {state.size} components, expected {spec.bridge.dimension}")
    if T == U:
        return 0.0
    lo, hi = T - t, U - t
    k = len(spec.components)
    opts = {"epsabs": settings.quad_epsabs, "epsrel": settings.quad_epsrel, "limit": 200}

    if not spec.separate_offsets:
        def integrand(u):
            times = np.full(k, t + u)
            return conditional_expectation(spec, t, times, state) * spec.w(T, u - T + t)

        result = integrate.quad(integrand, lo, hi, full_output=1, **opts)
        return _checked(result[0], result[1], f"Y({t:g}, {T:g})")

    def integrand_n(*u):
        u = np.asarray(u)
        return conditional_expectation(spec, t, t + u, state) * spec.w(T, *(u - T + t))

    value, abserr, info = integrate.nquad(integrand_n, [(lo, hi)] * k, opts=opts, full_output=True)
    return _checked(value, abserr, f"Y({t:g}, {T:g})")


def _truncation(F_hat: Callable, s: float) -> float:
    """Half-width beyond which |F_hat(s, y)| stays below the cutoff relative to its peak"""
    nodes = np.linspace(-1.0, 1.0, 201)
    peak = np.max(np.abs(F_hat(s, nodes)))
    if peak == 0:
        return 0.0
    width = 1.0
    for _ in range(_MAX_DOUBLINGS):
        edge = np.abs(F_hat(s, np.array([-width, width])))
        if np.all(edge < settings.fourier_cutoff * peak):
            return width
        width *= 2.0
    raise QuadratureError(f"F_hat does not decay at s={s:g}")


def Y_fourier(F_hat: Callable, law: LevyLaw, t: float, T: float, state: float, *,
              w: Callable, horizon: float) -> float:
    """Y_tT under L from the Fourier transform of F.

    F(s, x) = int F_hat(s, y) exp(-i y x) dy; F_hat must make F positive and integrable.
    """
    _check_times(horizon, t, T)
    if T == horizon:
        return 0.0
    x = float(state)
    opts = {"epsabs": settings.quad_epsabs, "epsrel": settings.quad_epsrel, "limit": 200}

    def inner(u: float, part: Callable) -> float:
        s = t + u
        width = _truncation(F_hat, s)
        if width == 0:
            return 0.0

        def f(y):
            return part(np.exp(-1j * y * x - u * characteristic_exponent(law, y)) * F_hat(s, y))

        result = integrate.quad(f, -width, width, points=[0.0], full_output=1, **opts)
        return result[0]

    def outer(part: Callable) -> Tuple[float, float]:
        result = integrate.quad(lambda u: inner(u, part) * w(T, u - T + t), T - t, horizon - t,
                                full_output=1, **opts)
        return result[0], result[1]

    real, abserr = outer(np.real)
    imag, _ = outer(np.imag)
    if abs(imag) > IMAG_TOLERANCE * max(1.0, abs(real)):
        raise QuadratureError(f"imaginary residual {imag:.3g} exceeds tolerance")
    return _checked(real, abserr, f"Fourier Y({t:g}, {T:g})")

"""
Bridge Engine - multivariate Lévy random bridges and their path samplers
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import settings
from ..utils.errors import GridError, InvalidParameterError, SupportError
from ..utils.rng import ROLE_COMPONENT, ROLE_TERMINAL, map_blocks, stream
from . import stable
from .laws import LawKind, LevyLaw, in_support, sample_increments
from .prior import TerminalPrior, sample_terminal_indices

logger = logging.getLogger(__name__)


class Measure(str, Enum):
    """Probability measure a path was sampled under"""

    P = "P"
    L = "L"
    M = "M"


@dataclass(frozen=True, eq=False)
class BridgeSpec:
    """A d-dimensional LRB: one generating law per component, a joint terminal prior
    and, for Brownian components, an information-flow rate sigma.

    A Brownian component is the information process sigma*t*X + beta_t, i.e. a bridge
    of unit Brownian motion pinned at sigma*U*X. Other components are pinned at X.
    """

    horizon: float
    laws: Tuple[LevyLaw, ...]
    prior: TerminalPrior
    sigma: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.horizon > 0:
            raise InvalidParameterError(f"horizon U must be positive, got {self.horizon}")
        laws = tuple(self.laws)
        sigma = tuple(float(s) for s in self.sigma) if self.sigma else tuple(1.0 for _ in laws)
        prior = self.prior.nonzero()
        if len(laws) == 0:
            raise InvalidParameterError("bridge needs at least one component")
        if prior.dimension != len(laws):
            raise InvalidParameterError(
                f"prior has dimension {prior.dimension} but {len(laws)} laws were given"
            )
        if len(sigma) != len(laws):
            raise InvalidParameterError(f"expected {len(laws)} sigma values, got {len(sigma)}")
        for i, law in enumerate(laws):
            if law.kind == LawKind.BROWNIAN and not sigma[i] > 0:
                raise InvalidParameterError(f"sigma of Brownian component {i} must be positive")
        object.__setattr__(self, "laws", laws)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "prior", prior)

        pinned = self.pinned_terminal()
        for i, law in enumerate(laws):
            ok = in_support(law, self.horizon, pinned[:, i])
            if not ok.all():
                bad = prior.support[~ok, i]
                raise SupportError(f"terminal atoms {bad.tolist()} outside the support of {law.describe()}")

    @property
    def dimension(self) -> int:
        return len(self.laws)

    @property
    def brownian_components(self) -> List[int]:
        return [i for i, law in enumerate(self.laws) if law.kind == LawKind.BROWNIAN]

    @property
    def all_brownian(self) -> bool:
        return len(self.brownian_components) == self.dimension

    def pinned_terminal(self) -> np.ndarray:
        """Terminal values of the generating processes, (K, d): sigma*U*x for Brownian components"""
        scale = np.array(
            [self.sigma[i] * self.horizon if law.kind == LawKind.BROWNIAN else 1.0
             for i, law in enumerate(self.laws)]
        )
        return self.prior.support * scale[None, :]

    def with_prior(self, prior: TerminalPrior) -> "BridgeSpec":
        return BridgeSpec(self.horizon, self.laws, prior, self.sigma)


def check_grid(grid: Sequence[float], horizon: float) -> np.ndarray:
    """Validate a time grid strictly inside [0, U) and return it with a leading 0"""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise GridError("time grid is empty")
    if grid[0] < 0:
        raise GridError(f"time grid starts before 0: {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise GridError("time grid must be strictly increasing")
    limit = horizon * (1.0 - settings.time_guard)
    if grid[-1] > limit:
        raise GridError(f"time grid reaches {grid[-1]:g}, beyond the guard U - {settings.time_guard:g}U")
    if grid[0] > 0:
        grid = np.concatenate([[0.0], grid])
    return grid


@dataclass(frozen=True, eq=False)
class LrbPath:
    """One sampled path: values has shape (d, len(grid)); grid starts at 0"""

    grid: np.ndarray
    values: np.ndarray
    measure: Measure
    terminal: Optional[np.ndarray] = None

    def state(self, k: int) -> np.ndarray:
        """Component values at grid index k"""
        return self.values[:, k]


@dataclass(frozen=True, eq=False)
class PathBatch:
    """Paths sharing a grid and a measure: values (n, d, G), terminal (n, d) under P"""

    grid: np.ndarray
    values: np.ndarray
    measure: Measure
    terminal: Optional[np.ndarray] = None

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def path(self, i: int) -> LrbPath:
        terminal = None if self.terminal is None else self.terminal[i]
        return LrbPath(self.grid, self.values[i], self.measure, terminal)

    def states(self, k: int) -> np.ndarray:
        """All paths' states at grid index k, shape (n, d)"""
        return self.values[:, :, k]

    def component(self, i: int) -> np.ndarray:
        return self.values[:, i, :]


def _brownian_bridge(grid: np.ndarray, horizon: float, z: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = z.shape[0]
    out = np.zeros((n, grid.size))
    x = np.zeros(n)
    for k in range(grid.size - 1):
        t, t_next = grid[k], grid[k + 1]
        dt = t_next - t
        tau = horizon - t
        mean = x + (z - x) * dt / tau
        std = np.sqrt(dt * (horizon - t_next) / tau)
        x = mean + std * rng.standard_normal(n)
        out[:, k + 1] = x
    return out


def _subordinator_bridge(law: LevyLaw, grid: np.ndarray, horizon: float, z: np.ndarray,
                         rng: np.random.Generator) -> np.ndarray:
    n = z.shape[0]
    out = np.zeros((n, grid.size))
    remaining = z.astype(float).copy()
    for k in range(grid.size - 1):
        dt = grid[k + 1] - grid[k]
        rest = horizon - grid[k + 1]
        if law.kind == LawKind.GAMMA:
            # share of the remaining distance still to come is Beta(m*rest, m*dt)
            remaining = remaining * rng.beta(law.m * rest, law.m * dt, size=n)
        else:
            remaining = stable.step_remaining(law, dt, rest, remaining, rng)
        out[:, k + 1] = z - remaining
    return out


def _bridge_block(law: LevyLaw, grid: np.ndarray, horizon: float, z: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
    if law.kind == LawKind.BROWNIAN:
        return _brownian_bridge(grid, horizon, z, rng)
    return _subordinator_bridge(law, grid, horizon, z, rng)


def _levy_block(law: LevyLaw, grid: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    dt = np.diff(grid)
    out = np.zeros((n, grid.size))
    for k, step in enumerate(dt):
        out[:, k + 1] = out[:, k] + sample_increments(law, step, n, rng)
    return out


def sample_bridge(law: LevyLaw, horizon: float, z: float, grid: Sequence[float],
                  rng: np.random.Generator) -> np.ndarray:
    """Path of the generating process conditioned on L_U = z, on grid (leading 0 included)"""
    full = check_grid(grid, horizon)
    if not in_support(law, horizon, z):
        raise SupportError(f"terminal value {z} outside the support of {law.describe()}")
    return _bridge_block(law, full, horizon, np.array([float(z)]), rng)[0]


def _sample_block(spec: BridgeSpec, grid: np.ndarray, n: int, measure: Measure,
                  terminal_rng: np.random.Generator,
                  component_rngs: Sequence[np.random.Generator]) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    values = np.empty((n, spec.dimension, grid.size))
    terminal = None
    if measure == Measure.P:
        idx = sample_terminal_indices(spec.prior, n, terminal_rng)
        terminal = spec.prior.support[idx]
        pinned = spec.pinned_terminal()[idx]
        for i, law in enumerate(spec.laws):
            values[:, i, :] = _bridge_block(law, grid, spec.horizon, pinned[:, i], component_rngs[i])
    elif measure == Measure.L:
        for i, law in enumerate(spec.laws):
            values[:, i, :] = _levy_block(law, grid, n, component_rngs[i])
    else:
        if not spec.all_brownian:
            raise InvalidParameterError("the bridge-to-zero measure M needs Brownian components only")
        zero = np.zeros(n)
        for i in range(spec.dimension):
            values[:, i, :] = _brownian_bridge(grid, spec.horizon, zero, component_rngs[i])
    return values, terminal


def _simulate_one(spec: BridgeSpec, grid: Sequence[float], rng: np.random.Generator,
                  measure: Measure) -> LrbPath:
    full = check_grid(grid, spec.horizon)
    rngs = [rng] * spec.dimension
    values, terminal = _sample_block(spec, full, 1, measure, rng, rngs)
    return LrbPath(full, values[0], measure, None if terminal is None else terminal[0])


def simulate_under_P(spec: BridgeSpec, grid: Sequence[float], rng: np.random.Generator) -> LrbPath:
    """Draw X_U from the prior, then pin every component at it"""
    return _simulate_one(spec, grid, rng, Measure.P)


def simulate_under_L(spec: BridgeSpec, grid: Sequence[float], rng: np.random.Generator) -> LrbPath:
    """Sample each component as its unconditioned generating Lévy process"""
    return _simulate_one(spec, grid, rng, Measure.L)


def simulate_under_M(spec: BridgeSpec, grid: Sequence[float], rng: np.random.Generator) -> LrbPath:
    """Sample each Brownian component as a standard Brownian bridge to 0"""
    return _simulate_one(spec, grid, rng, Measure.M)


def simulate(spec: BridgeSpec, grid: Sequence[float], n_paths: int, seed: int,
             measure: Measure = Measure.P, workers: Optional[int] = None,
             block_size: Optional[int] = None) -> PathBatch:
    """Simulate a batch of paths block by block.

    Block b draws the terminal atoms from stream (seed, b, ROLE_TERMINAL) and component i
    from stream (seed, b, ROLE_COMPONENT + i); the result is the same for any worker count.
    """
    measure = Measure(measure)
    full = check_grid(grid, spec.horizon)
    block_size = block_size or settings.block_size
    workers = workers or settings.workers

    def work(block: int, n: int):
        terminal_rng = stream(seed, block, ROLE_TERMINAL)
        rngs = [stream(seed, block, ROLE_COMPONENT + i) for i in range(spec.dimension)]
        return _sample_block(spec, full, n, measure, terminal_rng, rngs)

    results = map_blocks(work, n_paths, block_size, workers)
    values = np.concatenate([r[0] for r in results], axis=0)
    terminal = None
    if measure == Measure.P:
        terminal = np.concatenate([r[1] for r in results], axis=0)
    logger.debug(f"Simulated {n_paths} paths under {measure.value} on {full.size} grid points")
    return PathBatch(full, values, measure, terminal)

"""
Finite discrete terminal priors
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class TerminalPrior:
    """Joint atom table for the terminal vector X_U.

    support has shape (K, d); probs has shape (K,).
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if support.ndim != 2 or support.shape[0] != probs.shape[0]:
            raise InvalidParameterError(
                f"prior support {support.shape} does not match probs {probs.shape}"
            )
        if probs.size == 0:
            raise InvalidParameterError("prior needs at least one atom")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidParameterError("prior probabilities must be non-negative and finite")
        if abs(probs.sum() - 1.0) > PROB_TOLERANCE:
            raise InvalidParameterError(f"prior probabilities sum to {probs.sum():.12g}, not 1")
        if not np.all(np.isfinite(support)):
            raise InvalidParameterError("prior atoms must be finite")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, z: Sequence[float]) -> "TerminalPrior":
        return cls(np.atleast_2d(np.asarray(z, dtype=float)), np.array([1.0]))

    @classmethod
    def univariate(cls, atoms: Sequence[float], probs: Sequence[float]) -> "TerminalPrior":
        return cls(np.asarray(atoms, dtype=float).reshape(-1, 1), np.asarray(probs, dtype=float))

    @classmethod
    def product(cls, *priors: "TerminalPrior") -> "TerminalPrior":
        """Joint table of independent marginal priors (component order preserved)"""
        priors = [p.nonzero() for p in priors]
        rows, weights = [], []
        for combo in itertools.product(*[range(len(p.probs)) for p in priors]):
            rows.append(np.concatenate([p.support[k] for p, k in zip(priors, combo)]))
            weights.append(np.prod([p.probs[k] for p, k in zip(priors, combo)]))
        weights = np.asarray(weights)
        return cls(np.asarray(rows), weights / weights.sum())

    @property
    def dimension(self) -> int:
        return self.support.shape[1]

    @property
    def size(self) -> int:
        return self.support.shape[0]

    def nonzero(self) -> "TerminalPrior":
        """Drop atoms carrying zero probability"""
        keep = self.probs > 0
        if keep.all():
            return self
        return TerminalPrior(self.support[keep], self.probs[keep])

    def mean(self) -> np.ndarray:
        return self.probs @ self.support

    def marginal(self, component: int) -> "TerminalPrior":
        """Univariate marginal of one component"""
        values, inverse = np.unique(self.support[:, component], return_inverse=True)
        weights = np.bincount(inverse, weights=self.probs, minlength=values.size)
        return TerminalPrior.univariate(values, weights / weights.sum())


def sample_terminal_indices(prior: TerminalPrior, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n atom indices with probabilities p_k"""
    return rng.choice(prior.size, size=n, p=prior.probs)


def sample_terminal(prior: TerminalPrior, rng: np.random.Generator) -> np.ndarray:
    """Draw one terminal point z_k with probability p_k"""
    return prior.support[sample_terminal_indices(prior, 1, rng)[0]].copy()

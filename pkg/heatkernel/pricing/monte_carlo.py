"""
Monte-Carlo pricing harness

Prices are auxiliary-measure expectations of numerator payoffs, e.g. a caplet is
E^M[(K N(t) - N(T))^+] with N(T) = P0(T) + sum Lambda_tT. Under P the same payoffs are
weighted by the density of the auxiliary measure (ell or dM/dP) at the exercise time.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from ..lrb.bridge import Measure, simulate
from ..lrb.measures import ell, m_density
from ..utils.errors import InvalidParameterError
from .assets import AssetModel
from .bonds import BondModel, aux_measure

logger = logging.getLogger(__name__)

MIN_PATHS = 100


class InstrumentKind(str, Enum):
    BOND = "bond"
    CAPLET = "caplet"
    SWAPTION = "swaption"
    ASSET_CLAIM = "asset_claim"


@dataclass(frozen=True)
class Instrument:
    """A claim with unit notional; t is the exercise date of options (t = T_0 for swaptions)"""

    kind: InstrumentKind
    T: float
    t: float = 0.0
    K: float = 1.0
    resets: Tuple[float, ...] = field(default=())
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", InstrumentKind(self.kind))
        object.__setattr__(self, "resets", tuple(float(r) for r in self.resets))
        if self.kind in (InstrumentKind.CAPLET, InstrumentKind.SWAPTION) and not self.K > 0:
            raise InvalidParameterError(f"strike must be positive, got {self.K}")
        if self.kind == InstrumentKind.CAPLET and not 0 <= self.t < self.T:
            raise InvalidParameterError(f"caplet needs 0 <= t < T, got t={self.t}, T={self.T}")
        if self.kind == InstrumentKind.SWAPTION:
            if not self.resets:
                raise InvalidParameterError("swaption needs reset dates")
            if self.resets[0] <= self.t or any(b <= a for a, b in zip(self.resets, self.resets[1:])):
                raise InvalidParameterError("swaption resets must increase from the maturity t")
            object.__setattr__(self, "T", self.resets[-1])

    @classmethod
    def bond(cls, T: float, id: str = "") -> "Instrument":
        return cls(InstrumentKind.BOND, T, id=id)

    @classmethod
    def caplet(cls, t: float, T: float, K: float, id: str = "") -> "Instrument":
        return cls(InstrumentKind.CAPLET, T, t, K, id=id)

    @classmethod
    def swaption(cls, t: float, resets, K: float, id: str = "") -> "Instrument":
        resets = tuple(resets)
        return cls(InstrumentKind.SWAPTION, resets[-1], t, K, resets, id=id)

    @classmethod
    def asset_claim(cls, T: float, id: str = "") -> "Instrument":
        return cls(InstrumentKind.ASSET_CLAIM, T, id=id)

    @property
    def evaluation_time(self) -> float:
        """Time at which the payoff is fixed by the LRB state"""
        if self.kind in (InstrumentKind.CAPLET, InstrumentKind.SWAPTION):
            return self.t
        return self.T


Model = Union[BondModel, AssetModel]


def payoff(instrument: Instrument, model: Model, states: np.ndarray) -> np.ndarray:
    """Numerator payoff per path given the states (n, d) at the evaluation time"""
    when = instrument.evaluation_time
    if instrument.kind == InstrumentKind.ASSET_CLAIM:
        if not isinstance(model, AssetModel):
            raise InvalidParameterError("asset claims need an AssetModel")
        return model.cash_numerator(instrument.T, when, states)
    if not isinstance(model, BondModel):
        raise InvalidParameterError(f"{instrument.kind.value} needs a BondModel")
    if instrument.kind == InstrumentKind.BOND:
        return model.numerator(instrument.T, when, states)
    if instrument.kind == InstrumentKind.CAPLET:
        value = instrument.K * model.numerator(when, when, states) - model.numerator(instrument.T, when, states)
        return np.maximum(value, 0.0)
    resets = instrument.resets
    value = model.numerator(when, when, states) - model.numerator(resets[-1], when, states)
    for T in resets:
        value = value - instrument.K * model.numerator(T, when, states)
    return np.maximum(value, 0.0)


def _model_measure(model: Model) -> Measure:
    if isinstance(model, AssetModel):
        return model.measure
    return aux_measure(model)


def mc_price(instrument: Instrument, model: Model, n_paths: int, seed: int,
             measure: Optional[Measure] = None, workers: Optional[int] = None) -> Tuple[float, float]:
    """(estimate, standard error) of the time-0 price"""
    if n_paths < MIN_PATHS:
        raise InvalidParameterError(f"mc_price needs at least {MIN_PATHS} paths, got {n_paths}")
    bridge = model.bridge
    if bridge is None:
        raise InvalidParameterError("the model carries no bridge to simulate")
    aux = _model_measure(model)
    measure = aux if measure is None else Measure(measure)
    if measure not in (aux, Measure.P):
        raise InvalidParameterError(f"price under {aux.value} or P, not {measure.value}")

    when = instrument.evaluation_time
    if when == 0:
        states = np.zeros((n_paths, bridge.dimension))
        values = payoff(instrument, model, states)
    else:
        batch = simulate(bridge, [0.0, when], n_paths, seed, measure, workers=workers)
        states = batch.states(1)
        values = payoff(instrument, model, states)
        if measure == Measure.P:
            density = m_density if aux == Measure.M else ell
            values = values * density(bridge, when, states)

    estimate = float(np.mean(values))
    se = float(np.std(values, ddof=1) / np.sqrt(n_paths))
    logger.debug(f"MC {instrument.kind.value} under {measure.value}: {estimate:.8g} +/- {se:.3g}")
    return estimate, se

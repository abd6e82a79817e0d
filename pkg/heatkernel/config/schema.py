"""
Run configuration - YAML files validated into model, bridge, instrument and scenario objects
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..lrb.bridge import BridgeSpec
from ..lrb.laws import LevyLaw
from ..lrb.prior import PROB_TOLERANCE, TerminalPrior
from ..models.factors import (
    Contagion,
    DebtFactor,
    ExpLinearDiscount,
    ExpLinearTwoFactor,
    ExpQuadratic,
    FactorKind,
    HeavyTailNumerator,
    Quadratic,
    RationalFactorModel,
)
from ..models.families import F0F1Family, KernelFunctions, SmoothFunction
from ..models.kernel import Functions, calibrate_f0
from ..pricing.assets import AssetModel
from ..pricing.bonds import BondModel
from ..pricing.curve import DiscountCurve
from ..pricing.monte_carlo import Instrument
from ..scenario.contagion import CountrySpec, ExposureMatrix, ScenarioConfig
from ..utils.errors import ConfigError, HeatKernelError
from .settings import settings

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

FACTORS = {
    FactorKind.QUADRATIC: Quadratic,
    FactorKind.EXP_QUADRATIC: ExpQuadratic,
    FactorKind.EXP_LINEAR_TWO_FACTOR: ExpLinearTwoFactor,
    FactorKind.DEBT: DebtFactor,
    FactorKind.HEAVY_TAIL_NUMERATOR: HeavyTailNumerator,
    FactorKind.EXP_LINEAR_DISCOUNT: ExpLinearDiscount,
    FactorKind.CONTAGION: Contagion,
}


class StrictModel(BaseModel):
    """Unknown keys are errors"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class FamilyConfig(StrictModel):
    """f0(t) = exp(-alpha t), f1(t) = beta / ln(gamma + t)"""

    alpha: float = Field(ge=0)
    beta: float = Field(ge=0)
    gamma: float = Field(gt=1)

    def build(self) -> F0F1Family:
        return F0F1Family(self.alpha, self.beta, self.gamma)


def _check_probs(probs: List[float]) -> List[float]:
    if any(p < 0 for p in probs):
        raise ValueError("probabilities must be non-negative")
    if abs(sum(probs) - 1.0) > PROB_TOLERANCE:
        raise ValueError(f"probabilities sum to {sum(probs):.12g}, not 1")
    return probs


class PriorConfig(StrictModel):
    atoms: List[float] = Field(min_length=1)
    probs: List[float] = Field(min_length=1)

    @field_validator("probs")
    @classmethod
    def probabilities(cls, probs: List[float]) -> List[float]:
        return _check_probs(probs)

    @model_validator(mode="after")
    def same_length(self) -> "PriorConfig":
        if len(self.atoms) != len(self.probs):
            raise ValueError(f"{len(self.atoms)} atoms but {len(self.probs)} probabilities")
        return self

    def build(self) -> TerminalPrior:
        return TerminalPrior.univariate(self.atoms, self.probs)


class JointPriorConfig(StrictModel):
    """Joint atom table for dependent terminal values; each atom lists one value per bridge component"""

    atoms: List[List[float]] = Field(min_length=1)
    probs: List[float] = Field(min_length=1)

    @field_validator("probs")
    @classmethod
    def probabilities(cls, probs: List[float]) -> List[float]:
        return _check_probs(probs)

    @model_validator(mode="after")
    def rectangular(self) -> "JointPriorConfig":
        if len(self.atoms) != len(self.probs):
            raise ValueError(f"{len(self.atoms)} atoms but {len(self.probs)} probabilities")
        if len({len(row) for row in self.atoms}) != 1 or not self.atoms[0]:
            raise ValueError("every atom needs the same non-zero number of components")
        return self

    @property
    def dimension(self) -> int:
        return len(self.atoms[0])

    def build(self, dimension: int, path: str) -> TerminalPrior:
        if self.dimension != dimension:
            raise ConfigError(f"joint prior atoms have {self.dimension} components, the bridge has {dimension}",
                              path=f"{path}.atoms")
        return TerminalPrior(np.asarray(self.atoms, dtype=float), np.asarray(self.probs, dtype=float))


class ComponentConfig(StrictModel):
    """One bridge component: its generating law, information rate and terminal prior"""

    law: Literal["brownian", "gamma", "stable_half"]
    sigma: float = Field(1.0, gt=0)
    m: float = Field(1.0, gt=0)
    alpha: float = Field(1.0, gt=0)
    prior: Optional[PriorConfig] = None

    def build_law(self) -> LevyLaw:
        if self.law == "gamma":
            return LevyLaw.gamma(self.m)
        if self.law == "stable_half":
            return LevyLaw.stable_half(self.alpha)
        return LevyLaw.brownian()


class CurveConfig(StrictModel):
    """Either a flat rate or explicit (t, P) points"""

    flat_rate: Optional[float] = Field(None, ge=0)
    times: Optional[List[float]] = None
    values: Optional[List[float]] = None

    @model_validator(mode="after")
    def one_form(self) -> "CurveConfig":
        points = self.times is not None or self.values is not None
        if (self.flat_rate is None) == (not points):
            raise ValueError("give either flat_rate or times/values")
        if points and (self.times is None or self.values is None):
            raise ValueError("times and values must be given together")
        return self

    def build(self, horizon: float) -> DiscountCurve:
        if self.flat_rate is not None:
            return DiscountCurve.flat(self.flat_rate, horizon)
        return DiscountCurve(np.asarray(self.times), np.asarray(self.values))


class ModelConfig(StrictModel):
    kind: FactorKind
    params: Dict[str, Union[float, List[float]]] = Field(default_factory=dict)
    components: Optional[List[int]] = None
    family: FamilyConfig
    calibrate: bool = False

    def build_factor(self, horizon: float) -> RationalFactorModel:
        params = {k: tuple(v) if isinstance(v, list) else v for k, v in self.params.items()}
        if self.components is not None:
            params["components"] = tuple(self.components)
        try:
            return FACTORS[self.kind](horizon=horizon, **params)
        except TypeError as e:
            raise ConfigError(f"unsupported parameter for {self.kind.value}: {e}", path="model.params") from e


class GridConfig(StrictModel):
    steps: int = Field(200, ge=1)
    end: Optional[float] = Field(None, gt=0)

    def build(self, end: float) -> np.ndarray:
        return np.linspace(0.0, self.end or end, self.steps + 1)


class InstrumentConfig(StrictModel):
    id: str
    kind: Literal["bond", "caplet", "swaption"]
    T: Optional[float] = Field(None, gt=0)
    t: float = Field(0.0, ge=0)
    K: float = Field(1.0, gt=0)
    resets: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def dates(self) -> "InstrumentConfig":
        if self.kind == "swaption" and not self.resets:
            raise ValueError("swaption needs resets")
        if self.kind != "swaption" and self.T is None:
            raise ValueError(f"{self.kind} needs a maturity T")
        return self

    def build(self) -> Instrument:
        if self.kind == "bond":
            return Instrument.bond(self.T, id=self.id)
        if self.kind == "caplet":
            return Instrument.caplet(self.t, self.T, self.K, id=self.id)
        return Instrument.swaption(self.t, self.resets, self.K, id=self.id)


class AssetConfig(StrictModel):
    """An asset with flat initial curve S0 and constant g1, read off the run bridge"""

    id: str = Field(min_length=1)
    kind: Literal["diffusion", "heavy_tail"]
    maturity: float = Field(gt=0)
    S0: float = 1.0
    g1: float = 0.01
    limited_liability: bool = False
    components: Optional[List[int]] = None
    params: Dict[str, float] = Field(default_factory=dict)
    family: Optional[FamilyConfig] = None

    def build(self, horizon: float, functions: Functions, bridge: BridgeSpec) -> AssetModel:
        if self.maturity >= horizon:
            raise ConfigError(f"asset maturity {self.maturity} must lie before U={horizon}", path="assets")
        S0 = SmoothFunction.constant(self.S0, name="S0")
        g1 = SmoothFunction.constant(self.g1, name="g1")
        functions = self.family.build() if self.family is not None else functions
        params = dict(self.params)
        if self.components is not None:
            params["components"] = tuple(self.components)
        factory = AssetModel.diffusion if self.kind == "diffusion" else AssetModel.heavy_tail
        try:
            return factory(horizon, S0, g1, functions, bridge=bridge,
                           limited_liability=self.limited_liability, **params)
        except TypeError as e:
            raise ConfigError(f"unsupported parameter for a {self.kind} asset: {e}", path="assets") from e


class CountryConfig(StrictModel):
    name: str = Field(min_length=1)
    family: FamilyConfig
    sigma: float = Field(0.5, gt=0)
    a: float = Field(0.5, ge=0)
    own_loading: float = Field(0.5, ge=0, lt=1)
    brownian_prior: PriorConfig
    debt_prior: PriorConfig

    def build(self) -> CountrySpec:
        return CountrySpec(self.name, self.family.build(), self.sigma, self.a, self.own_loading,
                           self.brownian_prior.build(), self.debt_prior.build())


class ContagionConfig(StrictModel):
    maturity: float = Field(gt=0)
    order: int = Field(2, ge=0)
    base_country: str = "GER"
    countries: List[CountryConfig] = Field(min_length=1)
    exposures: List[List[float]]
    rates: Optional[List[float]] = None
    joint_prior: Optional[JointPriorConfig] = None

    @model_validator(mode="after")
    def square(self) -> "ContagionConfig":
        n = len(self.countries)
        if len(self.exposures) != n or any(len(row) != n for row in self.exposures):
            raise ValueError(f"exposures must be a {n}x{n} table")
        if self.rates is not None and len(self.rates) != n:
            raise ValueError(f"expected {n} debt rates")
        return self

    def build(self, horizon: float, grid: np.ndarray, seed: int, n_paths: int) -> ScenarioConfig:
        names = tuple(c.name for c in self.countries)
        exposures = ExposureMatrix(names, np.asarray(self.exposures), tuple(self.rates or ()))
        countries = tuple(c.build() for c in self.countries)
        joint_prior = None
        if self.joint_prior is not None:
            joint_prior = self.joint_prior.build(2 * len(countries), "contagion.joint_prior")
        return ScenarioConfig(horizon, self.maturity, grid, seed, countries, exposures,
                              order=self.order, base_country=self.base_country, n_paths=n_paths,
                              joint_prior=joint_prior)


class RunFile(StrictModel):
    """Top level of a run configuration file"""

    schema_version: Literal[1] = Field(alias="schema")
    name: str = ""
    horizon: float = Field(gt=0)
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    n_paths: int = Field(10_000, ge=1)
    grid: GridConfig = Field(default_factory=GridConfig)
    curve: Optional[CurveConfig] = None
    model: Optional[ModelConfig] = None
    bridge: Optional[List[ComponentConfig]] = None
    joint_prior: Optional[JointPriorConfig] = None
    instruments: List[InstrumentConfig] = Field(default_factory=list)
    assets: List[AssetConfig] = Field(default_factory=list)
    contagion: Optional[ContagionConfig] = None

    @model_validator(mode="after")
    def sections(self) -> "RunFile":
        if self.model is None and self.contagion is None:
            raise ValueError("a run needs a model or a contagion section")
        if self.model is not None and not self.bridge:
            raise ValueError("a model needs its bridge components")
        if self.model is not None and self.model.calibrate and self.curve is None:
            raise ValueError("calibrate: true needs a curve section")
        if self.instruments and self.model is None:
            raise ValueError("instruments need a model")
        if self.assets and self.model is None:
            raise ValueError("assets need a model and its bridge")
        ids = [a.id for a in self.assets]
        if len(set(ids)) != len(ids):
            raise ValueError("asset ids must be unique")
        if self.bridge and self.joint_prior is None:
            missing = [i for i, c in enumerate(self.bridge) if c.prior is None]
            if missing:
                raise ValueError(f"bridge components {missing} need a prior, or give a joint_prior")
        return self


class Tolerances(StrictModel):
    """Thresholds of the verify checks, overridable with --tol NAME=VALUE"""

    mc_sigmas: float = Field(default_factory=lambda: settings.mc_sigmas, gt=0)
    loop_sigmas: float = Field(4.0, gt=0)
    calibration: float = Field(1e-12, gt=0)
    rate_rel: float = Field(1e-6, gt=0)
    quadrature_rel: float = Field(1e-6, gt=0)
    euler_rms: float = Field(0.01, gt=0)


@dataclass(frozen=True, eq=False)
class RunConfig:
    """A validated configuration with every domain object built"""

    source: RunFile
    path: Optional[Path] = None
    curve: Optional[DiscountCurve] = None
    factor: Optional[RationalFactorModel] = None
    bridge: Optional[BridgeSpec] = None
    functions: Optional[Functions] = None
    bond_model: Optional[BondModel] = None
    instruments: tuple = ()
    scenario: Optional[ScenarioConfig] = None
    assets: Dict[str, AssetModel] = field(default_factory=dict)

    @property
    def horizon(self) -> float:
        return self.source.horizon

    @property
    def seed(self) -> Optional[int]:
        return self.source.seed

    @property
    def n_paths(self) -> int:
        return self.source.n_paths

    def asset_maturity(self, asset_id: str) -> float:
        return next(a.maturity for a in self.source.assets if a.id == asset_id)


def _field_path(loc: Sequence) -> str:
    return ".".join(str(part) for part in loc)


def _check_laws(factor: RationalFactorModel, bridge: BridgeSpec, path: str) -> None:
    for c, law in zip(factor.components, factor.laws()):
        if c >= bridge.dimension or bridge.laws[c] != law:
            raise ConfigError(f"component {c} must be driven by a {law.describe()} law", path=path)


def _build_bridge(run: RunFile) -> BridgeSpec:
    components = run.bridge
    laws = tuple(c.build_law() for c in components)
    if run.joint_prior is not None:
        prior = run.joint_prior.build(len(components), "joint_prior")
    else:
        prior = TerminalPrior.product(*[c.prior.build() for c in components])
    return BridgeSpec(run.horizon, laws, prior, tuple(c.sigma for c in components))


def _build(run: RunFile, path: Optional[Path]) -> RunConfig:
    section = "curve"
    try:
        curve = run.curve.build(run.horizon) if run.curve else None
        factor = bridge = functions = bond_model = None
        instruments = ()
        assets = {}
        if run.model is not None:
            section = "model"
            factor = run.model.build_factor(run.horizon)
            section = "bridge"
            bridge = _build_bridge(run)
            _check_laws(factor, bridge, "bridge")
            section = "model.family"
            family = run.model.family.build()
            functions = family
            if run.model.calibrate:
                functions = KernelFunctions(calibrate_f0(curve, family.f1, factor), family.f1)
            bond_model = BondModel.first_order(factor, functions, bridge)
            section = "instruments"
            instruments = tuple(i.build() for i in run.instruments)
            section = "assets"
            for asset in run.assets:
                model = asset.build(run.horizon, family, bridge)
                _check_laws(model.numerator, bridge, "assets")
                _check_laws(model.discount.single_leg.factor, bridge, "assets")
                assets[asset.id] = model
        scenario = None
        if run.contagion is not None:
            section = "contagion"
            if run.seed is None:
                raise ConfigError("a contagion scenario needs a seed", path="seed")
            grid = run.grid.build(run.contagion.maturity)
            scenario = run.contagion.build(run.horizon, grid, run.seed, run.n_paths)
    except ConfigError:
        raise
    except HeatKernelError as e:
        raise ConfigError(str(e), path=section) from e
    return RunConfig(run, path, curve, factor, bridge, functions, bond_model, instruments, scenario, assets)


def parse_config(data: dict, path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Validate a parsed mapping and build its domain objects.

    overrides replace top-level keys (the CLI passes --seed and --paths this way).
    """
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", path=str(path) if path else None)
    data = {**data, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    try:
        run = RunFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = _field_path(first["loc"]) or "<root>"
        extra = f" (+{e.error_count() - 1} more)" if e.error_count() > 1 else ""
        raise ConfigError(f"{first['msg']}{extra}", path=where) from e
    return _build(run, path)


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read, validate and build a YAML run configuration"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found", path=str(path))
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"YAML syntax error at {where}: {e.problem}", path=str(path)) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML error: {e}", path=str(path)) from e
    config = parse_config(data, path, overrides)
    logger.info(f"Loaded config {path.name} (schema {SCHEMA_VERSION})")
    return config


def parse_tolerances(overrides: Sequence[str]) -> Tolerances:
    """Tolerances with NAME=VALUE overrides applied; unknown names are rejected"""
    values = {}
    for item in overrides or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"tolerance override {item!r} is not NAME=VALUE", path="--tol")
        values[name.strip()] = value.strip()
    try:
        return Tolerances.model_validate(values)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], path=f"--tol {_field_path(first['loc'])}") from e

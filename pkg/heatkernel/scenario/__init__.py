"""
Scenario - sovereign debt contagion across exposure-linked countries
"""
from .contagion import (
    CountrySpec,
    ExposureMatrix,
    ScenarioConfig,
    baseline_config,
    combined_debt,
    contagion_bond,
    contagion_factor,
    contagion_model,
    run_scenario,
    spread_frame,
    yield_jump_sign,
)

__all__ = [
    "CountrySpec",
    "ExposureMatrix",
    "ScenarioConfig",
    "baseline_config",
    "combined_debt",
    "contagion_bond",
    "contagion_factor",
    "contagion_model",
    "run_scenario",
    "spread_frame",
    "yield_jump_sign",
]

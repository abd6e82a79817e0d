"""
Shared utilities: error hierarchy and deterministic random streams
"""
from .errors import (
    HeatKernelError,
    InvalidParameterError,
    GridError,
    SupportError,
    SingularStateError,
    ModelViolationError,
    CalibrationError,
    QuadratureError,
    SmoothnessError,
    ConfigError,
    PlotError,
)
from .rng import stream, block_layout, map_blocks, ROLE_TERMINAL, ROLE_COMPONENT

__all__ = [
    "HeatKernelError",
    "InvalidParameterError",
    "GridError",
    "SupportError",
    "SingularStateError",
    "ModelViolationError",
    "CalibrationError",
    "QuadratureError",
    "SmoothnessError",
    "ConfigError",
    "PlotError",
    "stream",
    "block_layout",
    "map_blocks",
    "ROLE_TERMINAL",
    "ROLE_COMPONENT",
]

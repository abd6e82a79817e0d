"""
Error types raised by the pricing engine
"""
from typing import Optional


class HeatKernelError(Exception):
    """Base class for every error raised by heatkernel"""


class InvalidParameterError(HeatKernelError, ValueError):
    """A parameter or type invariant was violated"""


class GridError(InvalidParameterError):
    """Time grid is empty, unordered or reaches the horizon"""


class SupportError(InvalidParameterError):
    """Terminal value lies outside the support of its law"""


class SingularStateError(HeatKernelError):
    """Density ratio denominators vanish for the given state"""


class ModelViolationError(HeatKernelError):
    """A rational price model left its admissible region"""


class CalibrationError(HeatKernelError):
    """Calibrated f0 is negative or increasing somewhere on the grid"""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message)
        self.t = t


class QuadratureError(HeatKernelError):
    """Numerical integration did not reach the requested tolerance"""


class SmoothnessError(HeatKernelError):
    """A derivative was requested that the function does not provide"""


class ConfigError(HeatKernelError):
    """Configuration file could not be parsed or validated"""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class PlotError(HeatKernelError):
    """Chart input does not follow the documented CSV schema"""

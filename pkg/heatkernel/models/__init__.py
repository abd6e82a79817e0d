"""
Kernel models - rational factor models, heat-kernel quadrature and calibration
"""
from .factors import (
    Contagion,
    DebtFactor,
    ExpLinearDiscount,
    ExpLinearTwoFactor,
    ExpQuadratic,
    FactorKind,
    HeatKernelPair,
    HeavyTailNumerator,
    Quadratic,
    RationalFactorModel,
    eval_A,
)
from .families import F0F1Family, KernelFunctions, SmoothFunction
from .kernel import (
    ModelCurve,
    calibrate_f0,
    check_heat_kernel_spec,
    eval_b_P0,
    normaliser,
    pricing_kernel,
)
from .quadrature import HeatKernelSpec, Y_fourier, Y_quadrature, conditional_expectation

__all__ = [
    "Contagion",
    "DebtFactor",
    "ExpLinearDiscount",
    "ExpLinearTwoFactor",
    "ExpQuadratic",
    "F0F1Family",
    "FactorKind",
    "HeatKernelPair",
    "HeatKernelSpec",
    "HeavyTailNumerator",
    "KernelFunctions",
    "ModelCurve",
    "Quadratic",
    "RationalFactorModel",
    "SmoothFunction",
    "Y_fourier",
    "Y_quadrature",
    "calibrate_f0",
    "check_heat_kernel_spec",
    "conditional_expectation",
    "eval_A",
    "eval_b_P0",
    "normaliser",
    "pricing_kernel",
]

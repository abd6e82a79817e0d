"""
Dynamics - SDE coefficients and Euler evolution of rational price processes
"""
from .coefficients import (
    CorrelationSpec,
    SdeCoefficients,
    asset_sde_coeffs,
    bond_sde_coeffs,
    coefficient_frame,
    nu,
    risk_neutral_increments,
    theta,
)
from .euler import asset_euler, bond_euler, euler_evolve

__all__ = [
    "CorrelationSpec",
    "SdeCoefficients",
    "asset_euler",
    "asset_sde_coeffs",
    "bond_euler",
    "bond_sde_coeffs",
    "coefficient_frame",
    "euler_evolve",
    "nu",
    "risk_neutral_increments",
    "theta",
]

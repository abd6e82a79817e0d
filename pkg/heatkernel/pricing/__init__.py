"""
Pricing - bonds, rates, caplets, swaptions, general assets and Monte-Carlo pricing
"""
from .assets import AssetModel, asset_price, breaching_paths, calibrate_g0, limited_liability_breaches
from .bonds import (
    BondModel,
    Leg,
    Term,
    aux_measure,
    bond_bounds,
    bond_price,
    forward_rate,
    price_sensitivity_sign,
    short_rate,
)
from .curve import DiscountCurve
from .monte_carlo import Instrument, InstrumentKind, mc_price, payoff
from .options import (
    caplet_price,
    caplet_price_closed,
    expected_positive_part,
    swaption_price,
    swaption_price_closed,
)

__all__ = [
    "AssetModel",
    "BondModel",
    "DiscountCurve",
    "Instrument",
    "InstrumentKind",
    "Leg",
    "Term",
    "asset_price",
    "aux_measure",
    "breaching_paths",
    "bond_bounds",
    "bond_price",
    "calibrate_g0",
    "caplet_price",
    "caplet_price_closed",
    "expected_positive_part",
    "forward_rate",
    "limited_liability_breaches",
    "mc_price",
    "payoff",
    "price_sensitivity_sign",
    "short_rate",
    "swaption_price",
    "swaption_price_closed",
]

"""Conic (two-price) option pricing and liquidity-free implied volatility."""

from conic_iv.calibrate import (
    CalibrationResult,
    Quote,
    SolverConfig,
    calibrate_liquidity_free,
    implied_vol,
)
from conic_iv.conic import TwoPrice, choquet_two_price, conic_price
from conic_iv.dist_math import norm_cdf, norm_quantile, wang_transform
from conic_iv.errors import (
    ConicIVError,
    DomainError,
    NoExistence,
    PriceOutOfBounds,
    SpreadInfeasible,
)
from conic_iv.pricing import MarketConvention, Model, OptionKind, OptionSpec, model_price

__version__ = "0.1.0"

__all__ = [
    "CalibrationResult",
    "ConicIVError",
    "DomainError",
    "MarketConvention",
    "Model",
    "NoExistence",
    "OptionKind",
    "OptionSpec",
    "PriceOutOfBounds",
    "Quote",
    "SolverConfig",
    "SpreadInfeasible",
    "TwoPrice",
    "calibrate_liquidity_free",
    "choquet_two_price",
    "conic_price",
    "implied_vol",
    "model_price",
    "norm_cdf",
    "norm_quantile",
    "wang_transform",
]

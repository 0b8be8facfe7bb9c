"""Consumer choice on the convex price/reputation frontier."""

from convexprice.distribution import (
    MixtureOfUniforms,
    PiecewiseLinear,
    PreferenceCdf,
    PurchaseRecord,
    Uniform01,
    UniformInterval,
    estimate_mixture,
)
from convexprice.errors import ConvexPriceError, InputError, InvariantViolation
from convexprice.frontier import Frontier, classify, upper_frontier
from convexprice.market_model import MarketSnapshot, NormalizationConfig, NormalizedItem, RawListing, normalize_market
from convexprice.preference import alpha_intervals, market_shares
from convexprice.pricing import PricingProblem, build_problem, optimize_price

__version__ = "0.1.0"

__all__ = [
    "ConvexPriceError",
    "Frontier",
    "InputError",
    "InvariantViolation",
    "MarketSnapshot",
    "MixtureOfUniforms",
    "NormalizationConfig",
    "NormalizedItem",
    "PiecewiseLinear",
    "PreferenceCdf",
    "PricingProblem",
    "PurchaseRecord",
    "RawListing",
    "Uniform01",
    "UniformInterval",
    "alpha_intervals",
    "build_problem",
    "classify",
    "estimate_mixture",
    "market_shares",
    "normalize_market",
    "optimize_price",
    "upper_frontier",
]

"""qvpricer: Fourier-contour pricing of European claims on an asset's
terminal price and its realized quadratic variation under stochastic
volatility, with an independent Monte Carlo oracle.
"""

from .core import (Contour, Garch, Heston, MarketState, ModelSpec, RatesSpec,
                   Strip, ThreeHalves, ValidationResult, ensure_valid_model,
                   intersect_strips, model_strip, validate_model)
from .errors import (ConvergenceError, EmptyStripError, ModelValidationError,
                     ParameterError, QvPricerError, SchemaError,
                     SingularPointError, StripError)
from .models import (BoundaryReport, TransformQuery, classify_boundaries,
                     is_regular, transform, transform_grid)
from .montecarlo import (CfEstimate, McConfig, McEstimate, active_engine,
                         empirical_cf, mc_price, simulate_terminals)
from .payoffs import (ContractSpec, DoubleDigitalCall, TvoCall, TvoPut,
                      VanillaCall, VanillaPut, VolCappedCall, VolStruckCall,
                      evaluate_payoff, payoff_strip, payoff_transform)
from .pricer import (PriceResult, QuadConfig, choose_contour, delta,
                     digital_call_price, gamma, price, variance_sensitivity)

__version__ = "0.1.0"

__all__ = [
    "Contour", "Garch", "Heston", "MarketState", "ModelSpec", "RatesSpec",
    "Strip", "ThreeHalves", "ValidationResult", "ensure_valid_model",
    "intersect_strips", "model_strip", "validate_model",
    "ConvergenceError", "EmptyStripError", "ModelValidationError",
    "ParameterError", "QvPricerError", "SchemaError", "SingularPointError",
    "StripError",
    "BoundaryReport", "TransformQuery", "classify_boundaries", "is_regular",
    "transform", "transform_grid",
    "CfEstimate", "McConfig", "McEstimate", "active_engine", "empirical_cf",
    "mc_price", "simulate_terminals",
    "ContractSpec", "DoubleDigitalCall", "TvoCall", "TvoPut", "VanillaCall",
    "VanillaPut", "VolCappedCall", "VolStruckCall", "evaluate_payoff",
    "payoff_strip", "payoff_transform",
    "PriceResult", "QuadConfig", "choose_contour", "delta",
    "digital_call_price", "gamma", "price", "variance_sensitivity",
    "__version__",
]

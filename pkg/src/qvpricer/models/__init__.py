"""Model-specific joint transforms of (detrended log return, accrued
quadratic variation), regularity probes, and boundary classification.

The transform convention, shared with the Monte Carlo oracle, is

    H(omega, eta, v, tau) = E[ exp(-i omega xi - i eta J) ]

where xi is the log return over the remaining horizon detrended by
(r - d) tau and J the quadratic variation accrued over it; H(i, 0, .) = 1 is
the martingale identity. H solves the Fourier-transformed pricing equation
with unit initial condition, so prices come from contour integrals of
H * payoff transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Garch, Heston, ModelSpec, ThreeHalves
from ..errors import ParameterError
from . import garch as _garch
from . import heston as _heston
from . import three_halves as _three_halves
from .boundaries import BoundaryDisagreement, BoundaryReport, classify_boundaries
from .heston import qcoef

__all__ = [
    "TransformQuery", "transform", "transform_grid", "is_regular",
    "is_regular_grid", "classify_boundaries", "BoundaryReport",
    "BoundaryDisagreement", "qcoef", "spectral_roundoff_floor",
]


@dataclass(frozen=True)
class TransformQuery:
    """Single evaluation point of the joint transform."""

    omega: complex
    eta: complex
    inst_variance: float
    tau: float

    def __post_init__(self):
        if self.inst_variance <= 0:
            raise ParameterError("inst_variance must be positive")
        if self.tau < 0:
            raise ParameterError("tau must be nonnegative")


def _module_for(model: ModelSpec):
    if isinstance(model, Heston):
        return _heston
    if isinstance(model, ThreeHalves):
        return _three_halves
    if isinstance(model, Garch):
        return _garch
    raise ParameterError(f"unknown model type {type(model).__name__}")


def transform_grid(model: ModelSpec, omega, eta, v: float, tau: float,
                   **kw) -> np.ndarray:
    """Vectorized transform over broadcastable omega/eta arrays."""
    return _module_for(model).transform(omega, eta, v, tau, model, **kw)


def transform(model: ModelSpec, query: TransformQuery) -> complex:
    out = transform_grid(model, query.omega, query.eta,
                         query.inst_variance, query.tau)
    return complex(out[()])


def is_regular_grid(model: ModelSpec, omega, eta, tau: float) -> np.ndarray:
    """True where the transform is bounded away from its singular set."""
    return _module_for(model).is_regular(omega, eta, tau, model)


def is_regular(model: ModelSpec, query: TransformQuery) -> bool:
    return bool(is_regular_grid(model, query.omega, query.eta, query.tau)[()])


def spectral_roundoff_floor(model: ModelSpec, tau: float,
                            phi_max: float) -> float:
    """Absolute roundoff floor of the transform evaluation on a contour whose
    Bessel arguments reach angle phi_max; zero for models without a spectral
    integral."""
    if isinstance(model, Garch):
        return _garch.roundoff_floor(model, tau, phi_max)
    return 0.0

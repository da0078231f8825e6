"""Shared domain types: market state, model parameters, analyticity strips.

All types are immutable; every operation here is a pure function, so values
can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import EmptyStripError, ModelValidationError, ParameterError

_INF = math.inf


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class MarketState:
    """Spot state of the three-factor diffusion at valuation time.

    Attributes
    ----------
    spot : float
        Asset price, > 0.
    inst_variance : float
        Instantaneous variance (annualized), > 0.
    accrued_qv : float
        Quadratic variation accumulated so far, >= 0.
    time : float
        Valuation time in years, >= 0. Must precede contract maturity.
    """

    spot: float
    inst_variance: float
    accrued_qv: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        _require(self.spot > 0, f"spot must be positive, got {self.spot}")
        _require(self.inst_variance > 0,
                 f"inst_variance must be positive, got {self.inst_variance}")
        _require(self.accrued_qv >= 0,
                 f"accrued_qv must be nonnegative, got {self.accrued_qv}")
        _require(self.time >= 0, f"time must be nonnegative, got {self.time}")


@dataclass(frozen=True)
class RatesSpec:
    """Continuously compounded risk-free rate and proportional dividend yield."""

    risk_free: float = 0.0
    dividend_yield: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.risk_free), "risk_free must be finite")
        _require(math.isfinite(self.dividend_yield), "dividend_yield must be finite")

    @property
    def carry(self) -> float:
        """Risk-neutral drift of the log-return, r - d."""
        return self.risk_free - self.dividend_yield


@dataclass(frozen=True)
class Heston:
    """Square-root variance: dv = kappa (theta - v) dt + epsilon sqrt(v) dW."""

    kappa: float
    theta: float
    epsilon: float
    rho: float = 0.0

    def __post_init__(self):
        _require(self.kappa > 0, "kappa must be positive")
        _require(self.theta > 0, "theta must be positive")
        _require(self.epsilon > 0, "epsilon must be positive")
        _require(-1.0 <= self.rho <= 1.0, "rho must lie in [-1, 1]")


@dataclass(frozen=True)
class ThreeHalves:
    """3/2 variance: dv = kappa v (theta - v) dt + epsilon v^{3/2} dW."""

    kappa: float
    theta: float
    epsilon: float
    rho: float = 0.0

    def __post_init__(self):
        _require(self.kappa > 0, "kappa must be positive")
        _require(self.theta > 0, "theta must be positive")
        _require(self.epsilon > 0, "epsilon must be positive")
        _require(-1.0 <= self.rho <= 1.0, "rho must lie in [-1, 1]")


@dataclass(frozen=True)
class Garch:
    """Lognormal variance: dv = theta v dt + epsilon v dW, uncorrelated with spot."""

    theta: float
    epsilon: float

    def __post_init__(self):
        _require(math.isfinite(self.theta), "theta must be finite")
        _require(self.epsilon > 0, "epsilon must be positive")

    # Correlation is structurally zero for this variance dynamics.
    rho = 0.0


ModelSpec = Union[Heston, ThreeHalves, Garch]


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def validate_model(model: ModelSpec) -> ValidationResult:
    """Check the boundary non-attainability condition for a parameter set.

    The variance process must reach neither 0 nor +inf on any finite horizon,
    otherwise the pricing problem loses uniqueness. Heston requires
    2 kappa theta >= epsilon^2; the 3/2 dynamics require 2 kappa >= -epsilon^2
    (automatic for kappa > 0); the lognormal dynamics always qualify.

    Total function: returns a ValidationResult, never raises.
    """
    if isinstance(model, Heston):
        lhs, rhs = 2.0 * model.kappa * model.theta, model.epsilon ** 2
        if lhs < rhs:
            return ValidationResult(
                False,
                f"variance can be absorbed at zero: 2*kappa*theta = {lhs:.6g} "
                f"< epsilon^2 = {rhs:.6g}")
        return ValidationResult(True)
    if isinstance(model, ThreeHalves):
        if 2.0 * model.kappa < -model.epsilon ** 2:
            return ValidationResult(
                False,
                f"variance can explode: 2*kappa = {2 * model.kappa:.6g} "
                f"< -epsilon^2 = {-model.epsilon ** 2:.6g}")
        return ValidationResult(True)
    if isinstance(model, Garch):
        return ValidationResult(True)
    return ValidationResult(False, f"unknown model type {type(model).__name__}")


def ensure_valid_model(model: ModelSpec) -> None:
    """Raise ModelValidationError if `validate_model` rejects the parameters."""
    res = validate_model(model)
    if not res:
        raise ModelValidationError(res.reason)


@dataclass(frozen=True)
class Strip:
    """Open axis-aligned region of C^2 where a transform is analytic.

    Bounds constrain the imaginary parts of the two Fourier variables; the
    real parts are always unconstrained. Infinite bounds are allowed.
    """

    im_omega_lo: float = -_INF
    im_omega_hi: float = _INF
    im_eta_lo: float = -_INF
    im_eta_hi: float = _INF

    def __post_init__(self):
        _require(self.im_omega_lo < self.im_omega_hi,
                 f"empty omega interval ({self.im_omega_lo}, {self.im_omega_hi})")
        _require(self.im_eta_lo < self.im_eta_hi,
                 f"empty eta interval ({self.im_eta_lo}, {self.im_eta_hi})")

    def contains(self, k1: float, k2: float) -> bool:
        """True when the shifted integration line (Im w = k1, Im e = k2) fits strictly inside."""
        return (self.im_omega_lo < k1 < self.im_omega_hi
                and self.im_eta_lo < k2 < self.im_eta_hi)

    def describe_violation(self, k1: float, k2: float) -> Optional[str]:
        if not (self.im_omega_lo < k1 < self.im_omega_hi):
            return (f"Im(omega) = {k1} outside "
                    f"({self.im_omega_lo}, {self.im_omega_hi})")
        if not (self.im_eta_lo < k2 < self.im_eta_hi):
            return (f"Im(eta) = {k2} outside "
                    f"({self.im_eta_lo}, {self.im_eta_hi})")
        return None


FULL_PLANE = Strip()


def intersect_strips(a: Strip, b: Strip) -> Optional[Strip]:
    """Componentwise intersection of two strips; None when empty.

    An empty intersection means no joint analyticity region exists and is a
    reportable outcome for the caller, not an exception here.
    """
    olo, ohi = max(a.im_omega_lo, b.im_omega_lo), min(a.im_omega_hi, b.im_omega_hi)
    elo, ehi = max(a.im_eta_lo, b.im_eta_lo), min(a.im_eta_hi, b.im_eta_hi)
    if olo >= ohi or elo >= ehi:
        return None
    return Strip(olo, ohi, elo, ehi)


def model_strip(model: ModelSpec) -> Strip:
    """Analyticity strip of a model's joint transform.

    All three transforms extend to the full two-plane apart from
    lower-dimensional singular sets (see ``models.is_regular``), which a strip
    cannot represent; near-singular points are handled by runtime probes.
    """
    return FULL_PLANE


@dataclass(frozen=True)
class Contour:
    """Imaginary offsets (k1, k2) of the two shifted integration lines."""

    k1: float
    k2: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.k1) and math.isfinite(self.k2),
                 "contour offsets must be finite")

    def validated_against(self, strip: Strip) -> "Contour":
        violation = strip.describe_violation(self.k1, self.k2)
        if violation is not None:
            raise EmptyStripError(f"contour outside admissible strip: {violation}")
        return self

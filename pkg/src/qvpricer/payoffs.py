"""Contract definitions: terminal payoffs and their closed-form Fourier
transforms in (log price, quadratic variation), with analyticity strips.

Transform convention (matching the pricing inversion):

    F_hat(omega, eta) = int_0^inf int_R e^{i omega x + i eta y} F(e^x, y) dx dy

evaluated on the principal branch of every complex root, power and logarithm.
With Im(eta) > 0 the factor (-i eta) stays in the right half plane, so no
branch tracking is required along admissible contours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Strip
from .errors import ParameterError, StripError
from .specfun import gamma


def _require(cond, msg):
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class TvoCall:
    """Pays target_vol * sqrt(T / I_T) * (S_T - strike)^+."""

    target_vol: float
    strike: float
    maturity: float

    def __post_init__(self):
        _require(self.target_vol > 0, "target_vol must be positive")
        _require(self.strike > 0, "strike must be positive")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class TvoPut:
    """Pays target_vol * sqrt(T / I_T) * (strike - S_T)^+."""

    target_vol: float
    strike: float
    maturity: float

    def __post_init__(self):
        _require(self.target_vol > 0, "target_vol must be positive")
        _require(self.strike > 0, "strike must be positive")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class DoubleDigitalCall:
    """Pays 1 when S_T >= asset_strike and I_T / T >= variance_strike."""

    asset_strike: float
    variance_strike: float
    maturity: float

    def __post_init__(self):
        _require(self.asset_strike > 0, "asset_strike must be positive")
        _require(self.variance_strike > 0, "variance_strike must be positive")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class VolCappedCall:
    """Vanilla call payoff gated on realized volatility in [vol_lo, vol_hi]."""

    strike: float
    vol_lo: float
    vol_hi: float
    maturity: float

    def __post_init__(self):
        _require(self.strike > 0, "strike must be positive")
        _require(self.vol_lo >= 0, "vol_lo must be nonnegative")
        _require(self.vol_hi > 0, "vol_hi must be positive")
        _require(self.vol_lo <= self.vol_hi, "vol_lo must not exceed vol_hi")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class VolStruckCall:
    """Pays (S_T - notional * sqrt(I_T / T))^+."""

    notional: float
    maturity: float

    def __post_init__(self):
        _require(self.notional > 0, "notional must be positive")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class VanillaCall:
    strike: float
    maturity: float

    def __post_init__(self):
        _require(self.strike > 0, "strike must be positive")
        _require(self.maturity > 0, "maturity must be positive")


@dataclass(frozen=True)
class VanillaPut:
    strike: float
    maturity: float

    def __post_init__(self):
        _require(self.strike > 0, "strike must be positive")
        _require(self.maturity > 0, "maturity must be positive")


ContractSpec = Union[TvoCall, TvoPut, DoubleDigitalCall, VolCappedCall,
                     VolStruckCall, VanillaCall, VanillaPut]

_QV_REQUIRED = (TvoCall, TvoPut, VolStruckCall)


def is_eta_dependent(contract: ContractSpec) -> bool:
    """False for payoffs that ignore the quadratic variation (vanillas)."""
    return not isinstance(contract, (VanillaCall, VanillaPut))


def evaluate_payoff(contract: ContractSpec, terminal_spot, terminal_qv):
    """Pointwise payoff F(S_T, I_T); accepts scalars or numpy arrays."""
    s = np.asarray(terminal_spot, dtype=float)
    q = np.asarray(terminal_qv, dtype=float)
    if isinstance(contract, _QV_REQUIRED) and np.any(q <= 0):
        raise ParameterError(
            f"{type(contract).__name__} payoff undefined at zero quadratic variation")
    t = contract.maturity
    if isinstance(contract, TvoCall):
        out = contract.target_vol * np.sqrt(t / q) * np.maximum(s - contract.strike, 0.0)
    elif isinstance(contract, TvoPut):
        out = contract.target_vol * np.sqrt(t / q) * np.maximum(contract.strike - s, 0.0)
    elif isinstance(contract, DoubleDigitalCall):
        out = ((s >= contract.asset_strike)
               & (q / t >= contract.variance_strike)).astype(float)
    elif isinstance(contract, VolCappedCall):
        vol = np.sqrt(q / t)
        gate = (vol >= contract.vol_lo) & (vol <= contract.vol_hi)
        out = np.maximum(s - contract.strike, 0.0) * gate
    elif isinstance(contract, VolStruckCall):
        out = np.maximum(s - contract.notional * np.sqrt(q / t), 0.0)
    elif isinstance(contract, VanillaCall):
        out = np.maximum(s - contract.strike, 0.0)
    elif isinstance(contract, VanillaPut):
        out = np.maximum(contract.strike - s, 0.0)
    else:
        raise ParameterError(f"unknown contract type {type(contract).__name__}")
    return out if out.ndim else float(out)


def payoff_strip(contract: ContractSpec) -> Strip:
    """Analyticity strip of the payoff transform."""
    inf = math.inf
    if isinstance(contract, TvoCall):
        return Strip(1.0, inf, 0.0, inf)
    if isinstance(contract, TvoPut):
        return Strip(-inf, 0.0, 0.0, inf)
    if isinstance(contract, DoubleDigitalCall):
        return Strip(0.0, inf, 0.0, inf)
    if isinstance(contract, VolCappedCall):
        return Strip(1.0, inf, 0.0, inf)
    if isinstance(contract, VolStruckCall):
        return Strip(1.0, 3.0, 0.0, inf)
    if isinstance(contract, VanillaCall):
        return Strip(1.0, inf, -inf, inf)
    if isinstance(contract, VanillaPut):
        return Strip(-inf, 0.0, -inf, inf)
    raise ParameterError(f"unknown contract type {type(contract).__name__}")


def _check_in_strip(contract: ContractSpec, omega, eta) -> None:
    strip = payoff_strip(contract)
    io = np.imag(omega)
    ie = np.imag(eta)
    k1 = (float(np.min(io)), float(np.max(io)))
    k2 = (float(np.min(ie)), float(np.max(ie)))
    for k in k1:
        if not (strip.im_omega_lo < k < strip.im_omega_hi):
            raise StripError(
                f"Im(omega) = {k} violates the {type(contract).__name__} strip "
                f"({strip.im_omega_lo}, {strip.im_omega_hi})")
    for k in k2:
        if not (strip.im_eta_lo < k < strip.im_eta_hi):
            raise StripError(
                f"Im(eta) = {k} violates the {type(contract).__name__} strip "
                f"({strip.im_eta_lo}, {strip.im_eta_hi})")


def _call_leg(strike, omega):
    # int e^{i omega x} (e^x - K)^+ dx = K^{1+i omega} / (i omega - omega^2),
    # the same expression prices the put leg on Im(omega) < 0
    iw = 1j * omega
    return np.exp((1.0 + iw) * math.log(strike)) / (iw - omega * omega)


def payoff_transform(contract: ContractSpec, omega, eta):
    """Closed-form transform F_hat(omega, eta); broadcasts over arrays.

    Arguments must lie strictly inside ``payoff_strip(contract)``; violations
    raise StripError naming the offending bound. Vanillas are eta-independent
    and return the one-dimensional call/put transform (the pricer integrates
    them on a single line).
    """
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    _check_in_strip(contract, omega, eta)
    t = contract.maturity
    if isinstance(contract, (TvoCall, TvoPut)):
        # sigma_bar sqrt(pi T) (-i eta)^{-1/2}: principal root, Re(-i eta) > 0
        root = np.exp(-0.5 * np.log(-1j * eta))
        return (contract.target_vol * math.sqrt(math.pi * t) * root
                * _call_leg(contract.strike, omega))
    if isinstance(contract, DoubleDigitalCall):
        phase = np.exp(1j * omega * math.log(contract.asset_strike)
                       + 1j * t * contract.variance_strike * eta)
        return -phase / (omega * eta)
    if isinstance(contract, VolCappedCall):
        gate = (np.exp(1j * eta * contract.vol_lo ** 2 * t)
                - np.exp(1j * eta * contract.vol_hi ** 2 * t))
        return 1j * gate * _call_leg(contract.strike, omega) / eta
    if isinstance(contract, VolStruckCall):
        iw = 1j * omega
        scale = np.exp((1.0 + iw) * math.log(contract.notional / math.sqrt(t)))
        power = np.exp((-1.5 - 0.5 * iw) * np.log(-1j * eta))
        return scale * gamma((3.0 + iw) / 2.0) * power / (iw - omega * omega)
    if isinstance(contract, (VanillaCall, VanillaPut)):
        return _call_leg(contract.strike, omega) * np.ones_like(eta)
    raise ParameterError(f"unknown contract type {type(contract).__name__}")

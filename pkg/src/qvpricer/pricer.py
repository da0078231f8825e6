"""Contour-inversion pricing engine.

Prices are the double contour integral

    V = e^{-r tau} / (4 pi^2) *
        int int  e^{-i omega x} e^{-i eta I} H(omega, eta, v, tau)
        F_hat(omega, eta)  d omega d eta,
    x = ln S + (r - d) tau,   omega = s + i k1,   eta = u + i k2,

evaluated with the Hermitian halving V = P * Re int_{u in R} int_{s >= 0},
P = 2 e^{-r tau} e^{k1 x + k2 I} / (4 pi^2) (the (s, u) -> (-s, -u)
reflection conjugates the integrand, so the Re(omega) >= 0 half-plane
doubled gives the full real integral). The eta axis is the outer adaptive
integral because payoff transforms decay slowest there; vanilla payoffs skip
it entirely through the one-dimensional reduction at eta = 0. Delta and
Gamma reuse the engine with the integrand weights -i omega / S and
(i omega - omega^2) / S^2 from differentiating under the integral sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (Contour, Garch, Heston, MarketState, ModelSpec, RatesSpec,
                   Strip, ThreeHalves, ensure_valid_model, intersect_strips,
                   model_strip)
from .errors import (ConvergenceError, EmptyStripError, ParameterError,
                     StripError)
from .models import is_regular_grid, spectral_roundoff_floor, transform_grid
from .payoffs import (ContractSpec, DoubleDigitalCall, TvoPut, VanillaCall,
                      VanillaPut, VolStruckCall, is_eta_dependent,
                      payoff_strip, payoff_transform)
from .quadrature import integrate_full_line, integrate_half_line


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and panel budget of the adaptive contour quadrature."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_halfwidth: float = 200.0
    initial_panels: int = 64
    max_refinements: int = 12
    initial_span: float = 32.0

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.max_halfwidth,
               self.initial_span) <= 0:
            raise ParameterError("tolerances and spans must be positive")
        if self.initial_panels < 2 or self.max_refinements < 1:
            raise ParameterError("initial_panels >= 2 and max_refinements >= 1")


@dataclass(frozen=True)
class PriceResult:
    value: float
    est_error: float
    nodes_used: int
    truncation_omega: float
    truncation_eta: float
    contour: Contour
    converged: bool


def admissible_strip(contract: ContractSpec, model: ModelSpec) -> Strip:
    strip = intersect_strips(payoff_strip(contract), model_strip(model))
    if strip is None:
        raise EmptyStripError(
            f"no common analyticity strip for {type(contract).__name__} "
            f"under {type(model).__name__}")
    return strip


def _garch_corner_contour(contract: ContractSpec) -> Contour:
    # Hug the strip corner: keeps Re(q) >= -(k1^2 - k1 + 2 k2) close to zero
    # along the whole contour, which the spectral z-integral needs in double
    # precision (see the lognormal transform module).
    strip = payoff_strip(contract)
    if isinstance(contract, DoubleDigitalCall):
        return Contour(0.5, 0.115)
    if strip.im_omega_lo == -math.inf:  # put-like
        return Contour(strip.im_omega_hi - 0.02, 0.005)
    return Contour(strip.im_omega_lo + 0.02, 0.005)


def choose_contour(contract: ContractSpec, model: ModelSpec,
                   tau: float) -> Contour:
    """Default integration offsets inside the admissible strip.

    Bounded omega strips use their midpoint; half-infinite ones sit half a
    unit inside the finite edge; k2 = 0.5 for variance-dependent payoffs.
    Lognormal variance gets corner-hugging offsets instead, and a Heston
    contour is probed for regularity and nudged upward in k2 if needed.
    """
    strip = admissible_strip(contract, model)
    if isinstance(model, Garch):
        contour = _garch_corner_contour(contract)
        if not is_eta_dependent(contract):
            lo = payoff_strip(contract).im_omega_lo
            contour = Contour(lo + 0.02 if lo > -math.inf
                              else payoff_strip(contract).im_omega_hi - 0.02, 0.0)
        return contour.validated_against(strip)
    if isinstance(contract, VolStruckCall):
        k1 = 0.5 * (strip.im_omega_lo + strip.im_omega_hi)
    elif strip.im_omega_lo == -math.inf:
        k1 = strip.im_omega_hi - 0.5          # put-like
    else:
        k1 = strip.im_omega_lo + 0.5          # call-like and digital
    k2 = 0.5 if is_eta_dependent(contract) else 0.0
    contour = Contour(k1, k2)
    if isinstance(model, Heston) and tau > 0:
        s_probe = np.array([0.0, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 200.0])
        u_probe = np.array([-200.0, -30.0, -3.0, -0.3, 0.0, 0.3, 3.0, 30.0, 200.0])
        for bump in (0.0, 0.1, 0.2, 0.3):
            cand = Contour(k1, k2 + bump if is_eta_dependent(contract) else 0.0)
            ok = is_regular_grid(model, s_probe[:, None] + 1j * cand.k1,
                                 u_probe[None, :] + 1j * cand.k2, tau)
            if bool(np.all(ok)):
                return cand.validated_against(strip)
        raise StripError("no regular Heston contour found near the defaults")
    return contour.validated_against(strip)


def _omega_weight(kind: str, spot: float) -> Callable:
    if kind == "price":
        return lambda om: 1.0
    if kind == "delta":
        return lambda om: -1j * om / spot
    if kind == "gamma":
        return lambda om: (1j * om - om * om) / spot ** 2
    raise ParameterError(f"unknown integrand weight {kind!r}")


def _regularized_transform(model, omega, eta, v, tau, spacing):
    """Transform values with singular nodes replaced by half-step shifts."""
    vals = transform_grid(model, omega, eta, v, tau)
    ok = is_regular_grid(model, omega, eta, tau)
    if bool(np.all(ok)):
        return vals
    bad = np.nonzero(~ok)
    for idx in zip(*bad):
        om = omega[idx[0], 0] if omega.ndim == 2 else omega[idx]
        et = eta[0, idx[1]] if eta.ndim == 2 else eta[idx]
        shifted = transform_grid(
            model, np.array([om - spacing / 2, om + spacing / 2]),
            np.array([et, et]), v, tau)
        vals[idx] = 0.5 * (shifted[0] + shifted[1])
    return vals


def _guard_spectral_noise(model, contract, contour, tau, rel_tol):
    if not isinstance(model, Garch) or not is_eta_dependent(contract):
        return
    a = contour.k1 ** 2 - contour.k1 + 2.0 * contour.k2
    phi_max = 0.5 * math.pi if a > 0 else 0.25 * math.pi + 0.15
    floor = spectral_roundoff_floor(model, tau, phi_max)
    if floor > max(0.02, rel_tol):
        raise ConvergenceError(
            "lognormal-variance pricing: spectral cancellation exceeds double "
            f"precision at this horizon (noise floor {floor:.2g}); increase "
            "tau or epsilon^2 * tau")


def _price_2d(model, contract, state, rates, contour, config, kind):
    tau = contract.maturity - state.time
    x = math.log(state.spot) + rates.carry * tau
    acc = state.accrued_qv
    v = state.inst_variance
    k1, k2 = contour.k1, contour.k2
    weight = _omega_weight(kind, state.spot)
    prefactor = (2.0 * math.exp(-rates.risk_free * tau)
                 * math.exp(k1 * x + k2 * acc) / (4.0 * math.pi ** 2))

    inner_errs = []
    inner_fail = 0
    nodes = 0
    trunc_omega = 0.0

    def outer_integrand(u_pts):
        nonlocal inner_fail, nodes, trunc_omega
        eta = u_pts[None, :] + 1j * k2
        eta_phase = np.exp(-1j * u_pts * acc)

        def inner_integrand(s_pts):
            omega = s_pts[:, None] + 1j * k1
            spacing = float(s_pts[1] - s_pts[0]) if len(s_pts) > 1 else 1e-4
            h = _regularized_transform(model, omega, eta, v, tau, spacing)
            fhat = payoff_transform(contract, omega, eta)
            return (np.exp(-1j * s_pts * x)[:, None] * eta_phase[None, :]
                    * weight(omega) * h * fhat)

        res = integrate_half_line(
            inner_integrand,
            initial_span=config.initial_span,
            initial_panels=config.initial_panels,
            rel_tol=0.3 * config.rel_tol,
            abs_tol=config.abs_tol / (8.0 * config.max_halfwidth),
            max_halfwidth=config.max_halfwidth,
            max_depth=config.max_refinements,
            max_panel_evals=1500)
        inner_errs.append(res.err)
        inner_fail += 0 if res.converged else 1
        nodes += res.nodes
        trunc_omega = max(trunc_omega, res.truncation_hi)
        return res.value

    outer = integrate_full_line(
        outer_integrand,
        initial_span=config.initial_span,
        initial_panels=max(2, config.initial_panels // 2),
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol / max(prefactor, 1e-300),
        max_halfwidth=config.max_halfwidth,
        max_depth=config.max_refinements,
        max_panel_evals=900)

    raw = complex(outer.value[0])
    # inner errors enter the outer integral with the measure of the eta line
    err = prefactor * (outer.err
                       + float(np.mean(inner_errs)) * 2.0 * outer.truncation_hi)
    value = prefactor * raw.real
    return PriceResult(value, err, nodes + outer.nodes, trunc_omega,
                       outer.truncation_hi, contour,
                       outer.converged and inner_fail == 0)


def _price_1d(model, contract_or_fhat, state, rates, contour, config, kind,
              maturity):
    tau = maturity - state.time
    x = math.log(state.spot) + rates.carry * tau
    v = state.inst_variance
    k1 = contour.k1
    weight = _omega_weight(kind, state.spot)
    prefactor = math.exp(-rates.risk_free * tau) * math.exp(k1 * x) / math.pi

    if callable(contract_or_fhat):
        fhat = contract_or_fhat
    else:
        fhat = lambda om: payoff_transform(contract_or_fhat, om, np.zeros_like(om))

    def integrand(s_pts):
        omega = s_pts + 1j * k1
        spacing = float(s_pts[1] - s_pts[0]) if len(s_pts) > 1 else 1e-4
        h = _regularized_transform(model, omega, np.zeros_like(omega), v, tau,
                                   spacing)
        return np.exp(-1j * s_pts * x) * weight(omega) * h * fhat(omega)

    res = integrate_half_line(
        integrand,
        initial_span=config.initial_span,
        initial_panels=config.initial_panels,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol / max(prefactor, 1e-300),
        max_halfwidth=config.max_halfwidth,
        max_depth=config.max_refinements,
        max_panel_evals=3000)
    raw = complex(res.value[0])
    return PriceResult(prefactor * raw.real, prefactor * res.err, res.nodes,
                       res.truncation_hi, 0.0, contour, res.converged)


def _run(model, rates, contract, state, contour, config, kind):
    ensure_valid_model(model)
    if state.time >= contract.maturity:
        raise ParameterError("contract already expired at the valuation time")
    config = config or QuadConfig()
    tau = contract.maturity - state.time
    if contour is None:
        contour = choose_contour(contract, model, tau)
    else:
        contour.validated_against(admissible_strip(contract, model))
    if is_eta_dependent(contract):
        _guard_spectral_noise(model, contract, contour, tau, config.rel_tol)
        return _price_2d(model, contract, state, rates, contour, config, kind)
    return _price_1d(model, contract, state, rates, contour, config, kind,
                     contract.maturity)


def price(model: ModelSpec, rates: RatesSpec, contract: ContractSpec,
          state: MarketState, contour: Optional[Contour] = None,
          config: Optional[QuadConfig] = None) -> PriceResult:
    """Present value of the contract by contour inversion."""
    return _run(model, rates, contract, state, contour, config, "price")


def delta(model: ModelSpec, rates: RatesSpec, contract: ContractSpec,
          state: MarketState, contour: Optional[Contour] = None,
          config: Optional[QuadConfig] = None) -> PriceResult:
    """dV/dS via the -i omega / S integrand weight."""
    return _run(model, rates, contract, state, contour, config, "delta")


def gamma(model: ModelSpec, rates: RatesSpec, contract: ContractSpec,
          state: MarketState, contour: Optional[Contour] = None,
          config: Optional[QuadConfig] = None) -> PriceResult:
    """d2V/dS2 via the (i omega - omega^2) / S^2 integrand weight."""
    return _run(model, rates, contract, state, contour, config, "gamma")


def digital_call_price(model: ModelSpec, rates: RatesSpec, asset_strike: float,
                       maturity: float, state: MarketState,
                       config: Optional[QuadConfig] = None) -> PriceResult:
    """e^{-r tau} P(S_T >= K) through the one-dimensional digital transform
    -K^{i omega} / (i omega) on Im(omega) > 0. Used for dominance checks."""
    ensure_valid_model(model)
    if state.time >= maturity:
        raise ParameterError("digital already expired at the valuation time")
    config = config or QuadConfig()
    contour = Contour(0.5, 0.0)
    log_k = math.log(asset_strike)

    def fhat(om):
        return -np.exp(1j * om * log_k) / (1j * om)

    return _price_1d(model, fhat, state, RatesSpec(rates.risk_free,
                                                   rates.dividend_yield),
                     contour, config, "price", maturity)


def variance_sensitivity(model: ModelSpec, rates: RatesSpec,
                         contract: ContractSpec, state: MarketState,
                         contour: Optional[Contour] = None,
                         config: Optional[QuadConfig] = None,
                         rel_step: float = 1e-3) -> float:
    """dV/dv by central finite differences (no contour formula is exposed)."""
    h = rel_step * state.inst_variance
    up = MarketState(state.spot, state.inst_variance + h, state.accrued_qv,
                     state.time)
    dn = MarketState(state.spot, state.inst_variance - h, state.accrued_qv,
                     state.time)
    vu = price(model, rates, contract, up, contour, config).value
    vd = price(model, rates, contract, dn, contour, config).value
    return (vu - vd) / (2.0 * h)

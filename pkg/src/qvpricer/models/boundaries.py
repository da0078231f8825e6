"""Attainability of the variance boundaries 0 and +inf.

Two independent routes that must agree: the closed-form criteria, and a
numeric test integrating the scale-function double integral

    p(x) = int_1^x s(u) ( int_1^u m(z) dz ) du,
    s(u) = exp( -int_1^u 2 a(z) / b^2(z) dz ),   m(z) = 2 / (b^2(z) s(z)),

where a, b are the variance drift and diffusion. A boundary is attainable
exactly when p stays finite approaching it; divergence is detected from the
growth of p along a ladder of endpoints. Works on raw parameter sets,
including ones the no-touch validator rejects - that is its purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..core import Garch, Heston, ModelSpec, ThreeHalves
from ..errors import QvPricerError


@dataclass(frozen=True)
class BoundaryReport:
    zero_attainable: bool
    infinity_attainable: bool
    method: str            # "closed-form+numeric" after agreement
    detail: str


class BoundaryDisagreement(QvPricerError, ArithmeticError):
    """Closed-form and numeric scale-function classifications disagree."""


def _coefficients(model: ModelSpec):
    if isinstance(model, Heston):
        return (lambda v: model.kappa * (model.theta - v),
                lambda v: model.epsilon ** 2 * v)
    if isinstance(model, ThreeHalves):
        return (lambda v: model.kappa * v * (model.theta - v),
                lambda v: model.epsilon ** 2 * v ** 3)
    if isinstance(model, Garch):
        return (lambda v: model.theta * v,
                lambda v: model.epsilon ** 2 * v ** 2)
    raise QvPricerError(f"unknown model type {type(model).__name__}")


def _closed_form(model: ModelSpec):
    if isinstance(model, Heston):
        return (2.0 * model.kappa * model.theta < model.epsilon ** 2, False)
    if isinstance(model, ThreeHalves):
        return (False, 2.0 * model.kappa < -model.epsilon ** 2)
    if isinstance(model, Garch):
        return (False, False)
    raise QvPricerError(f"unknown model type {type(model).__name__}")


_EXP_CLIP = 600.0  # exponent at which the integrand is declared divergent


def _log_s(drift, diff2, u):
    """log of the scale density s(u) = exp(-int_1^u 2 a / b^2)."""
    val, _ = integrate.quad(lambda z: 2.0 * drift(z) / diff2(z), 1.0, u,
                            limit=200)
    return -val


def _p_value(model: ModelSpec, x: float) -> float:
    """Scale double integral p(x) >= 0 between 1 and x; inf when it overflows."""
    drift, diff2 = _coefficients(model)

    def inner(u):
        lo, hi = (u, 1.0) if u < 1.0 else (1.0, u)
        val, _ = integrate.quad(
            lambda z: 2.0 / diff2(z) * math.exp(
                min(_EXP_CLIP, -_log_s(drift, diff2, z))), lo, hi, limit=200)
        return val

    def outer(u):
        ls = _log_s(drift, diff2, u)
        if ls > _EXP_CLIP:
            return math.inf
        return math.exp(ls) * inner(u)

    lo, hi = (x, 1.0) if x < 1.0 else (1.0, x)
    # log-spaced panels keep quad honest over many decades
    edges = np.geomspace(lo, hi, 24)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        probe = outer(0.5 * (a + b))
        if not math.isfinite(probe):
            return math.inf
        val, _ = integrate.quad(outer, a, b, limit=100)
        total += val
        if total > 1e290:
            return math.inf
    return total


def _diverges(values) -> bool:
    """True when successive p-values keep growing (no finite limit)."""
    if any(not math.isfinite(v) for v in values):
        return True
    increments = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    # finite limit <=> increments shrink geometrically toward 0
    return not (increments[-1] < 0.25 * increments[0] + 1e-12
                and increments[-1] < 1e-3 * max(values[-1], 1.0) + 1e-12)


def classify_boundaries(model: ModelSpec) -> BoundaryReport:
    """Closed-form classification cross-checked by the numeric scale test."""
    zero_cf, inf_cf = _closed_form(model)
    ladder0 = [1e-2, 1e-3, 1e-4, 1e-5]
    ladder_inf = [1e1, 1e2, 1e3, 1e4]
    p0 = [_p_value(model, x) for x in ladder0]
    pinf = [_p_value(model, x) for x in ladder_inf]
    zero_num = not _diverges(p0)
    inf_num = not _diverges(pinf)
    if (zero_cf, inf_cf) != (zero_num, inf_num):
        raise BoundaryDisagreement(
            f"closed-form says (zero={zero_cf}, inf={inf_cf}) but the scale "
            f"integrals say (zero={zero_num}, inf={inf_num}) for {model}; "
            f"p(0-ladder)={p0}, p(inf-ladder)={pinf}")
    detail = (f"p at {ladder0[-1]:g}: {p0[-1]:.4g}; "
              f"p at {ladder_inf[-1]:g}: {pinf[-1]:.4g}")
    return BoundaryReport(zero_cf, inf_cf, "closed-form+numeric", detail)

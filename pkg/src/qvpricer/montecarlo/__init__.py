"""Simulation oracle: Euler terminal sampling, payoff averaging, empirical
characteristic functions.

The path kernel is the compiled extension when available, otherwise the
numpy engine; both follow the same Philox block-stream contract and produce
bit-identical samples for a given (seed, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core import (Garch, Heston, MarketState, ModelSpec, RatesSpec,
                    ThreeHalves, ensure_valid_model)
from ..errors import ParameterError
from ..payoffs import ContractSpec, evaluate_payoff
from . import _blocks
from ._blocks import (BLOCK, FLOOR_FULL_TRUNCATION, FLOOR_REFLECTION,
                      simulate_block_numpy)

try:  # compiled kernel, optional
    from ._speedup import simulate_block as _compiled_block
except ImportError:  # pragma: no cover - build dependent
    _compiled_block = None

HAVE_COMPILED_KERNEL = _compiled_block is not None


def active_engine() -> str:
    return "compiled" if HAVE_COMPILED_KERNEL else "numpy"


@dataclass(frozen=True)
class McConfig:
    """Simulation size, seed, and variance floor policy.

    n_steps is the total number of Euler substeps over the horizon; the CLI
    derives it from a steps-per-year setting (default 250/year).
    """

    n_paths: int = 200_000
    n_steps: int = 250
    seed: int = 0
    variance_floor_policy: str = "full-truncation"

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ParameterError("n_paths and n_steps must be >= 1")
        if self.variance_floor_policy not in ("full-truncation", "reflection"):
            raise ParameterError(
                f"unknown variance floor policy {self.variance_floor_policy!r}")

    @property
    def floor_id(self) -> int:
        return (FLOOR_REFLECTION if self.variance_floor_policy == "reflection"
                else FLOOR_FULL_TRUNCATION)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int


@dataclass(frozen=True)
class CfEstimate:
    """Empirical transform value with componentwise standard errors."""

    mean: complex
    std_error_re: float
    std_error_im: float
    n_paths: int
    heavy_tailed: bool  # top 1% of weights carry more than half the total mass


def _model_fields(model: ModelSpec):
    if isinstance(model, Heston):
        return _blocks.MODEL_HESTON, model.kappa, model.theta, model.epsilon, model.rho
    if isinstance(model, ThreeHalves):
        return _blocks.MODEL_THREE_HALVES, model.kappa, model.theta, model.epsilon, model.rho
    if isinstance(model, Garch):
        return _blocks.MODEL_GARCH, 0.0, model.theta, model.epsilon, 0.0
    raise ParameterError(f"unknown model type {type(model).__name__}")


def simulate_terminals(model: ModelSpec, rates: RatesSpec, state: MarketState,
                       horizon: float, config: McConfig,
                       engine: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Sample (S_T, I_T) pairs at the horizon.

    Log-Euler for the spot (exact lognormal substep at frozen variance),
    Euler with the configured floor policy for the variance, trapezoid
    accumulation of the quadratic variation. Deterministic given the seed.
    """
    ensure_valid_model(model)
    if horizon <= state.time:
        raise ParameterError("horizon must exceed the valuation time")
    tau = horizon - state.time
    model_id, kappa, theta, eps, rho = _model_fields(model)
    if engine is None:
        block = _compiled_block if HAVE_COMPILED_KERNEL else simulate_block_numpy
    elif engine == "compiled":
        if not HAVE_COMPILED_KERNEL:
            raise ParameterError("compiled kernel is not available")
        block = _compiled_block
    elif engine == "numpy":
        block = simulate_block_numpy
    else:
        raise ParameterError(f"unknown engine {engine!r}")
    return _blocks.simulate_terminal_arrays(
        block, config.seed, config.n_paths, config.n_steps, model_id,
        kappa, theta, eps, rho, rates.carry, tau, state.spot,
        state.inst_variance, state.accrued_qv, config.floor_id)


def mc_price(contract: ContractSpec, spots: np.ndarray, accrued: np.ndarray,
             rates: RatesSpec, tau: float) -> McEstimate:
    """Discounted sample mean of the payoff over simulated terminals."""
    if len(spots) == 0:
        raise ParameterError("empty sample set")
    payoffs = evaluate_payoff(contract, spots, accrued)
    disc = math.exp(-rates.risk_free * tau)
    mean = disc * float(np.mean(payoffs))
    n = len(payoffs)
    std = float(np.std(payoffs, ddof=1)) if n > 1 else 0.0
    return McEstimate(mean, disc * std / math.sqrt(n), n)


def empirical_cf(spots: np.ndarray, accrued: np.ndarray, state: MarketState,
                 rates: RatesSpec, horizon: float, omega: complex,
                 eta: complex) -> CfEstimate:
    """Empirical counterpart of the joint transform at (omega, eta).

    Averages exp(-i omega xi - i eta J) over the detrended log-return
    xi = log(S_T/S_t) - (r-d) tau and the accrued quadratic variation
    J = I_T - I_t, which is the convention the analytic transforms satisfy
    (at omega = i, eta = 0 the mean is exactly the martingale identity 1).
    Flags heavy-tailed weight concentration instead of failing.
    """
    tau = horizon - state.time
    xi = np.log(spots / state.spot) - rates.carry * tau
    j = accrued - state.accrued_qv
    w = np.exp(-1j * omega * xi - 1j * eta * j)
    n = len(w)
    mean = complex(np.mean(w))
    se_re = float(np.std(w.real, ddof=1)) / math.sqrt(n)
    se_im = float(np.std(w.imag, ddof=1)) / math.sqrt(n)
    mags = np.abs(w)
    top = max(1, n // 100)
    heavy = float(np.sum(np.partition(mags, n - top)[n - top:])) > 0.5 * float(np.sum(mags))
    return CfEstimate(mean, se_re, se_im, n, heavy)


def dump_samples(path, spots: np.ndarray, accrued: np.ndarray,
                 model: ModelSpec, config: McConfig) -> None:
    """Write terminal samples as delimited text with a metadata header."""
    header = (f"model={type(model).__name__} params={model} "
              f"n_paths={config.n_paths} n_steps={config.n_steps} "
              f"seed={config.seed} floor={config.variance_floor_policy}\n"
              "terminal_spot,terminal_qv")
    np.savetxt(path, np.column_stack([spots, accrued]), delimiter=",",
               header=header, fmt="%.17g")


def load_samples(path) -> Tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",")
    return data[:, 0], data[:, 1]

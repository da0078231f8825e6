"""Joint transform under lognormal variance dynamics (zero correlation).

Spectral form over the imaginary-order Bessel continuum plus a finite sum of
bound states when beta = 2 theta / epsilon^2 - 1 < 0:

    H = (2^{beta+1} / d^beta) [ 1_{beta<0} sum_{j=0}^{floor(-beta/2)}
          (-beta-2j) / (j! Gamma(1-beta-j)) K_{-beta-2j}(d) e^{(beta j + j^2) eps^2 tau / 2}
        + (1/4 pi^2) int_0^inf |Gamma((beta+iz)/2)|^2 z sinh(pi z)
          K_{iz}(d) e^{-(beta^2+z^2) eps^2 tau / 8} dz ]

with d = 2 sqrt(q v) / epsilon, q = omega^2 - i omega + 2 i eta. (The
spectral reduction of the transformed PDE fixes this d; the Monte Carlo
oracle confirms it, see tests.)

Numerics: the z integrand see-saws between e^{+pi z/2} factors, so the
weight carries an explicit e^{-pi z/2} and the Bessel kernel is evaluated
scaled, K~ = e^{+pi z/2} K_{iz}(d), through the ascending-series pair of
I_{+-iz} with all exponents combined in log space. The series pair is well
conditioned whenever |d| - Re d is moderate, which holds for every live
contour node (dead nodes with Re d > 45 are returned as 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..core import Garch
from ..errors import ConvergenceError, SingularPointError
from ..specfun import loggamma
from .heston import qcoef

_LOG_4PI2 = math.log(4.0 * math.pi ** 2)
_Z_CAP = 460.0
_DEAD_RE_D = 45.0
_GL20 = np.polynomial.legendre.leggauss(20)


def _log_sinh(x):
    # ln(sinh x) for x > 0 without overflow
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


@dataclass(frozen=True)
class SpectralGrid:
    """Precomputed z-grid pieces; reusable across (omega, eta) nodes.

    ``log_weight`` already contains the Gauss-Legendre weight, the spectral
    weight scaled by e^{-pi z/2}, and the temporal Gaussian for this tau.
    """

    beta: float
    epsilon: float
    tau: float
    z: np.ndarray
    log_weight: np.ndarray
    lg_plus: np.ndarray        # loggamma(1 + i z)
    lg_minus: np.ndarray       # loggamma(1 - i z)
    log_sin: np.ndarray        # log(sin(pi i z)), stable form
    z_max: float

    def with_tau(self, tau: float) -> "SpectralGrid":
        """Same nodes, temporal weights rebuilt for another tau (used by the
        PDE-residual checks, which need a tau-independent grid)."""
        base = self.log_weight + (self.beta ** 2 + self.z ** 2) \
            * self.epsilon ** 2 * self.tau / 8.0
        lw = base - (self.beta ** 2 + self.z ** 2) * self.epsilon ** 2 * tau / 8.0
        return SpectralGrid(self.beta, self.epsilon, tau, self.z, lw,
                            self.lg_plus, self.lg_minus, self.log_sin,
                            self.z_max)


def _base_log_density(beta, z):
    # 2 ln|Gamma((beta+iz)/2)| + ln z + ln sinh(pi z) - pi z / 2
    lg = loggamma((beta + 1j * z) / 2.0)
    return (2.0 * lg.real + np.log(z) + _log_sinh(np.pi * z)
            - 0.5 * np.pi * z)


@lru_cache(maxsize=64)
def spectral_grid(theta: float, epsilon: float, tau: float) -> SpectralGrid:
    beta = 2.0 * theta / epsilon ** 2 - 1.0
    gamma_t = epsilon ** 2 * tau / 8.0
    probe = np.arange(0.25, _Z_CAP, 0.25)
    env = _base_log_density(beta, probe) + 0.5 * np.pi * probe \
        - (beta ** 2 + probe ** 2) * gamma_t
    peak = float(np.max(env))
    beyond = np.nonzero((probe > probe[np.argmax(env)]) & (env < peak - 40.0))[0]
    if len(beyond) == 0:
        raise ConvergenceError(
            "lognormal-variance transform: tau too small for double precision "
            f"(spectral truncation exceeds z = {_Z_CAP:.0f}; "
            f"epsilon^2 * tau = {epsilon ** 2 * tau:.4g})")
    z_max = float(probe[beyond[0]])
    width = min(1.2, max(z_max / 24.0, 0.3))
    n_panels = int(math.ceil(z_max / width))
    xg, wg = _GL20
    edges = np.linspace(0.0, z_max, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1] - edges[0])
    z = (mid + half * xg[None, :]).ravel()
    glw = np.tile(half * wg, n_panels)
    log_w = np.log(glw) + _base_log_density(beta, z) \
        - (beta ** 2 + z ** 2) * gamma_t - _LOG_4PI2
    return SpectralGrid(beta, epsilon, tau, z,
                        log_w,
                        loggamma(1.0 + 1j * z),
                        loggamma(1.0 - 1j * z),
                        _log_sinh(np.pi * z) + 0.5j * np.pi,
                        z_max)


def _series_pair(order_plus, order_minus, quarter_d2, max_terms=400):
    """sum_k (d^2/4)^k / (k! (nu+1)_k) for nu = order_plus and order_minus.

    Shapes broadcast; the two sums share the loop so convergence is tested
    once on the worst entry.
    """
    tp = np.ones_like(quarter_d2 + order_plus)
    tm = np.ones_like(tp)
    sp = np.ones_like(tp)
    sm = np.ones_like(tp)
    for k in range(1, max_terms):
        tp = tp * quarter_d2 / (k * (order_plus + k))
        tm = tm * quarter_d2 / (k * (order_minus + k))
        sp += tp
        sm += tm
        worst = max(float(np.max(np.abs(tp))), float(np.max(np.abs(tm))))
        if worst <= 1e-17 * max(float(np.max(np.abs(sp))), 1e-300):
            break
    else:
        raise ConvergenceError("Bessel series for the spectral kernel did not "
                               f"converge in {max_terms} terms")
    return sp, sm


def _scaled_kernel_sum(d, grid: SpectralGrid):
    """sum over the z-grid of weight(z) * K_{iz}(d), for a batch of d values.

    Evaluates e^{pi z/2} K_{iz}(d) = (pi/2) [e^{A-} S- - e^{A+} S+] with
    A+- = (+-iz) Log(d/2) - loggamma(1 +- iz) - Log(sin(pi i z)) + pi z/2,
    and contracts against the e^{-pi z/2}-scaled weights.
    """
    d = d[:, None]
    z = grid.z[None, :]
    log_half_d = np.log(0.5 * d)
    a_plus = 1j * z * log_half_d - grid.lg_plus[None, :] \
        - grid.log_sin[None, :] + 0.5 * np.pi * z
    a_minus = -1j * z * log_half_d - grid.lg_minus[None, :] \
        - grid.log_sin[None, :] + 0.5 * np.pi * z
    s_plus, s_minus = _series_pair(1j * z, -1j * z, 0.25 * d * d)
    kernel = 0.5 * np.pi * (np.exp(a_minus) * s_minus - np.exp(a_plus) * s_plus)
    return kernel @ np.exp(grid.log_weight).astype(complex)


def _bound_state_sum(d, beta, epsilon, tau):
    """Finite sum over real Bessel orders -beta-2j, present when beta < 0."""
    total = np.zeros_like(d)
    quarter_d2 = 0.25 * d * d
    log_half_d = np.log(0.5 * d)
    for j in range(int(math.floor(-beta / 2.0)) + 1):
        p = -beta - 2.0 * j
        if p == 0.0:
            continue  # the order-zero term carries coefficient -beta-2j = 0
        coef = p / (math.factorial(j) * float(np.exp(loggamma(1.0 - beta - j)).real))
        tfac = math.exp((beta * j + j * j) * epsilon ** 2 * tau / 2.0)
        orders = [p]
        if abs(p - round(p)) < 1e-6:
            orders = [p + 1e-5, p - 1e-5]  # K is analytic in the order
        kval = np.zeros_like(d)
        for pp in orders:
            ls = complex(np.log(np.sin(np.pi * pp) + 0j))
            a_plus = pp * log_half_d - loggamma(1.0 + pp) - ls
            a_minus = -pp * log_half_d - loggamma(1.0 - pp) - ls
            s_plus, s_minus = _series_pair(
                np.full_like(d, pp), np.full_like(d, -pp), quarter_d2)
            kval = kval + 0.5 * np.pi * (np.exp(a_minus) * s_minus
                                         - np.exp(a_plus) * s_plus)
        total = total + (coef * tfac / len(orders)) * kval
    return total


def transform(omega, eta, v, tau, model: Garch, grid: SpectralGrid = None):
    """H(omega, eta, v, tau) for lognormal variance; broadcasts over omega/eta.

    Exact special cases: tau = 0 returns 1; q = 0 returns 1 when beta < 0
    (removable) and raises SingularPointError when beta >= 0 (genuine
    singularity, H ~ d^{-beta}).
    """
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    shape = np.broadcast(omega, eta).shape
    if tau == 0.0:
        return np.ones(shape, dtype=complex)
    beta = 2.0 * model.theta / model.epsilon ** 2 - 1.0
    q = np.broadcast_to(qcoef(omega, eta), shape).ravel()
    out = np.empty(q.shape, dtype=complex)
    at_origin = q == 0.0
    if np.any(at_origin):
        if beta >= 0.0:
            raise SingularPointError(
                "lognormal-variance transform singular at omega^2 - i omega "
                "+ 2 i eta = 0 (2 theta >= epsilon^2)")
        out[at_origin] = 1.0
    live = ~at_origin
    if np.any(live):
        if grid is None:
            grid = spectral_grid(model.theta, model.epsilon, tau)
        d = 2.0 * np.sqrt(q[live] * v) / model.epsilon
        vals = np.zeros_like(d)
        alive = d.real <= _DEAD_RE_D
        if np.any(alive):
            da = d[alive]
            bracket = _scaled_kernel_sum(da, grid)
            if beta < 0.0:
                bracket = bracket + _bound_state_sum(da, beta, model.epsilon, tau)
            pref = np.exp((beta + 1.0) * math.log(2.0) - beta * np.log(da))
            vals[alive] = pref * bracket
        out[live] = vals
    return out.reshape(shape)


def is_regular(omega, eta, tau, model: Garch):
    """False only at the q = 0 singular set when 2 theta >= epsilon^2."""
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    shape = np.broadcast(omega, eta).shape
    if 2.0 * model.theta < model.epsilon ** 2:
        return np.ones(shape, dtype=bool)
    return np.abs(np.broadcast_to(qcoef(omega, eta), shape)) >= 1e-12


def roundoff_floor(model: Garch, tau: float, phi_max: float) -> float:
    """Estimated absolute roundoff of the z-integral at contour angle phi_max.

    The integrand magnitude reaches max_z weight(z) e^{z phi}; double
    precision contributes ~eps_mach of that. Used by the pricer to refuse
    configurations whose spectral cancellation exceeds the tolerance budget.
    """
    grid = spectral_grid(model.theta, model.epsilon, tau)
    return 4e-16 * float(np.max(np.exp(grid.log_weight + grid.z * phi_max))) \
        * len(grid.z) ** 0.5

"""Complex special functions backing the 3/2 and lognormal-variance transforms.

Everything here is pure and accepts numpy broadcasting where it matters.
Branch cuts follow the principal determination throughout (square roots,
logarithms, complex powers), matching the convention used by the transform
formulas.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, ParameterError

_LOG2PI_HALF = 0.9189385332046727  # log(2*pi)/2

# Lanczos approximation, g = 7, 9 coefficients (Godfrey's set). Relative
# accuracy ~1e-13 for moderate |z|; adequate for the 1e-12 contract with the
# reflection formula handling Re(z) < 0.5.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])


def _lanczos_series(z):
    s = np.full_like(z, _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        s = s + _LANCZOS_C[i] / (z + (i - 1.0))
    return s


def _loggamma_right(z):
    # valid for Re(z) >= 0.5; log-form avoids overflow of the power factor
    t = z + (_LANCZOS_G - 0.5)
    return (z - 0.5) * np.log(t) - t + _LOG2PI_HALF + np.log(_lanczos_series(z))


def _log_sin_pi(z):
    """log(sin(pi z)), stable for large |Im z|.

    The imaginary part is only defined modulo 2*pi*i; callers exponentiate
    differences, which removes the ambiguity.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    upper = z.imag >= 0
    for mask, sign in ((upper, 1.0), (~upper, -1.0)):
        if not np.any(mask):
            continue
        w = z[mask]
        # sin(pi w) = -exp(-i pi w) (1 - exp(2 i pi w)) / (2i), decaying factor
        # exp(2 i pi w) has modulus <= 1 when Im w >= 0
        ew = np.exp(sign * 2j * np.pi * w)
        out[mask] = (sign * (-1j) * np.pi * w + np.log1p(-ew)
                     - np.log(sign * 2j))
    return out


def loggamma(z):
    """Logarithm of the Gamma function for complex argument.

    The real part equals log|Gamma(z)| exactly; the imaginary part may differ
    from the analytically continued log-Gamma by a multiple of 2*pi. Use it
    for ratios and moduli, where exp() of a difference is branch-safe.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _loggamma_right(z[right])
    if np.any(~right):
        w = z[~right]
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        out[~right] = (np.log(np.pi) - _log_sin_pi(w) - _loggamma_right(1.0 - w))
    return out[0] if scalar else out


def gamma(z):
    """Euler Gamma for complex argument (principal branches, Lanczos + reflection)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    pole = (z.real <= 0) & (np.abs(z - np.round(z.real)) < 1e-14) & (np.abs(z.imag) < 1e-14)
    if np.any(pole):
        raise ParameterError("gamma evaluated at a nonpositive integer pole")
    out = np.exp(loggamma(z))
    return out[0] if scalar else out


def gamma_ratio(a, b):
    """Gamma(a) / Gamma(b) through log space; safe when both overflow."""
    return np.exp(loggamma(a) - loggamma(b))


def _series_1f1(a, b, z, max_terms, tol):
    """Taylor sum of 1F1 with compensated accumulation and per-lane scaling.

    Returns (mantissa, log_scale) with 1F1 = mantissa * exp(log_scale).
    Inputs must be broadcast to a common shape beforehand.
    """
    term = np.ones_like(a, dtype=complex)
    total = np.ones_like(a, dtype=complex)
    comp = np.zeros_like(total)           # Kahan compensation
    scale = np.zeros(a.shape, dtype=float)
    done = np.zeros(a.shape, dtype=bool)
    stagnant = np.zeros(a.shape, dtype=np.int8)
    for k in range(max_terms):
        term = term * ((a + k) / (b + k)) * (z / (k + 1.0))
        y = np.where(done, 0.0, term) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        small = np.abs(term) <= tol * np.abs(total)
        stagnant = np.where(small, stagnant + 1, 0).astype(np.int8)
        done |= stagnant >= 3
        if done.all():
            break
        big = np.abs(total) > 1e250
        if np.any(big):
            total[big] *= 2.0 ** -512
            comp[big] *= 2.0 ** -512
            term[big] *= 2.0 ** -512
            scale[big] += 512.0 * np.log(2.0)
    else:
        raise ConvergenceError(
            f"1F1 series did not converge within {max_terms} terms "
            f"(max |z| = {np.max(np.abs(z)):.3g})")
    return total, scale


def hyp1f1_scaled(a, b, z, max_terms=10000, tol=1e-16):
    """Confluent hypergeometric 1F1(a; b; z), scaled as (mantissa, log_scale).

    For Re(z) < 0 the sum runs on the reflected parameters,
    1F1(a;b;z) = e^z 1F1(b-a; b; -z), which keeps the terms from cancelling.
    """
    a, b, z = np.broadcast_arrays(np.asarray(a, dtype=complex),
                                  np.asarray(b, dtype=complex),
                                  np.asarray(z, dtype=complex))
    a, b, z = a.copy(), b.copy(), z.copy()
    nonpos_int_b = (b.real <= 0) & (np.abs(b - np.round(b.real)) < 1e-13) & (np.abs(b.imag) < 1e-13)
    if np.any(nonpos_int_b):
        raise ParameterError("1F1 undefined: b is a nonpositive integer")
    mant = np.empty(a.shape, dtype=complex)
    scale = np.empty(a.shape, dtype=float)
    neg = z.real < 0.0
    if np.any(neg):
        m, s = _series_1f1(b[neg] - a[neg], b[neg], -z[neg], max_terms, tol)
        mant[neg] = m
        scale[neg] = s + z[neg].real
        mant[neg] *= np.exp(1j * z[neg].imag)
    if np.any(~neg):
        m, s = _series_1f1(a[~neg], b[~neg], z[~neg], max_terms, tol)
        mant[~neg] = m
        scale[~neg] = s
    return mant, scale


def hyp1f1(a, b, z, max_terms=10000, tol=1e-16):
    """Confluent hypergeometric function 1F1(a; b; z) for complex arguments."""
    scalar = (np.ndim(a) == 0 and np.ndim(b) == 0 and np.ndim(z) == 0)
    mant, scale = hyp1f1_scaled(a, b, z, max_terms=max_terms, tol=tol)
    out = mant * np.exp(scale)
    return complex(out[()]) if scalar else out


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind, complex order and argument
# ---------------------------------------------------------------------------

_GL32_NODES, _GL32_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _bessel_k_series(nu, x):
    """K_nu(x) from the ascending series of I_{+-nu}, combined in log space.

    K_nu = pi/(2 sin(pi nu)) (I_{-nu} - I_{nu}), with
    I_nu = exp(nu log(x/2) - loggamma(nu+1)) * sum_k (x^2/4)^k / (k! (nu+1)_k).
    Stable whenever |x| - Re(x) is moderate; the caller checks that bound.
    """
    nu = complex(nu)
    x = complex(x)
    if abs(nu - round(nu.real)) < 1e-7 and abs(nu.imag) < 1e-7:
        # K is analytic in the order; straddle the integer to dodge sin(pi nu)=0
        d = 1e-5
        return 0.5 * (_bessel_k_series(nu + d, x) + _bessel_k_series(nu - d, x))
    q = 0.25 * x * x
    log_half_x = np.log(x / 2.0)

    def ivalue(v):
        term = 1.0 + 0j
        total = 1.0 + 0j
        k = 0
        while True:
            k += 1
            term *= q / (k * (v + k))
            total += term
            if abs(term) <= 1e-17 * abs(total) or k > 600:
                break
        return total, v * log_half_x - loggamma(v + 1.0)

    s_plus, a_plus = ivalue(nu)
    s_minus, a_minus = ivalue(-nu)
    ls = _log_sin_pi(nu)
    return 0.5 * np.pi * (np.exp(a_minus - ls) * s_minus
                          - np.exp(a_plus - ls) * s_plus)


def _bessel_k_asymptotic(nu, x):
    """Poincare expansion sqrt(pi/2x) e^{-x} sum a_k(nu) x^{-k}; needs |x| >> |nu|^2."""
    nu2 = 4.0 * nu * nu
    term = 1.0 + 0j
    total = 1.0 + 0j
    prev = np.inf
    for k in range(1, 60):
        term = term * (nu2 - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = abs(term)
        if mag >= prev:  # divergent tail reached
            break
        total += term
        prev = mag
        if mag <= 1e-16 * abs(total):
            break
    return np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) * total


def _bessel_k_quadrature(nu, x):
    """Direct quadrature of int_0^inf exp(-x cosh t) cosh(nu t) dt, Re x > 0."""
    rx = x.real
    # choose t_max so the integrand envelope is below 1e-19 of its t=0 value
    target = np.log(1e19)
    anu = abs(nu.real)
    tmax = 1.0
    for _ in range(30):
        f = rx * (np.cosh(tmax) - 1.0) - anu * tmax - target
        if f > 0:
            break
        tmax += 0.5
    freq = abs(x.imag) * np.sinh(tmax) + abs(nu.imag) + abs(nu.real)
    n_panels = max(8, int(2.0 * (freq * tmax) / np.pi) + 8)
    edges = np.linspace(0.0, tmax, n_panels + 1)
    total = 0.0 + 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        t = 0.5 * (hi + lo) + half * _GL32_NODES
        vals = np.exp(-x * np.cosh(t)) * np.cosh(nu * t)
        total += half * np.sum(_GL32_WEIGHTS * vals)
    return total


def bessel_k(nu, x):
    """Modified Bessel function K_nu(x), complex order and complex argument.

    Supports the regimes the variance transforms visit: ascending series
    where it is well conditioned (in particular purely imaginary orders at
    small to moderate |x|), the large-argument expansion, and the real
    integral representation for moderate orders. Raises ConvergenceError for
    unsupported corners rather than returning an inaccurate value.
    """
    nu = complex(nu)
    x = complex(x)
    if x == 0:
        raise ParameterError("bessel_k undefined at x = 0")
    ax = abs(x)
    # cancellation exponent of the ascending series: ~exp(|x| - Re x)
    series_loss = ax - x.real
    if ax <= 60.0 and series_loss <= 20.0:
        return _bessel_k_series(nu, x)
    if ax >= max(30.0, 1.6 * abs(nu) ** 2 + 10.0):
        return _bessel_k_asymptotic(nu, x)
    if x.real > 0 and abs(nu.imag) <= 15.0 and abs(nu.real) <= 15.0:
        return _bessel_k_quadrature(nu, x)
    raise ConvergenceError(
        f"bessel_k: unsupported regime nu={nu:.4g}, x={x:.4g}")

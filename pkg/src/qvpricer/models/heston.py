"""Joint transform of (detrended log return, accrued quadratic variation)
under square-root variance.

H(omega, eta, v, tau) = exp(C + v D) with

    b = kappa + i epsilon rho omega
    d = sqrt(b^2 + epsilon^2 q),        q = omega^2 - i omega + 2 i eta
    C = (kappa theta / epsilon^2) [ (b-d) tau - 2 Log( ((b+d) - (b-d)e^{-d tau}) / (2d) ) ]
    D = -q (1 - e^{-d tau}) / ((b+d) - (b-d) e^{-d tau})

algebraically identical to the ratio form with c = (b+d)/(b-d) but free of
the c = infinity degeneracy, evaluated with a single principal logarithm of
the ratio (the continuous-log convention; the principal square root keeps
Re d >= 0 so e^{-d tau} never overflows).
"""

from __future__ import annotations

import numpy as np

from ..core import Heston

REGULARITY_TOL = 1e-12


def qcoef(omega, eta):
    """Quadratic symbol q = omega^2 - i omega + 2 i eta of the transformed PDE."""
    return omega * omega - 1j * omega + 2j * eta


def log_cd(omega, eta, tau, model: Heston):
    """(C, D) pieces of the exponent; inputs broadcast."""
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    q = qcoef(omega, eta)
    eps2 = model.epsilon ** 2
    b = model.kappa + 1j * model.epsilon * model.rho * omega
    d = np.sqrt(b * b + eps2 * q)
    w1 = b + d
    w2 = b - d
    emdt = np.exp(-d * tau)
    denom = w1 - w2 * emdt
    c_part = (model.kappa * model.theta / eps2) * (
        w2 * tau - 2.0 * np.log(denom / (2.0 * d)))
    d_part = -q * (1.0 - emdt) / denom
    return c_part, d_part


def transform(omega, eta, v, tau, model: Heston):
    """H(omega, eta, v, tau); returns a complex array broadcast over omega/eta."""
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if tau == 0.0:
        return np.ones(np.broadcast(omega, eta).shape, dtype=complex)
    c_part, d_part = log_cd(omega, eta, tau, model)
    return np.exp(c_part + v * d_part)


def is_regular(omega, eta, tau, model: Heston):
    """True away from the singular set e^{-d tau} = (b+d)/(b-d).

    Equivalent to the tolerance |e^{-d tau} - c| >= tol (1 + |c|) scaled by
    |b - d|, which keeps the test meaningful when c is huge or infinite.
    """
    omega = np.asarray(omega, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if tau == 0.0:
        return np.ones(np.broadcast(omega, eta).shape, dtype=bool)
    q = qcoef(omega, eta)
    eps2 = model.epsilon ** 2
    b = model.kappa + 1j * model.epsilon * model.rho * omega
    d = np.sqrt(b * b + eps2 * q)
    w1 = b + d
    w2 = b - d
    denom = w1 - w2 * np.exp(-d * tau)
    return np.abs(denom) >= REGULARITY_TOL * (np.abs(w1) + np.abs(w2))

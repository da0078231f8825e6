"""Block-stream contract and pure-numpy path engine.

Paths are simulated in fixed-size blocks. Block ``b`` draws from
``Philox(key=seed, counter=b << 128)``; within a block, each step consumes
``2 * lanes`` standard normals (first the spot shocks, then the variance
shocks). Terminal values therefore depend only on (seed, path index, config),
never on scheduling, so any dispatch order or worker count reproduces the
same samples bit for bit. The compiled kernel follows this exact contract.
"""

from __future__ import annotations

import numpy as np

BLOCK = 1 << 16

MODEL_HESTON = 0
MODEL_THREE_HALVES = 1
MODEL_GARCH = 2

FLOOR_FULL_TRUNCATION = 0
FLOOR_REFLECTION = 1


def block_bitgen(seed: int, block_index: int) -> np.random.Philox:
    """Philox stream for one block; counters are spaced 2^128 apart."""
    return np.random.Philox(key=seed, counter=block_index << 128)


def block_bounds(n_paths: int):
    """(lo, hi) path-index ranges of each block."""
    return [(lo, min(lo + BLOCK, n_paths)) for lo in range(0, n_paths, BLOCK)]


def _drift_diffusion(model_id, kappa, theta, epsilon, vp):
    if model_id == MODEL_HESTON:
        return kappa * (theta - vp), epsilon * np.sqrt(vp)
    if model_id == MODEL_THREE_HALVES:
        # vp * sqrt(vp) rather than vp**1.5: bit-identical to the kernel
        return kappa * vp * (theta - vp), epsilon * vp * np.sqrt(vp)
    return theta * vp, epsilon * vp  # lognormal variance


def simulate_block_numpy(bitgen, lanes, n_steps, model_id, kappa, theta,
                         epsilon, rho, carry, dt, x0, v0, floor_policy,
                         out_x, out_i):
    """Euler-step one block; identical arithmetic to the compiled kernel.

    The spot uses the exact lognormal conditional step with the variance
    frozen over the substep, accumulated in log space; the variance uses an
    Euler step under the configured floor policy; the quadratic variation is
    the trapezoid of the floored variance.
    """
    gen = np.random.Generator(bitgen)
    x = np.full(lanes, x0)
    v = np.full(lanes, v0)
    acc = np.zeros(lanes)
    sq = np.sqrt(dt)
    rho_c = np.sqrt(1.0 - rho * rho)
    reflect = floor_policy == FLOOR_REFLECTION
    for _ in range(n_steps):
        z = gen.standard_normal(2 * lanes)
        z1 = z[:lanes]
        z2 = rho * z1 + rho_c * z[lanes:]
        vp = np.abs(v) if reflect else np.maximum(v, 0.0)
        drift, diff = _drift_diffusion(model_id, kappa, theta, epsilon, vp)
        x += (carry - 0.5 * vp) * dt + np.sqrt(vp) * sq * z1
        vn = v + drift * dt + diff * sq * z2
        if reflect:
            vn = np.abs(vn)
            acc += 0.5 * dt * (vp + vn)
        else:
            acc += 0.5 * dt * (vp + np.maximum(vn, 0.0))
        v = vn
    out_x[:] = x
    out_i[:] = acc


def simulate_terminal_arrays(engine_block, seed, n_paths, n_steps, model_id,
                             kappa, theta, epsilon, rho, carry, tau, spot,
                             v0, i0, floor_policy):
    """Run all blocks through `engine_block`; returns (S_T, I_T) arrays."""
    x = np.empty(n_paths)
    acc = np.empty(n_paths)
    dt = tau / n_steps
    x0 = np.log(spot)
    for b, (lo, hi) in enumerate(block_bounds(n_paths)):
        engine_block(block_bitgen(seed, b), hi - lo, n_steps, model_id,
                     kappa, theta, epsilon, rho, carry, dt, x0, v0,
                     floor_policy, x[lo:hi], acc[lo:hi])
    return np.exp(x), i0 + acc

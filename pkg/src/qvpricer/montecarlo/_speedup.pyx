#cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Euler path kernel.

Implements exactly the block-stream contract of ``_blocks.py`` (same Philox
draws in the same order, same floating-point operations per lane), so its
output is bit-identical to the numpy engine while avoiding per-step temporary
arrays.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal_fill


def simulate_block(object bitgen, Py_ssize_t lanes, Py_ssize_t n_steps,
                   int model_id, double kappa, double theta, double epsilon,
                   double rho, double carry, double dt, double x0, double v0,
                   int floor_policy, double[::1] out_x, double[::1] out_i):
    cdef bitgen_t *rng
    capsule = bitgen.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a BitGenerator capsule")
    rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    cdef double *v = <double *> malloc(lanes * sizeof(double))
    cdef double *z = <double *> malloc(2 * lanes * sizeof(double))
    if v == NULL or z == NULL:
        free(v)
        free(z)
        raise MemoryError()

    cdef Py_ssize_t k, j
    cdef double sq = sqrt(dt)
    cdef double rho_c = sqrt(1.0 - rho * rho)
    cdef bint reflect = floor_policy == 1
    cdef double vp, vn, drift, diff, z1, z2

    try:
        with bitgen.lock, nogil:
            for j in range(lanes):
                out_x[j] = x0
                out_i[j] = 0.0
                v[j] = v0
            for k in range(n_steps):
                random_standard_normal_fill(rng, 2 * lanes, z)
                for j in range(lanes):
                    z1 = z[j]
                    z2 = rho * z1 + rho_c * z[lanes + j]
                    if reflect:
                        vp = fabs(v[j])
                    else:
                        vp = v[j] if v[j] > 0.0 else 0.0
                    if model_id == 0:
                        drift = kappa * (theta - vp)
                        diff = epsilon * sqrt(vp)
                    elif model_id == 1:
                        drift = kappa * vp * (theta - vp)
                        diff = epsilon * vp * sqrt(vp)
                    else:
                        drift = theta * vp
                        diff = epsilon * vp
                    out_x[j] += (carry - 0.5 * vp) * dt + sqrt(vp) * sq * z1
                    vn = v[j] + drift * dt + diff * sq * z2
                    if reflect:
                        vn = fabs(vn)
                        out_i[j] += 0.5 * dt * (vp + vn)
                    else:
                        out_i[j] += 0.5 * dt * (vp + (vn if vn > 0.0 else 0.0))
                    v[j] = vn
    finally:
        free(v)
        free(z)

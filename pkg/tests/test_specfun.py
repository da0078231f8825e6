"""Special-function accuracy against independent references.

scipy and mpmath serve as the independent side of every check here; the
package's own implementations never appear on both sides of a comparison.
"""

import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sp

from qvpricer.errors import ConvergenceError, ParameterError
from qvpricer.specfun import bessel_k, gamma, hyp1f1, loggamma

mp.mp.dps = 40

RNG = np.random.default_rng(20110101)


class TestGamma:
    def test_gamma_one(self):
        assert abs(gamma(1.0 + 0j) - 1.0) < 1e-14

    def test_gamma_half_is_sqrt_pi(self):
        assert abs(gamma(0.5 + 0j) - math.sqrt(math.pi)) < 1e-13

    def test_cross_check_against_scipy_at_3_plus_4i(self):
        z = 3 + 4j
        ours, ref = gamma(z), sp.gamma(z)
        assert abs(ours - ref) / abs(ref) < 1e-12

    def test_accuracy_disc_radius_50(self):
        # |z| <= 50, kept away from the poles on the nonpositive real axis
        z = RNG.uniform(-50, 50, 400) + 1j * RNG.uniform(-50, 50, 400)
        z = z[np.abs(z) <= 50]
        dist = np.abs(z - np.round(np.real(z)))
        z = z[(np.real(z) > 0) | (dist > 0.1) | (np.abs(np.imag(z)) > 0.1)]
        ours = gamma(z)
        ref = sp.gamma(z)
        ok = np.isfinite(np.abs(ref)) & (np.abs(ref) > 1e-280)
        rel = np.abs(ours[ok] - ref[ok]) / np.abs(ref[ok])
        assert float(np.max(rel)) < 1e-12

    def test_recurrence_property(self):
        # Gamma(z+1) = z Gamma(z) on 1000 samples, |z| <= 30, off the poles
        z = RNG.uniform(-30, 30, 2000) + 1j * RNG.uniform(-30, 30, 2000)
        z = z[np.abs(z) <= 30]
        dist = np.abs(z - np.round(np.real(z)))
        z = z[(dist > 0.1) | (np.abs(np.imag(z)) > 0.1)][:1000]
        lhs = gamma(z + 1.0)
        rhs = z * gamma(z)
        rel = np.abs(lhs - rhs) / np.abs(rhs)
        assert float(np.max(rel)) < 1e-11

    def test_pole_rejected(self):
        with pytest.raises(ParameterError):
            gamma(-2.0 + 0j)

    def test_loggamma_real_part_matches_scipy(self):
        z = np.array([3 + 4j, -2.5 + 1j, 0.1 - 7j, 40 + 20j])
        assert np.max(np.abs(loggamma(z).real - sp.loggamma(z).real)) < 1e-11

    def test_loggamma_ratio_branch_safe(self):
        # exp of a loggamma difference must equal the true Gamma ratio even
        # when the imaginary parts individually differ by 2 pi k
        a, b = 12 + 35j, 3 - 28j
        ours = np.exp(loggamma(a) - loggamma(b))
        ref = complex(mp.gamma(a) / mp.gamma(b))
        assert abs(ours - ref) / abs(ref) < 1e-11


class TestKummer:
    def test_at_zero_is_one(self):
        assert hyp1f1(0.3 + 0.2j, 1.7 - 0.1j, 0.0) == 1.0 + 0j

    def test_classical_identity_1_2_z(self):
        # 1F1(1; 2; z) = (e^z - 1)/z
        assert abs(hyp1f1(1.0, 2.0, 1.0) - (math.e - 1.0)) < 1e-13

    def test_complex_point_against_high_precision_series(self):
        a, b, z = 0.3 + 0.2j, 1.7 - 0.1j, -2 + 1j
        # brute-force Taylor sum in 40-digit arithmetic as the oracle
        with mp.workdps(40):
            term = mp.mpc(1)
            acc = mp.mpc(1)
            for k in range(200):
                term *= (mp.mpc(a) + k) / (mp.mpc(b) + k) * mp.mpc(z) / (k + 1)
                acc += term
        ours = hyp1f1(a, b, z)
        assert abs(ours - complex(acc)) / abs(complex(acc)) < 1e-12

    def test_kummer_reflection_property(self):
        # 1F1(a;b;z) = e^z 1F1(b-a;b;-z) on 3/2-transform-like arguments
        rng = np.random.default_rng(5)
        for _ in range(25):
            a = complex(rng.uniform(0.5, 30), rng.uniform(-30, 30))
            b = 1.0 + 2 * a + complex(rng.uniform(0, 3), 0)
            x = rng.uniform(0.05, 120.0)
            lhs = hyp1f1(a, b, -x)
            rhs = math.exp(-x) * hyp1f1(b - a, b, x)
            assert abs(lhs - rhs) / max(abs(rhs), 1e-300) < 1e-9

    def test_moderate_arguments_against_mpmath(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = complex(rng.uniform(-3, 8), rng.uniform(-8, 8))
            b = complex(rng.uniform(0.5, 9), rng.uniform(-4, 4))
            z = complex(rng.uniform(-35, 35), rng.uniform(-20, 20))
            ref = complex(mp.hyp1f1(a, b, z))
            ours = hyp1f1(a, b, z)
            assert abs(ours - ref) / max(abs(ref), 1e-30) < 1e-10

    def test_nonpositive_integer_b_rejected(self):
        with pytest.raises(ParameterError):
            hyp1f1(0.5, -3.0, 1.0)

    def test_budget_exhaustion_reported(self):
        with pytest.raises(ConvergenceError):
            hyp1f1(1.0, 2.0, 60000.0, max_terms=50)


class TestBesselK:
    def test_half_integer_closed_form(self):
        # K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
        x = 2.0
        ref = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        assert abs(bessel_k(0.5, x) - ref) / ref < 1e-12

    def test_order_symmetry(self):
        nu, x = 0.3 + 0.1j, 1.5
        a, b = bessel_k(nu, x), bessel_k(-nu, x)
        assert abs(a - b) / abs(a) < 1e-12

    def test_imaginary_order_by_integral_representation(self):
        # independent oracle: quadrature of int_0^inf e^{-x cosh t} cos(t) dt
        with mp.workdps(30):
            ref = complex(mp.quad(lambda t: mp.e ** (-2.0 * mp.cosh(t))
                                  * mp.cos(t), [0, 12]))
        ours = bessel_k(1j, 2.0)
        assert abs(ours - ref) / abs(ref) < 1e-10
        assert abs(complex(ours).imag) < 1e-12  # real for imaginary order, real x

    @pytest.mark.parametrize("nu,x", [
        (1j, 2.0), (3j, 0.7 + 0.4j), (0.25, 5.0 - 2.0j), (2.0 + 1.0j, 4.0),
        (10j, 3.0), (25j, 6.0 + 2.0j), (0.5j, 40.0 + 10.0j), (1.5, 80.0),
        (6j, 0.03 + 0.2j),
    ])
    def test_against_mpmath(self, nu, x):
        ref = complex(mp.besselk(mp.mpc(nu), mp.mpc(x)))
        ours = bessel_k(nu, x)
        assert abs(ours - ref) / abs(ref) < 1e-8

    def test_near_integer_order(self):
        ref = complex(mp.besselk(2, mp.mpc(3.0, 1.0)))
        assert abs(bessel_k(2.0, 3.0 + 1.0j) - ref) / abs(ref) < 1e-8

    def test_zero_argument_rejected(self):
        with pytest.raises(ParameterError):
            bessel_k(1j, 0.0)

    def test_unsupported_corner_signals(self):
        # large argument hugging the imaginary axis with large imaginary order
        with pytest.raises(ConvergenceError):
            bessel_k(80j, 70j + 0.01)

import math

import pytest
from hypothesis import given, strategies as st

from qvpricer import (Contour, EmptyStripError, Garch, Heston, ParameterError,
                      Strip, ThreeHalves, intersect_strips, validate_model)

INF = math.inf


class TestValidateModel:
    def test_table_parameters_accepted(self):
        # 2*0.5*0.2 = 0.2 >= 0.3^2 = 0.09
        assert validate_model(Heston(0.5, 0.2, 0.3, 0.0)).ok

    def test_absorbing_heston_rejected_with_reason(self):
        res = validate_model(Heston(0.5, 0.01, 0.3))
        assert not res.ok
        assert "zero" in res.reason

    def test_three_halves_always_ok_for_positive_kappa(self):
        assert validate_model(ThreeHalves(1.0, 0.2, 0.5)).ok

    def test_garch_always_ok(self):
        assert validate_model(Garch(-0.3, 0.9)).ok

    def test_deterministic(self):
        m = Heston(0.5, 0.199999, 0.3)
        assert validate_model(m).ok == validate_model(m).ok

    def test_boundary_equality_accepted(self):
        # 2 kappa theta == epsilon^2 exactly
        assert validate_model(Heston(0.5, 0.09, 0.3)).ok


class TestParameterChecks:
    @pytest.mark.parametrize("bad", [
        dict(kappa=-1.0, theta=0.2, epsilon=0.3),
        dict(kappa=0.5, theta=0.0, epsilon=0.3),
        dict(kappa=0.5, theta=0.2, epsilon=0.3, rho=1.5),
    ])
    def test_heston_field_ranges(self, bad):
        with pytest.raises(ParameterError):
            Heston(**bad)

    def test_garch_requires_positive_epsilon(self):
        with pytest.raises(ParameterError):
            Garch(0.1, 0.0)


finite_bounds = st.floats(min_value=-50, max_value=50,
                          allow_nan=False, allow_infinity=False)


@st.composite
def strips(draw):
    lo1 = draw(finite_bounds)
    hi1 = draw(finite_bounds.filter(lambda x: x > lo1 + 1e-6))
    lo2 = draw(finite_bounds)
    hi2 = draw(finite_bounds.filter(lambda x: x > lo2 + 1e-6))
    return Strip(lo1, hi1, lo2, hi2)


class TestStrips:
    def test_identity_intersection(self):
        a = Strip(1.0, INF, 0.0, INF)
        assert intersect_strips(a, Strip()) == a

    def test_disjoint_is_empty(self):
        assert intersect_strips(Strip(1, 3), Strip(3, 5)) is None

    def test_full_plane_absorbs(self):
        # a payoff strip against an entire-plane model strip
        tvo = Strip(1.0, INF, 0.0, INF)
        assert intersect_strips(tvo, Strip()) == tvo

    @given(strips(), strips())
    def test_commutative(self, a, b):
        assert intersect_strips(a, b) == intersect_strips(b, a)

    @given(strips(), strips(), strips())
    def test_associative(self, a, b, c):
        def chain(x, y, z):
            xy = intersect_strips(x, y)
            return None if xy is None else intersect_strips(xy, z)
        left = chain(a, b, c)
        bc = intersect_strips(b, c)
        right = None if bc is None else intersect_strips(a, bc)
        assert left == right

    @given(strips())
    def test_idempotent(self, a):
        assert intersect_strips(a, a) == a

    def test_degenerate_strip_rejected(self):
        with pytest.raises(ParameterError):
            Strip(2.0, 2.0)


class TestContour:
    def test_strict_membership(self):
        strip = Strip(1.0, 3.0, 0.0, INF)
        Contour(2.0, 0.5).validated_against(strip)
        with pytest.raises(EmptyStripError):
            Contour(1.0, 0.5).validated_against(strip)  # on the edge
        with pytest.raises(EmptyStripError):
            Contour(2.0, -0.1).validated_against(strip)

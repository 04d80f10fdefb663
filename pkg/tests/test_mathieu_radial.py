"""Tests for the radial and modified radial functions."""

import math

import numpy as np
import pytest
from scipy import special

from src.algorithms.characteristic import char_value
from src.algorithms.mathieu import (
    angular_first,
    evaluate,
    radial,
    radial_modified,
    radial_profiles,
    wronskian_check,
)
from src.models.errors import BranchTrackingError, DomainError
from src.models.function_id import FunctionClass, FunctionId, Kind, Parity

ORDERS = [(Parity.EVEN, r) for r in range(0, 7)] + [(Parity.ODD, r) for r in range(1, 7)]
LOW_ORDERS = [(Parity.EVEN, r) for r in range(0, 4)] + [(Parity.ODD, r) for r in range(1, 4)]
RANDOM_FAMILIES = ("ce", "se", "fe", "fo", "je", "jo", "ye", "yo", "he", "ho", "ie", "io", "ke", "ko")


class TestBoundaryValues:
    def test_je1_flat_at_origin(self):
        assert abs(radial(Parity.EVEN, Kind.FIRST, 1, 2.0, 0.0).derivative) < 1e-12

    def test_jo1_vanishes_at_origin(self):
        assert abs(radial(Parity.ODD, Kind.FIRST, 1, 2.0, 0.0).value) < 1e-12

    @pytest.mark.parametrize("r", range(0, 5))
    def test_je_real_for_positive_q(self, r):
        value = radial(Parity.EVEN, Kind.FIRST, r, 1.5, 0.7).value
        assert abs(value.imag) <= 1e-13 * max(1.0, abs(value))

    def test_zero_q_rejected(self):
        with pytest.raises(DomainError):
            radial(Parity.EVEN, Kind.FIRST, 0, 0.0, 1.0)

    def test_modified_second_kind_rejected(self):
        with pytest.raises(DomainError):
            radial_modified(Parity.EVEN, Kind.SECOND, 0, -1.0, 1.0)


class TestLargeArgument:
    """Far from the origin the radial functions approach Bessel functions of 2 sqrt(q) cosh(mu)."""

    def test_je2(self):
        v = 2.0 * math.cosh(10.0)
        envelope = math.sqrt(2.0 / (math.pi * v))
        value = radial(Parity.EVEN, Kind.FIRST, 2, 1.0, 10.0).value
        assert abs(value - special.jv(2, v)) < 1e-3 * envelope

    def test_ye2(self):
        v = 2.0 * math.cosh(10.0)
        envelope = math.sqrt(2.0 / (math.pi * v))
        value = radial(Parity.EVEN, Kind.SECOND, 2, 1.0, 10.0).value
        assert abs(value - special.yv(2, v)) < 1e-3 * envelope

    def test_ke0(self):
        v = 2.0 * math.cosh(6.0)
        value = radial_modified(Parity.EVEN, Kind.THIRD, 0, -1.0, 6.0).value
        assert value.real / special.kv(0, v) == pytest.approx(1.0, abs=1e-2)


class TestOdeOracle:
    @pytest.mark.parametrize("parity,r", ORDERS)
    @pytest.mark.parametrize("kind", [Kind.FIRST, Kind.SECOND])
    def test_radial(self, parity, r, kind, ode_oracle):
        q = 2.0
        alpha = char_value(parity, r, q).alpha
        start = radial(parity, kind, r, q, 0.2)
        value, slope = ode_oracle(alpha, q, 0.2, 1.0, (start.value, start.derivative), radial=True)
        result = radial(parity, kind, r, q, 1.0)
        scale = max(1.0, abs(value))
        assert abs(result.value - value) < 1e-9 * scale
        assert abs(result.derivative - slope) < 1e-8 * scale

    @pytest.mark.parametrize("parity,r", [(Parity.EVEN, 0), (Parity.EVEN, 3), (Parity.ODD, 1), (Parity.ODD, 4)])
    def test_complex_parameter(self, parity, r, ode_oracle):
        q = 1.0 + 1.0j
        alpha = char_value(parity, r, q).alpha
        start = radial(parity, Kind.FIRST, r, q, 0.3)
        value, _ = ode_oracle(alpha, q, 0.3, 1.1, (start.value, start.derivative), radial=True)
        result = radial(parity, Kind.FIRST, r, q, 1.1)
        assert abs(result.value - value) < 1e-9 * max(1.0, abs(value))

    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    def test_decaying_modified(self, parity, r, ode_oracle):
        q = -2.0
        alpha = char_value(parity, r, q).alpha
        start = radial_modified(parity, Kind.THIRD, r, q, 2.0)
        value, _ = ode_oracle(alpha, q, 2.0, 0.4, (start.value, start.derivative), radial=True)
        result = radial_modified(parity, Kind.THIRD, r, q, 0.4)
        assert result.value == pytest.approx(value, rel=1e-8)

    @pytest.mark.slow
    def test_random_samples(self, ode_oracle):
        rng = np.random.default_rng(20240611)
        checked = 0
        while checked < 50:
            name = str(rng.choice(RANDOM_FAMILIES))
            parity = FunctionId.from_name(name, 1).parity
            r = int(rng.integers(1 if parity is Parity.ODD else 0, 7))
            function_id = FunctionId.from_name(name, r)
            q = complex(rng.uniform(0.1, 10.0) * np.exp(1j * rng.uniform(-math.pi, math.pi)))
            # modified radial functions solve the radial equation at -q
            q_equation = -q if function_id.modified else q
            radial_equation = function_id.function_class is FunctionClass.RADIAL
            low = float(rng.uniform(0.1, 2.0))
            try:
                alpha = char_value(parity, r, q_equation).alpha
            except BranchTrackingError:
                continue
            points = [low, low + 0.6]
            ends = [evaluate(function_id, q, x) for x in points]
            # integrate towards the larger end so the oracle follows the dominant solution
            if abs(ends[0].value) > abs(ends[1].value):
                points.reverse()
                ends.reverse()
            start, stop = ends
            value, _ = ode_oracle(
                alpha, q_equation, points[0], points[1], (start.value, start.derivative), radial=radial_equation
            )
            growth = math.cosh(2.0 * points[1]) if radial_equation else 1.0
            envelope = max(abs(stop.value), abs(stop.derivative) / math.sqrt(abs(alpha) + 2.0 * abs(q) * growth + 1.0))
            assert abs(stop.value - value) <= 1e-8 * envelope, (name, r, q, points)
            checked += 1


class TestWronskian:
    @pytest.mark.parametrize("parity,r", ORDERS)
    @pytest.mark.parametrize("q", [0.5, 2.0, 10.0])
    def test_radial_pair(self, parity, r, q):
        report = wronskian_check(parity, r, q, [0.1, 0.4, 0.8, 1.3, 2.0, 2.6, 3.0])
        assert report.passed, report

    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    @pytest.mark.parametrize("q", [-3.0, -3.0 + 2.0j])
    def test_radial_pair_where_functions_grow(self, parity, r, q):
        # Je and Ye both grow like exp(2 sqrt(|q|) cosh mu) here
        report = wronskian_check(parity, r, q, [0.5, 1.0, 2.0])
        assert report.passed, report

    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    @pytest.mark.parametrize("q", [-0.5, -2.0, -10.0])
    def test_modified_pair(self, parity, r, q):
        report = wronskian_check(parity, r, q, [0.2, 0.5, 1.0, 1.5], pair="modified")
        assert report.passed, report

    def test_unknown_pair(self):
        with pytest.raises(DomainError):
            wronskian_check(Parity.EVEN, 0, 1.0, [0.5], pair="sideways")

    def test_report_repr(self):
        report = wronskian_check(Parity.EVEN, 1, 1.0, [0.5])
        assert "PASS" in repr(report)


class TestModifiedIdentities:
    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    @pytest.mark.parametrize("q", [0.5, 2.0])
    @pytest.mark.parametrize("mu", [0.3, 1.0, 2.0])
    def test_first_kind(self, parity, r, q, mu):
        modified = radial_modified(parity, Kind.FIRST, r, q, mu).value
        ordinary = radial(parity, Kind.FIRST, r, q, mu).value
        expected = 1j ** (-r) * ordinary
        assert abs(modified - expected) <= 1e-9 * max(1.0, abs(expected))

    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    @pytest.mark.parametrize("q", [0.5, 2.0])
    @pytest.mark.parametrize("mu", [0.3, 1.0, 2.0])
    def test_third_kind(self, parity, r, q, mu):
        modified = radial_modified(parity, Kind.THIRD, r, q, mu).value
        ordinary = radial(parity, Kind.THIRD, r, q, mu).value
        expected = 1j ** (r + 1) * (math.pi / 2.0) * ordinary
        assert abs(modified - expected) <= 1e-9 * max(1.0, abs(expected))

    @pytest.mark.parametrize("parity,r", LOW_ORDERS)
    @pytest.mark.parametrize("big_q", [0.5, 2.0])
    def test_decaying_solution_real_and_positive(self, parity, r, big_q):
        values = radial_modified(parity, Kind.THIRD, r, -big_q, np.array([0.5, 1.5, 3.0])).value
        assert np.all(np.abs(values.imag) <= 1e-10 * np.abs(values))
        assert np.all(values.real > 0)
        assert np.all(np.diff(values.real) < 0)


class TestProfilesAndDispatch:
    def test_profiles_match_single_channel(self):
        mu = np.array([0.1, 0.6, 1.4])
        channels = [(Parity.EVEN, 0), (Parity.ODD, 3), (Parity.EVEN, 4)]
        rows = radial_profiles(channels, 1.3, mu)
        assert rows.shape == (3, 3)
        for row, (parity, r) in zip(rows, channels):
            np.testing.assert_allclose(row, radial(parity, Kind.FIRST, r, 1.3, mu).value, rtol=1e-12, atol=1e-14)

    def test_angular_dispatch(self):
        result = evaluate(FunctionId.from_name("ce", 2), 1.0, 0.3)
        assert result.value == angular_first(Parity.EVEN, 2, 1.0, 0.3).value

    def test_modified_radial_dispatch(self):
        result = evaluate(FunctionId.from_name("ke", 1), 1.5, 0.8)
        assert result.value == radial_modified(Parity.EVEN, Kind.THIRD, 1, -1.5, 0.8).value
        assert result.value.real > 0

    def test_modified_angular_uses_negated_parameter(self):
        function_id = FunctionId(Parity.ODD, FunctionClass.ANGULAR, Kind.FIRST, True, 1)
        result = evaluate(function_id, 2.0, 0.4)
        assert result.value == angular_first(Parity.ODD, 1, -2.0, 0.4).value

"""Tests for characteristic values and the recurrence matrices."""

import numpy as np
import pytest
from scipy import linalg, special

from src.algorithms import characteristic
from src.algorithms.characteristic import (
    char_value,
    eigenvector,
    matrix_dimension,
    sector_matrix,
)
from src.models.errors import BranchTrackingError, DomainError
from src.models.function_id import Parity


class TestSmallQ:
    def test_a0_at_zero(self):
        assert char_value(Parity.EVEN, 0, 0.0).alpha == 0

    def test_r_squared_at_zero(self):
        assert char_value(Parity.EVEN, 3, 0.0).alpha == 9
        assert char_value(Parity.ODD, 4, 0.0).alpha == 16

    def test_odd_order_zero_rejected(self):
        with pytest.raises(DomainError):
            char_value(Parity.ODD, 0, 1.0)


class TestRealQ:
    def test_a1_of_one(self):
        assert char_value(Parity.EVEN, 1, 1.0).alpha.real == pytest.approx(1.85910807, abs=1e-8)

    def test_b1_of_one(self):
        assert char_value(Parity.ODD, 1, 1.0).alpha.real == pytest.approx(-0.11024882, abs=1e-8)

    @pytest.mark.parametrize("r", range(0, 7))
    @pytest.mark.parametrize("q", [0.5, 2.0, 10.0, 40.0])
    def test_even_against_scipy(self, r, q):
        assert char_value(Parity.EVEN, r, q).alpha.real == pytest.approx(special.mathieu_a(r, q), rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize("r", range(1, 7))
    @pytest.mark.parametrize("q", [0.5, 2.0, 10.0, 40.0])
    def test_odd_against_scipy(self, r, q):
        assert char_value(Parity.ODD, r, q).alpha.real == pytest.approx(special.mathieu_b(r, q), rel=1e-9, abs=1e-9)

    def test_real_q_gives_real_value(self):
        assert char_value(Parity.EVEN, 2, 3.0).alpha.imag == 0.0

    @pytest.mark.parametrize("r", range(0, 6))
    def test_reflection_in_q(self, r):
        q = 2.5
        if r % 2 == 0:
            assert char_value(Parity.EVEN, r, -q).alpha == pytest.approx(char_value(Parity.EVEN, r, q).alpha, rel=1e-12)
            if r > 0:
                assert char_value(Parity.ODD, r, -q).alpha == pytest.approx(
                    char_value(Parity.ODD, r, q).alpha, rel=1e-12
                )
        else:
            assert char_value(Parity.EVEN, r, -q).alpha == pytest.approx(char_value(Parity.ODD, r, q).alpha, rel=1e-12)


class TestComplexQ:
    @pytest.mark.parametrize("parity, r", [(Parity.EVEN, 0), (Parity.EVEN, 3), (Parity.ODD, 2), (Parity.ODD, 5)])
    @pytest.mark.parametrize("q", [1.0 + 1.0j, 0.5j, -2.0 + 0.7j])
    def test_is_an_eigenvalue(self, parity, r, q):
        value = char_value(parity, r, q)
        matrix = sector_matrix(parity, r % 2, q, value.matrix_dim)
        eigenvalues = linalg.eigvals(matrix)
        assert np.min(np.abs(eigenvalues - value.alpha)) < 1e-10 * max(1.0, abs(value.alpha))

    @pytest.mark.parametrize(
        "parity,r", [(Parity.EVEN, 0), (Parity.EVEN, 1), (Parity.EVEN, 4), (Parity.ODD, 1), (Parity.ODD, 3)]
    )
    def test_branch_starts_at_r_squared(self, parity, r):
        q = 0.01 * (1.0 + 1.0j)
        assert abs(char_value(parity, r, q).alpha - r * r) <= 2.0 * abs(q)

    def test_continuous_from_real_axis(self):
        on_axis = char_value(Parity.EVEN, 2, 3.0).alpha
        near_axis = char_value(Parity.EVEN, 2, 3.0 + 1e-6j).alpha
        assert abs(near_axis - on_axis) < 1e-4

    def test_conjugate_symmetry(self):
        q = 1.5 + 0.8j
        assert char_value(Parity.ODD, 3, q.conjugate()).alpha == pytest.approx(
            char_value(Parity.ODD, 3, q).alpha.conjugate(), rel=1e-11
        )


class TestMatrix:
    def test_dimension_covers_order_and_q(self):
        assert matrix_dimension(10, 1.0) >= 40
        assert matrix_dimension(0, 10000.0) >= 170

    def test_matrix_is_symmetric(self):
        matrix = sector_matrix(Parity.EVEN, 0, 2.0 + 1.0j, 12)
        np.testing.assert_array_equal(matrix, matrix.T)

    def test_eigenvector_satisfies_first_row(self):
        q = 1.0
        vector = eigenvector(Parity.EVEN, 0, q)
        alpha = char_value(Parity.EVEN, 0, q).alpha
        # alpha A0 = q A2 in the natural scaling
        assert alpha * vector[0] == pytest.approx(q * vector[1], rel=1e-10)

    @pytest.mark.parametrize("parity,r", [(Parity.EVEN, 0), (Parity.EVEN, 5), (Parity.ODD, 1), (Parity.ODD, 6)])
    @pytest.mark.parametrize("q", [2.0, 40.0, 1.0 + 1.0j])
    def test_doubled_dimension_agrees(self, parity, r, q):
        value = char_value(parity, r, q)
        eigenvalues = linalg.eigvals(sector_matrix(parity, r % 2, q, 2 * value.matrix_dim))
        assert np.min(np.abs(eigenvalues - value.alpha)) < 1e-11 * max(1.0, abs(value.alpha))


class TestOrdering:
    @pytest.mark.parametrize("q", [0.1, 1.0, 5.0, 25.0])
    def test_interlacing(self, q):
        # a_0 < b_1 < a_1 < b_2 < a_2 < ... for q > 0
        ladder = [char_value(Parity.EVEN, 0, q).alpha.real]
        for r in range(1, 8):
            ladder += [char_value(Parity.ODD, r, q).alpha.real, char_value(Parity.EVEN, r, q).alpha.real]
        assert all(lower < upper for lower, upper in zip(ladder, ladder[1:]))


class TestBranchTracking:
    def test_unresolvable_branch_raises(self, monkeypatch, fresh_caches):
        monkeypatch.setattr(characteristic, "BRANCH_SEPARATION", 1e300)
        with pytest.raises(BranchTrackingError):
            char_value(Parity.EVEN, 2, 1.0 + 1.0j)

    def test_real_parameter_needs_no_tracking(self, monkeypatch, fresh_caches):
        monkeypatch.setattr(characteristic, "BRANCH_SEPARATION", 1e300)
        assert char_value(Parity.EVEN, 2, 1.0).alpha.real == pytest.approx(special.mathieu_a(2, 1.0), rel=1e-10)

    def test_clear_cache(self, fresh_caches):
        first = char_value(Parity.ODD, 2, 0.5 + 0.5j)
        characteristic.clear_cache()
        assert char_value(Parity.ODD, 2, 0.5 + 0.5j) is not first

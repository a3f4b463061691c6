"""Tests for branch-tracked twisted periods and the period-matrix rank."""

import logging
from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from src.gkz_core import assemble_system
from src.periods import (
    CycleSpec,
    EvaluationPoint,
    admissible_circles,
    annotate_cycle,
    cycle_inventory,
    derivative_period,
    euler_residual,
    find_zeros,
    generic_point,
    multi_indices,
    numerical_rank,
    period_matrix,
    period_matrix_rank,
    twisted_period,
    worker_count,
)
from src.toric_curve import solution_rank
from src.utils.errors import (
    CycleNotClosed,
    DegenerateCoefficients,
    InsufficientCycles,
    ShapeError,
    UnsupportedDimension,
)

HALF = Fraction(-1, 2)
BETA = (HALF,)
UNIT = CycleSpec(radius=1.0)


@pytest.fixture
def point1(example1):
    return EvaluationPoint.from_system(example1, [[3, 1, 1]])


class TestEvaluationPoint:
    def test_zeros_example1(self, point1):
        zeros = sorted(find_zeros(point1, 0), key=lambda z: z.real)
        expected = [(-3 - sqrt(5)) / 2, (-3 + sqrt(5)) / 2]
        assert np.allclose(zeros, expected, rtol=0, atol=1e-12)

    def test_linear_section(self):
        point = EvaluationPoint(weights=((0, 1),), coeffs=((-1, 1),))
        assert np.allclose(find_zeros(point, 0), [1.0])

    def test_equal_moduli_warn(self, caplog):
        point = EvaluationPoint(weights=((0, 1, 2),), coeffs=((-1, 0, 1),))
        with caplog.at_level(logging.WARNING, logger="src.periods"):
            zeros = point.zeros
        assert np.allclose(sorted(zeros[0].real), [-1.0, 1.0])
        assert "coincide" in caplog.text
        radii = [c.cycle.radius for c in admissible_circles(point, BETA)]
        assert radii == pytest.approx([0.5, 2.0])

    def test_degenerate(self, example1):
        with pytest.raises(DegenerateCoefficients):
            EvaluationPoint.from_system(example1, [[3, 1, 0]])

    def test_shape(self, example1):
        with pytest.raises(ShapeError):
            EvaluationPoint.from_system(example1, [[3, 1]])

    def test_unsupported_dimension(self):
        system = assemble_system(1, 2, [[[0, 0], [1, 0], [0, 1]]], [HALF])
        with pytest.raises(UnsupportedDimension):
            EvaluationPoint.from_system(system, [[1, 1, 1]])

    def test_generic_point_is_reproducible(self, example3):
        assert generic_point(example3, 4) == generic_point(example3, 4)
        assert generic_point(example3, 4) != generic_point(example3, 5)


class TestCycles:
    def test_admissible_circles_example1(self, point1):
        candidates = admissible_circles(point1, BETA)
        exponents = [c.enclosed_exponent for c in candidates]
        assert exponents == [Fraction(1, 2), Fraction(0), Fraction(-1, 2)]
        assert [c.closed for c in candidates] == [False, True, False]

    def test_annotate(self, point1):
        assert annotate_cycle(point1, BETA, UNIT).closed
        small = annotate_cycle(point1, BETA, CycleSpec(radius=0.1))
        assert small.enclosed_exponent == Fraction(1, 2)
        assert not small.closed

    def test_inventory_is_usable(self, point1):
        cycles = cycle_inventory(point1, BETA)
        assert len(cycles) >= 2
        assert all(annotate_cycle(point1, BETA, c).usable for c in cycles)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            CycleSpec(radius=1.0, nodes=1000)
        with pytest.raises(ValueError):
            CycleSpec(radius=1.0, nodes=128)
        with pytest.raises(ValueError):
            CycleSpec(radius=-1.0)
        with pytest.raises(ValueError):
            CycleSpec(radius=1.0, orientation=0)
        with pytest.raises(ValueError):
            CycleSpec(radius=1.0, center=3j, anchor="rho_0")


class TestQuadrature:
    def test_constant_section(self):
        point = EvaluationPoint(weights=((0,),), coeffs=((4,),))
        period = twisted_period(point, BETA, UNIT)
        assert abs(period.value - 0.5) < 1e-14
        assert period.closed

    def test_self_convergence(self, point1):
        coarse = twisted_period(point1, BETA, UNIT.with_nodes(2048)).value
        fine = twisted_period(point1, BETA, UNIT.with_nodes(4096)).value
        assert abs(coarse - fine) <= 1e-10 * abs(fine)

    def test_cauchy_deformation(self, point1):
        inner = twisted_period(point1, BETA, CycleSpec(radius=0.9)).value
        outer = twisted_period(point1, BETA, CycleSpec(radius=1.1)).value
        assert abs(inner - outer) < 1e-10

    def test_orientation(self, point1):
        forward = twisted_period(point1, BETA, UNIT).value
        backward = twisted_period(point1, BETA, UNIT.reversed()).value
        assert abs(forward + backward) < 1e-12

    def test_windings(self, point1):
        assert twisted_period(point1, BETA, UNIT).windings == (0,)
        assert twisted_period(point1, BETA, CycleSpec(radius=0.1)).windings == (-1,)
        assert twisted_period(point1, BETA, CycleSpec(radius=5.0)).windings == (1,)

    def test_open_path_is_flagged(self, point1):
        period = twisted_period(point1, BETA, CycleSpec(radius=0.1))
        assert not period.closed
        assert period.enclosed_exponent == Fraction(1, 2)

    def test_spectral_convergence(self, point1):
        # Zero at modulus 0.382 sits close to the circle
        cycle = CycleSpec(radius=0.40)
        values = [
            twisted_period(point1, BETA, cycle.with_nodes(n)).value
            for n in (256, 512, 1024, 2048)
        ]
        gaps = [abs(b - a) for a, b in zip(values, values[1:])]
        floor = 1e-13 * abs(values[-1])
        for previous, current in zip(gaps, gaps[1:]):
            assert current <= max(previous / 100, floor)
        assert gaps[0] > floor


class TestDerivatives:
    def test_zero_order_matches_period(self, point1):
        value = derivative_period(point1, BETA, UNIT, (0, 0, 0))
        assert value == twisted_period(point1, BETA, UNIT).value

    def test_first_derivative_formula(self, point1):
        expected = -0.5 * twisted_period(point1, (Fraction(-3, 2),), UNIT).value
        assert abs(derivative_period(point1, BETA, UNIT, (1, 0, 0)) - expected) < 1e-12

    def test_finite_differences(self, point1):
        h = 1e-4
        x = point1.flat
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            plus = twisted_period(point1.with_flat(x + step), BETA, UNIT).value
            minus = twisted_period(point1.with_flat(x - step), BETA, UNIT).value
            numeric = (plus - minus) / (2 * h)
            alpha = tuple(int(i == j) for i in range(3))
            exact = derivative_period(point1, BETA, UNIT, alpha)
            assert abs(numeric - exact) <= 1e-6 * abs(exact)

    def test_box_identity(self, point1):
        lhs = derivative_period(point1, BETA, UNIT, (2, 0, 0))
        rhs = derivative_period(point1, BETA, UNIT, (0, 1, 1))
        assert abs(lhs - rhs) < 1e-10

    def test_multi_index_length(self, point1):
        with pytest.raises(ShapeError):
            derivative_period(point1, BETA, UNIT, (1, 0))


class TestEulerResidual:
    def test_example1(self, point1, example1):
        residuals = euler_residual(point1, BETA, UNIT, example1)
        assert len(residuals) == 2
        assert max(residuals) < 1e-8

    def test_not_closed(self, point1, example1):
        with pytest.raises(CycleNotClosed):
            euler_residual(point1, BETA, CycleSpec(radius=0.1), example1)

    def test_scaling(self, point1, example1):
        scaled = point1.scaled(2.0)
        assert max(euler_residual(scaled, BETA, UNIT, example1)) < 1e-8
        ratio = (
            twisted_period(scaled, BETA, UNIT).value
            / twisted_period(point1, BETA, UNIT).value
        )
        assert abs(ratio - 2.0**-0.5) < 1e-10


class TestPeriodMatrix:
    def test_multi_indices(self):
        indices = multi_indices(3, 2)
        assert len(indices) == 1 + 3 + 6
        assert indices[0] == (0, 0, 0)
        assert indices[1:4] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_numerical_rank(self):
        assert numerical_rank(np.eye(3), 1e-6) == 3
        assert numerical_rank(np.zeros((2, 2)), 1e-6) == 0
        assert numerical_rank(np.array([[1, 2], [2, 4.0]]), 1e-6) == 1
        assert numerical_rank(np.eye(3), float("inf")) == 0

    def test_roundoff_is_not_rank(self):
        rank_one = [[1, 2, 3], [2, 4, 6], [1e-17, -3e-17, 2e-17]]
        assert numerical_rank(np.array(rank_one, dtype=complex), 1e-6) == 1
        tiny_column = [[1, 1e-18], [2, -1e-18]]
        assert numerical_rank(np.array(tiny_column), 1e-6) == 1
        assert numerical_rank(np.array([[1e-17, 0], [0, 1e-17]]), 1e-6) == 2

    def test_example1_rank(self, point1, example1):
        rank = period_matrix_rank(point1, BETA, example1, max_order=2, tol=1e-6)
        assert rank == 2

    def test_infinite_tolerance(self, point1, example1):
        assert period_matrix_rank(point1, BETA, example1, tol=float("inf")) == 0

    def test_duplicate_rows(self, point1, example1):
        cycles = cycle_inventory(point1, BETA)
        rank = period_matrix_rank(point1, BETA, example1, cycles=cycles + cycles)
        assert rank == 2

    def test_insufficient_cycles(self, point1, example1):
        with pytest.raises(InsufficientCycles):
            period_matrix_rank(point1, BETA, example1, cycles=[UNIT])

    def test_rows_follow_cycle_order(self, point1):
        cycles = cycle_inventory(point1, BETA)
        single = period_matrix(point1, BETA, cycles, max_order=1, workers=1)
        pooled = period_matrix(point1, BETA, cycles, max_order=1, workers=4)
        assert np.array_equal(single, pooled)
        assert single.shape == (len(cycles), 4)

    @pytest.mark.parametrize("index", [2, 3])
    @pytest.mark.parametrize("seed", range(5))
    def test_rank_matches_prediction(self, index, seed, request):
        system = request.getfixturevalue(f"example{index}")
        point = generic_point(system, seed)
        rank = period_matrix_rank(point, BETA, system)
        assert rank == solution_rank(system) == index + 1

    def test_worker_count(self):
        assert worker_count(3) == 3
        assert worker_count() >= 1

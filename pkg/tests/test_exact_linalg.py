"""Tests for exact integer and rational linear algebra."""

import random
from fractions import Fraction
from itertools import combinations
from math import gcd, prod

import pytest
from sympy import Matrix

from src.exact_linalg import (
    IntMatrix,
    cone_facet_normals,
    cone_interior_contains,
    integer_kernel_basis,
    lattice_index,
    primitive,
    rational_rank,
    smith_normal_form,
    solve_rational,
)
from src.utils.errors import DimensionMismatch, NotFullDimensional

EXAMPLE1 = IntMatrix([[1, 1, 1], [0, 1, -1]])
EXAMPLE2 = IntMatrix([[1, 1, 1, 1], [0, 1, 2, -1]])


def random_matrix(rng: random.Random) -> IntMatrix:
    rows = rng.randint(1, 4)
    cols = rng.randint(1, 4)
    return IntMatrix([[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)])


class TestIntMatrix:
    def test_rejects_ragged_and_float(self):
        with pytest.raises(ValueError):
            IntMatrix([[1, 2], [3]])
        with pytest.raises(ValueError):
            IntMatrix([[1.5]])
        with pytest.raises(ValueError):
            IntMatrix([])

    def test_apply_and_mismatch(self):
        assert EXAMPLE1.apply((2, -1, -1)) == (0, 0)
        assert EXAMPLE1.apply((Fraction(1, 2), 0, 0)) == (Fraction(1, 2), 0)
        with pytest.raises(DimensionMismatch):
            EXAMPLE1.apply((1, 2))

    def test_determinant(self):
        assert IntMatrix([[2, 1], [1, 1]]).determinant() == 1
        assert IntMatrix([[0, 1], [1, 0]]).determinant() == -1
        assert IntMatrix([[1, 2], [2, 4]]).determinant() == 0
        assert IntMatrix([[0, 0, 2], [0, 3, 0], [5, 0, 0]]).determinant() == -30

    def test_determinant_matches_sympy(self):
        rng = random.Random(7)
        for _ in range(100):
            size = rng.randint(1, 4)
            rows = [[rng.randint(-5, 5) for _ in range(size)] for _ in range(size)]
            assert IntMatrix(rows).determinant() == Matrix(rows).det()


class TestSmithNormalForm:
    def test_diagonal_example(self):
        snf = smith_normal_form(IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]))
        assert snf.diagonal == (2, 6, 12)

    def test_index_two_sublattice(self):
        # Columns (1, 0) and (1, 2)
        assert smith_normal_form(IntMatrix([[1, 1], [0, 2]])).diagonal == (1, 2)
        assert lattice_index(IntMatrix([[1, 1], [0, 2]])) == 2

    def test_zero_matrix(self):
        snf = smith_normal_form(IntMatrix([[0, 0], [0, 0]]))
        assert snf.diagonal == (0, 0)
        assert snf.rank == 0

    def test_random_matrices(self):
        rng = random.Random(2024)
        for _ in range(500):
            M = random_matrix(rng)
            snf = smith_normal_form(M)
            assert snf.U @ M @ snf.V == snf.S
            assert abs(snf.U.determinant()) == 1
            assert abs(snf.V.determinant()) == 1
            for i in range(snf.S.rows):
                for j in range(snf.S.cols):
                    if i != j:
                        assert snf.S.row(i)[j] == 0
            diagonal = snf.diagonal
            assert all(d >= 0 for d in diagonal)
            for a, b in zip(diagonal, diagonal[1:]):
                if a == 0:
                    assert b == 0
                else:
                    assert b % a == 0

    def test_determinantal_divisors(self):
        # s_1 * ... * s_k is the gcd of the k x k minors
        rng = random.Random(11)
        for _ in range(100):
            M = random_matrix(rng)
            sym = Matrix(M.tolist())
            diagonal = smith_normal_form(M).diagonal
            for k in range(1, min(M.rows, M.cols) + 1):
                divisor = 0
                for rows in combinations(range(M.rows), k):
                    for cols in combinations(range(M.cols), k):
                        minor = sym.extract(list(rows), list(cols)).det()
                        divisor = gcd(divisor, int(minor))
                assert prod(diagonal[:k]) == divisor


class TestKernel:
    def test_example1(self):
        (nu,) = integer_kernel_basis(EXAMPLE1)
        assert nu in ((2, -1, -1), (-2, 1, 1))

    def test_example2(self):
        basis = integer_kernel_basis(EXAMPLE2)
        assert len(basis) == 2
        for nu in basis:
            assert EXAMPLE2.apply(nu) == (0, 0)
        # (1, -2, 1, 0) and (2, -1, 0, -1) lie in the Z-span of the basis
        lattice = IntMatrix.from_columns(basis)
        for target in ((1, -2, 1, 0), (2, -1, 0, -1)):
            solution = solve_rational(lattice, target)
            assert solution is not None
            assert all(v.denominator == 1 for v in solution)

    def test_identity_has_trivial_kernel(self):
        assert integer_kernel_basis(IntMatrix.identity(3)) == []

    def test_random_kernels(self):
        rng = random.Random(3)
        for _ in range(200):
            M = random_matrix(rng)
            basis = integer_kernel_basis(M)
            assert len(basis) == M.cols - rational_rank(M)
            for nu in basis:
                assert all(v == 0 for v in M.apply(nu))
            if basis:
                assert rational_rank(IntMatrix(basis)) == len(basis)


class TestRankAndSolve:
    def test_rank(self):
        assert rational_rank(EXAMPLE1) == 2
        assert rational_rank(IntMatrix([[0, 0], [0, 0]])) == 0
        assert rational_rank(IntMatrix.identity(3)) == 3

    def test_rank_matches_sympy(self):
        rng = random.Random(5)
        for _ in range(200):
            M = random_matrix(rng)
            assert rational_rank(M) == Matrix(M.tolist()).rank()

    def test_solve(self):
        half = Fraction(1, 2)
        assert solve_rational(IntMatrix.identity(2), (half, 3)) == (half, 3)
        assert solve_rational(IntMatrix([[1, 1], [2, 2]]), (1, 3)) is None
        assert solve_rational(IntMatrix([[1, 1], [0, 1]]), (half, 0)) == (half, 0)

    def test_solve_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_rational(IntMatrix.identity(2), (1,))

    def test_primitive(self):
        assert primitive((4, -6, 2)) == (2, -3, 1)
        assert primitive((0, 0)) == (0, 0)


class TestCones:
    def test_example1_facets(self):
        normals = cone_facet_normals([(1, 0), (1, 1), (1, -1)])
        assert set(normals) == {(1, 1), (1, -1)}

    def test_positive_orthant(self):
        normals = cone_facet_normals([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert set(normals) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}

    def test_not_full_dimensional(self):
        with pytest.raises(NotFullDimensional):
            cone_facet_normals([(1, 0), (2, 0)])

    def test_interior(self):
        generators = [(1, 0), (1, 1), (1, -1)]
        assert cone_interior_contains(generators, (Fraction(1, 2), 0))
        assert not cone_interior_contains(generators, (1, 1))
        assert not cone_interior_contains(generators, (0, 0))

    def test_whole_line_contains_everything(self):
        assert cone_interior_contains([(1,), (-1,)], (0,))

    def test_generator_sum_is_interior(self):
        rng = random.Random(17)
        checked = 0
        while checked < 50:
            dim = rng.randint(2, 3)
            gens = {
                tuple(rng.randint(-3, 3) for _ in range(dim))
                for _ in range(rng.randint(dim, 6))
            }
            gens = sorted(gens - {(0,) * dim})
            if len(gens) < dim or rational_rank(IntMatrix(gens)) < dim:
                continue
            normals = cone_facet_normals(gens)
            if not normals:
                continue
            total = tuple(sum(g[i] for g in gens) for i in range(dim))
            assert cone_interior_contains(gens, total)
            for g in gens:
                on_facet = any(sum(a * b for a, b in zip(n, g)) == 0 for n in normals)
                assert cone_interior_contains(gens, g) == (not on_facet)
            checked += 1

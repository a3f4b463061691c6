"""Tests for the twisted derivation, its functional and preimages."""

import random
from fractions import Fraction

import pytest

from src.twist_cokernel import (
    ONE,
    QuotientElement,
    TwistContext,
    apply_twisted_derivation,
    connection_residue,
    derivation_matrix,
    derivation_rank,
    functional_L,
    gamma_ratio,
    solve_preimage,
    solve_preimage_trace,
)
from src.utils.errors import GIsZero, IntegralBeta, MissingGradient, NotInImage

HALF = Fraction(1, 2)
DS = QuotientElement(c=(0, 1))
S = QuotientElement(d=(1,))


def random_fraction(rng: random.Random, size: int = 5) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, size))


def random_element(rng: random.Random) -> QuotientElement:
    return QuotientElement(
        c=[random_fraction(rng) for _ in range(rng.randint(0, 4))],
        d=[random_fraction(rng) for _ in range(rng.randint(0, 4))],
    )


def random_context(rng: random.Random) -> TwistContext:
    while True:
        beta = random_fraction(rng, 7)
        g = random_fraction(rng)
        if beta.denominator != 1 and g != 0:
            return TwistContext(beta=beta, g=g)


@pytest.fixture
def ctx():
    return TwistContext(beta=HALF, g=2)


class TestQuotientElement:
    def test_trims_trailing_zeros(self):
        u = QuotientElement(c=[1, 0, 0], d=[0, 0])
        assert u.c == (1,)
        assert u.d == ()
        assert u == ONE

    def test_arithmetic(self):
        u = QuotientElement(c=(1, 2), d=(3,))
        v = QuotientElement(c=(0, -2), d=(1, 1))
        assert u + v == QuotientElement(c=(1,), d=(4, 1))
        assert 2 * u == QuotientElement(c=(2, 4), d=(6,))
        assert (u - u).is_zero()
        assert u.coefficient_c(5) == 0
        assert u.coefficient_d(1) == 3
        assert u.coefficient_d(0) == 0

    def test_to_dict(self):
        assert QuotientElement(c=(HALF,), d=(0, -3)).to_dict() == {
            "c": ["1/2"],
            "d": ["0", "-3"],
        }

    def test_integral_beta_rejected(self):
        with pytest.raises(IntegralBeta):
            TwistContext(beta=1, g=1)


class TestApply:
    def test_derivative_of_ds(self, ctx):
        assert apply_twisted_derivation(ctx, DS) == QuotientElement(c=(0, 2, 1))

    def test_derivative_of_s(self, ctx):
        assert apply_twisted_derivation(ctx, S) == QuotientElement(c=(HALF,), d=(2,))

    def test_zero(self, ctx):
        assert apply_twisted_derivation(ctx, QuotientElement()).is_zero()

    def test_linearity(self):
        rng = random.Random(1)
        for _ in range(100):
            ctx = random_context(rng)
            u, v = random_element(rng), random_element(rng)
            a = random_fraction(rng)
            lhs = apply_twisted_derivation(ctx, a * u + v)
            rhs = a * apply_twisted_derivation(ctx, u)
            assert lhs == rhs + apply_twisted_derivation(ctx, v)


class TestFunctional:
    def test_normalization(self, ctx):
        assert functional_L(ctx, ONE) == 1

    def test_image_elements(self, ctx):
        assert functional_L(ctx, QuotientElement(c=(0, 2, 1))) == 0
        assert functional_L(ctx, QuotientElement(c=(HALF,), d=(2,))) == 0

    def test_g_zero(self):
        with pytest.raises(GIsZero):
            functional_L(TwistContext(beta=HALF, g=0), ONE)

    def test_gamma_ratio(self):
        assert gamma_ratio(HALF, 1) == 1
        assert gamma_ratio(HALF, 3) == Fraction(3, 2) * Fraction(5, 2)
        with pytest.raises(ValueError):
            gamma_ratio(HALF, 0)

    def test_kernel_identity(self):
        rng = random.Random(1000)
        for _ in range(1000):
            ctx = random_context(rng)
            u = random_element(rng)
            assert functional_L(ctx, apply_twisted_derivation(ctx, u)) == 0

    def test_linearity(self):
        rng = random.Random(2)
        for _ in range(100):
            ctx = random_context(rng)
            u, v = random_element(rng), random_element(rng)
            a = random_fraction(rng)
            expected = a * functional_L(ctx, u) + functional_L(ctx, v)
            assert functional_L(ctx, a * u + v) == expected


class TestPreimage:
    def test_example(self, ctx):
        assert solve_preimage(ctx, QuotientElement(c=(0, 2, 1))) == DS

    def test_zero(self, ctx):
        assert solve_preimage(ctx, QuotientElement()).is_zero()

    def test_not_in_image(self, ctx):
        with pytest.raises(NotInImage):
            solve_preimage(ctx, ONE)

    def test_trace_sequences(self, ctx):
        target = apply_twisted_derivation(ctx, QuotientElement(c=(0, 1), d=(1,)))
        trace = solve_preimage_trace(ctx, target)
        assert trace.a == (0, 1)
        assert trace.b == (1,)
        assert trace.to_dict()["preimage"] == {"c": ["0", "1"], "d": ["1"]}

    def test_round_trip(self):
        rng = random.Random(7)
        for _ in range(1000):
            ctx = random_context(rng)
            u = random_element(rng)
            target = apply_twisted_derivation(ctx, u)
            assert solve_preimage(ctx, target) == u

    def test_projected_round_trip(self):
        # Subtract L(r) * 1 to land in the image
        rng = random.Random(8)
        for _ in range(200):
            ctx = random_context(rng)
            r = random_element(rng)
            r = r - functional_L(ctx, r) * ONE
            assert apply_twisted_derivation(ctx, solve_preimage(ctx, r)) == r


class TestConnection:
    def test_examples(self):
        assert connection_residue(TwistContext(HALF, 2, dg=(3,)), 0) == Fraction(-3, 4)
        assert connection_residue(TwistContext(HALF, 2, dg=(0, 5)), 0) == 0
        ctx = TwistContext(Fraction(-1, 2), 1, dg=(1,))
        assert connection_residue(ctx, 0) == HALF

    def test_formula(self):
        rng = random.Random(100)
        for _ in range(100):
            base = random_context(rng)
            dg = tuple(random_fraction(rng) for _ in range(3))
            ctx = TwistContext(base.beta, base.g, dg=dg)
            for i, value in enumerate(dg):
                assert connection_residue(ctx, i) == -ctx.beta * value / ctx.g

    def test_missing_gradient(self, ctx):
        with pytest.raises(MissingGradient):
            connection_residue(ctx, 0)
        with pytest.raises(MissingGradient):
            connection_residue(TwistContext(HALF, 2, dg=(1,)), 1)


class TestInjectivity:
    def test_matrix_shape(self, ctx):
        matrix = derivation_matrix(ctx, 2, 3)
        assert len(matrix) == 2 + 2 + 3
        assert all(len(row) == 2 + 1 + 3 for row in matrix)

    def test_full_column_rank(self):
        rng = random.Random(5)
        for _ in range(20):
            ctx = random_context(rng)
            for p in range(4):
                for q in range(4):
                    assert derivation_rank(ctx, p, q) == p + 1 + q

    def test_full_column_rank_at_g_zero(self):
        ctx = TwistContext(beta=Fraction(1, 3), g=0)
        assert derivation_rank(ctx, 3, 3) == 7

"""Exact calculus of the twisted derivation on O[s, D_s] / (s*D_s - beta + 1).

Coefficients are exact rationals standing for the values of functions at a
sample point: ``g`` is the value of g(x), ``dg`` the values of its partial
derivatives. A class is written sum_i c_i D_s^i + sum_j d_j s^j (j >= 1),
and the twisted derivation is D_f(u) = D_s * u + g * u.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.exact_linalg import IntMatrix, rational_rank
from src.utils.errors import GIsZero, IntegralBeta, MissingGradient, NotInImage
from src.utils.format_utils import format_rational_vector

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


def _trim(values: Sequence[Scalar]) -> Tuple[Fraction, ...]:
    out = [Fraction(v) for v in values]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class QuotientElement:
    """Class sum c_i D_s^i + sum d_j s^j; ``d[0]`` is the coefficient of s^1."""

    c: Tuple[Fraction, ...] = ()
    d: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "c", _trim(self.c))
        object.__setattr__(self, "d", _trim(self.d))

    def coefficient_c(self, i: int) -> Fraction:
        return self.c[i] if 0 <= i < len(self.c) else Fraction(0)

    def coefficient_d(self, j: int) -> Fraction:
        """Coefficient of s^j, j >= 1."""
        return self.d[j - 1] if 1 <= j <= len(self.d) else Fraction(0)

    def is_zero(self) -> bool:
        return not self.c and not self.d

    def __add__(self, other: "QuotientElement") -> "QuotientElement":
        p = max(len(self.c), len(other.c))
        q = max(len(self.d), len(other.d))
        return QuotientElement(
            c=[self.coefficient_c(i) + other.coefficient_c(i) for i in range(p)],
            d=[self.coefficient_d(j) + other.coefficient_d(j) for j in range(1, q + 1)],
        )

    def __rmul__(self, scalar: Scalar) -> "QuotientElement":
        scalar = Fraction(scalar)
        return QuotientElement(
            c=[scalar * v for v in self.c], d=[scalar * v for v in self.d]
        )

    def __neg__(self) -> "QuotientElement":
        return -1 * self

    def __sub__(self, other: "QuotientElement") -> "QuotientElement":
        return self + (-other)

    def to_dict(self) -> Dict[str, List[str]]:
        return {
            "c": format_rational_vector(self.c),
            "d": format_rational_vector(self.d),
        }


ONE = QuotientElement(c=(Fraction(1),))


@dataclass(frozen=True)
class TwistContext:
    """Scalars at a sample point: beta, g(x) and optionally dg/dx_i(x)."""

    beta: Fraction
    g: Fraction
    dg: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "g", Fraction(self.g))
        if self.dg is not None:
            object.__setattr__(self, "dg", tuple(Fraction(v) for v in self.dg))
        if self.beta.denominator == 1:
            raise IntegralBeta(f"beta = {self.beta} is an integer")


@dataclass(frozen=True)
class PreimageTrace:
    """Preimage u = sum a_k D_s^k + sum b_j s^j with its coefficient sequences."""

    preimage: QuotientElement
    a: Tuple[Fraction, ...]
    b: Tuple[Fraction, ...]

    def to_dict(self) -> Dict:
        return {
            "a": format_rational_vector(self.a),
            "b": format_rational_vector(self.b),
            "preimage": self.preimage.to_dict(),
        }


def gamma_ratio(beta: Scalar, k: int) -> Fraction:
    """
    Gamma(k + beta) / Gamma(1 + beta) as the rising product prod_{i=1}^{k-1} (beta + i).

    Args:
        beta: Rational parameter
        k: Index >= 1

    Returns:
        Exact rational ratio (1 for k = 1)
    """
    if k < 1:
        raise ValueError(f"gamma_ratio index must be >= 1, got {k}")
    value = Fraction(1)
    for i in range(1, k):
        value *= Fraction(beta) + i
    return value


def apply_twisted_derivation(ctx: TwistContext, u: QuotientElement) -> QuotientElement:
    """
    Apply D_f(u) = D_s * u + g * u.

    D_s * D_s^i = D_s^(i+1) and D_s * s^j = (beta - 1 + j) s^(j-1), so D_s * s
    is beta times the unit class.

    Args:
        ctx: Twist context
        u: Class to differentiate

    Returns:
        D_f(u)
    """
    p, q = len(u.c), len(u.d)
    c = [ctx.beta * u.coefficient_d(1) + ctx.g * u.coefficient_c(0)]
    for i in range(p):
        c.append(u.coefficient_c(i) + ctx.g * u.coefficient_c(i + 1))
    d = [
        (ctx.beta + j) * u.coefficient_d(j + 1) + ctx.g * u.coefficient_d(j)
        for j in range(1, q + 1)
    ]
    return QuotientElement(c=c, d=d)


def functional_L(ctx: TwistContext, u: QuotientElement) -> Fraction:
    """
    Linear functional vanishing exactly on the image of D_f.

    Normalized by Gamma(1 + beta):
    L(u) = beta * sum_k r_k (-g)^(-k) d_k + sum_l (-g)^l c_l
    with r_k = gamma_ratio(beta, k).

    Args:
        ctx: Twist context with g != 0
        u: Class

    Returns:
        Exact value of L(u)

    Raises:
        GIsZero: If ctx.g == 0
    """
    if ctx.g == 0:
        raise GIsZero("the functional is undefined at g = 0")
    minus_g = -ctx.g
    value = sum((minus_g**l * c_l for l, c_l in enumerate(u.c)), Fraction(0))
    value += ctx.beta * sum(
        (
            gamma_ratio(ctx.beta, k) * minus_g ** (-k) * u.coefficient_d(k)
            for k in range(1, len(u.d) + 1)
        ),
        Fraction(0),
    )
    return value


def solve_preimage_trace(ctx: TwistContext, r: QuotientElement) -> PreimageTrace:
    """
    Construct u with D_f(u) = r by the backward recursions.

    a_k = c_{k+1} - g c_{k+2} + g^2 c_{k+3} - ...
    b_j = sum_{k >= j} (-1)^(k-j) (r_k / r_j) d_k g^(j-k-1)

    Args:
        ctx: Twist context with g != 0
        r: Target class with L(r) = 0

    Returns:
        PreimageTrace holding u and the sequences a, b

    Raises:
        GIsZero: If ctx.g == 0
        NotInImage: If L(r) != 0
    """
    value = functional_L(ctx, r)
    if value != 0:
        raise NotInImage(f"functional value {value} is nonzero")

    g = ctx.g
    p, q = len(r.c) - 1, len(r.d)
    a = [
        sum(((-g) ** l * r.coefficient_c(k + 1 + l) for l in range(p - k)), Fraction(0))
        for k in range(max(p, 0))
    ]
    b = [
        sum(
            (
                (-1) ** (k - j)
                * gamma_ratio(ctx.beta, k)
                / gamma_ratio(ctx.beta, j)
                * r.coefficient_d(k)
                * g ** (j - k - 1)
                for k in range(j, q + 1)
            ),
            Fraction(0),
        )
        for j in range(1, q + 1)
    ]
    u = QuotientElement(c=a, d=b)
    if apply_twisted_derivation(ctx, u) != r:
        raise NotInImage("recursion did not reproduce the target class")
    logger.debug(f"Preimage with {len(u.c)} D_s-terms and {len(u.d)} s-terms")
    return PreimageTrace(preimage=u, a=tuple(a), b=tuple(b))


def solve_preimage(ctx: TwistContext, r: QuotientElement) -> QuotientElement:
    """Return u with D_f(u) = r (see solve_preimage_trace)."""
    return solve_preimage_trace(ctx, r).preimage


def connection_residue(ctx: TwistContext, i: int) -> Fraction:
    """
    Coefficient of the induced connection in direction x_i.

    Evaluates L on the class of D_{x_i} * 1 = s * dg/dx_i, which equals
    -beta * (dg/dx_i) / g.

    Args:
        ctx: Twist context carrying dg
        i: 0-based coordinate index

    Returns:
        Exact rational residue

    Raises:
        MissingGradient: If dg is absent or has no entry i
        GIsZero: If ctx.g == 0
    """
    if ctx.dg is None or not 0 <= i < len(ctx.dg):
        raise MissingGradient(f"no gradient value for coordinate {i}")
    return functional_L(ctx, QuotientElement(d=(ctx.dg[i],)))


def derivation_matrix(ctx: TwistContext, p: int, q: int) -> List[List[Fraction]]:
    """
    Matrix of D_f on the coefficient box (c_0..c_p, d_1..d_q).

    Columns are the basis classes D_s^0..D_s^p, s^1..s^q; rows are the
    image coordinates c_0..c_{p+1}, d_1..d_q.

    Args:
        ctx: Twist context
        p: Highest D_s-power in the domain
        q: Highest s-power in the domain

    Returns:
        (p + 2 + q) x (p + 1 + q) rational matrix
    """
    basis = [QuotientElement(c=[0] * i + [1]) for i in range(p + 1)]
    basis += [QuotientElement(d=[0] * (j - 1) + [1]) for j in range(1, q + 1)]
    columns = []
    for element in basis:
        image = apply_twisted_derivation(ctx, element)
        columns.append(
            [image.coefficient_c(i) for i in range(p + 2)]
            + [image.coefficient_d(j) for j in range(1, q + 1)]
        )
    return [list(row) for row in zip(*columns)]


def derivation_rank(ctx: TwistContext, p: int, q: int) -> int:
    """Exact rank of derivation_matrix(ctx, p, q)."""
    rows = derivation_matrix(ctx, p, q)
    scale = 1
    for row in rows:
        for v in row:
            scale = lcm(scale, v.denominator)
    return rational_rank(IntMatrix([[int(v * scale) for v in row] for row in rows]))

"""Topological rank prediction for GKZ systems over the projective line.

For n = 1 the toric variety is P^1 with two rays, rho_0 = +1 and
rho_inf = -1. The sections b_k cut out len_k zeros each, the local system
has exponent beta_k around every zero of b_k and exponent -sum_k a_k beta_k
at a ray. Rays with integral exponent (the set I) are kept in the space and
contribute relative classes; the others (J) are punctures.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.exact_linalg import IntVector
from src.gkz_core import GkzSystem, check_semi_nonresonant
from src.utils.errors import (
    ConstantBlock,
    HypothesisViolation,
    TooFewPunctures,
    TrivialLocalSystem,
    UnsupportedDimension,
)
from src.utils.format_utils import format_rational

logger = logging.getLogger(__name__)

RHO_0 = "rho_0"
RHO_INF = "rho_inf"


@dataclass(frozen=True)
class RaySet:
    """The two primitive rays of the fan of P^1."""

    labels: Tuple[str, str] = (RHO_0, RHO_INF)
    rays: Tuple[IntVector, IntVector] = ((1,), (-1,))

    def ray(self, label: str) -> IntVector:
        return self.rays[self.labels.index(label)]


RAYS = RaySet()


@dataclass(frozen=True)
class DivisorData:
    """Divisor coefficients a[ray][k] and lattice lengths of the weight blocks."""

    a: Dict[str, Tuple[int, ...]]
    lengths: Tuple[int, ...]


@dataclass(frozen=True)
class Puncture:
    """A point of P^1 carrying a monodromy exponent.

    kind is "zero" (zeros of block ``block``, ``multiplicity`` of them) or
    "ray". For rays ``chart_exponent`` is the exponent seen in the
    total-space chart, the opposite of the residue-consistent ``exponent``.
    """

    kind: str
    exponent: Fraction
    multiplicity: int = 1
    block: Optional[int] = None
    ray: Optional[str] = None
    chart_exponent: Optional[Fraction] = None

    def to_dict(self) -> Dict:
        data = {"kind": self.kind}
        if self.kind == "zero":
            data["block"] = self.block + 1
        else:
            data["ray"] = self.ray
        data["exponent"] = format_rational(self.exponent)
        if self.chart_exponent is not None:
            data["chart_exponent"] = format_rational(self.chart_exponent)
        data["multiplicity"] = self.multiplicity
        return data


@dataclass(frozen=True)
class ExponentProfile:
    punctures: Tuple[Puncture, ...]
    integral: Tuple[str, ...]
    complement: Tuple[str, ...]

    @property
    def total_exponent(self) -> Fraction:
        return sum((p.exponent * p.multiplicity for p in self.punctures), Fraction(0))

    def open_punctures(self) -> List[Puncture]:
        """Punctures of U_b: all zeros and the rays outside I."""
        return [
            p for p in self.punctures if p.kind == "zero" or p.ray in self.complement
        ]


@dataclass(frozen=True)
class LesTable:
    """Dimensions in the long exact sequence of the pair (U_b, U_b cap D_I)."""

    h1_int: int
    h1_U: int
    h1_rel: int
    h0_int: int
    h0_U: int
    h0_rel: int

    @property
    def alternating_sum(self) -> int:
        return (
            self.h1_int
            - self.h1_U
            + self.h1_rel
            - self.h0_int
            + self.h0_U
            - self.h0_rel
        )

    def as_tuple(self) -> Tuple[int, ...]:
        return (
            self.h1_int,
            self.h1_U,
            self.h1_rel,
            self.h0_int,
            self.h0_U,
            self.h0_rel,
        )

    def to_dict(self) -> Dict[str, int]:
        return {
            "h1_int": self.h1_int,
            "h1_U": self.h1_U,
            "h1_rel": self.h1_rel,
            "h0_int": self.h0_int,
            "h0_U": self.h0_U,
            "h0_rel": self.h0_rel,
        }


@dataclass(frozen=True)
class ToricCurveReport:
    divisors: DivisorData
    profile: ExponentProfile
    les: LesTable
    rank: int
    lifted: Tuple[IntVector, ...] = field(default=())

    @property
    def I(self) -> Tuple[str, ...]:
        return self.profile.integral

    @property
    def J(self) -> Tuple[str, ...]:
        return self.profile.complement

    def to_dict(self) -> Dict:
        return {
            "a": {label: list(values) for label, values in self.divisors.a.items()},
            "lengths": list(self.divisors.lengths),
            "I": list(self.I),
            "J": list(self.J),
            "profile": [p.to_dict() for p in self.profile.punctures],
            "les": self.les.to_dict(),
            "rank": self.rank,
            "lifted_rays": [list(v) for v in self.lifted],
        }


def divisor_coefficients(sys: GkzSystem) -> DivisorData:
    """
    Divisor coefficients of the inverse line bundles on P^1.

    Args:
        sys: GKZ datum with n = 1

    Returns:
        DivisorData with a[rho_0][k] = -min w_k and a[rho_inf][k] = max w_k

    Raises:
        UnsupportedDimension: If n != 1
        ConstantBlock: If some block has lattice length zero
    """
    if sys.n != 1:
        raise UnsupportedDimension(f"torus dimension {sys.n} is not supported (n = 1)")
    lows, highs, lengths = [], [], []
    for k, block in enumerate(sys.weight_blocks):
        values = [w[0] for w in block]
        low, high = min(values), max(values)
        if high == low:
            raise ConstantBlock(f"block {k + 1} has lattice length zero")
        lows.append(-low)
        highs.append(high)
        lengths.append(high - low)
    return DivisorData(
        a={RHO_0: tuple(lows), RHO_INF: tuple(highs)}, lengths=tuple(lengths)
    )


def _ray_pairing(div: DivisorData, label: str, beta: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(div.a[label], beta)), Fraction(0))


def split_integral_rays(
    div: DivisorData, beta: Sequence[Fraction]
) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Split the rays by integrality of sum_k a[ray][k] * beta_k.

    Args:
        div: Divisor data
        beta: Head parameters beta_1..beta_r

    Returns:
        (I, J) as tuples of ray labels
    """
    integral = tuple(
        label
        for label in RAYS.labels
        if _ray_pairing(div, label, beta).denominator == 1
    )
    complement = tuple(label for label in RAYS.labels if label not in integral)
    return integral, complement


def monodromy_profile(
    sys: GkzSystem,
    div: DivisorData,
    I: Sequence[str],
    J: Sequence[str],
) -> ExponentProfile:
    """
    Monodromy exponents at all punctures for generic sections.

    Zeros are assumed simple, distinct across blocks and away from the rays.

    Args:
        sys: GKZ datum with n = 1
        div: Divisor data of sys
        I: Integral rays
        J: Non-integral rays

    Returns:
        ExponentProfile whose exponents sum to zero
    """
    punctures = [
        Puncture(kind="zero", exponent=beta_k, multiplicity=length, block=k)
        for k, (beta_k, length) in enumerate(zip(sys.beta_head, div.lengths))
    ]
    for label in RAYS.labels:
        pairing = _ray_pairing(div, label, sys.beta_head)
        punctures.append(
            Puncture(kind="ray", exponent=-pairing, ray=label, chart_exponent=pairing)
        )
    profile = ExponentProfile(
        punctures=tuple(punctures), integral=tuple(I), complement=tuple(J)
    )
    logger.debug(f"Exponent profile total: {profile.total_exponent}")
    return profile


def les_dimensions(profile: ExponentProfile) -> LesTable:
    """
    Homology dimensions of the pair (U_b, U_b cap D_I) for a generic section.

    Args:
        profile: Exponent profile

    Returns:
        LesTable with h1_rel = N - 2 + |I|, N the number of punctures of U_b

    Raises:
        TrivialLocalSystem: If every puncture of U_b has integral exponent
        TooFewPunctures: If U_b has fewer than two punctures
    """
    open_punctures = profile.open_punctures()
    if all(p.exponent.denominator == 1 for p in open_punctures):
        raise TrivialLocalSystem("no puncture carries a non-integral exponent")
    N = sum(p.multiplicity for p in open_punctures)
    if N < 2:
        raise TooFewPunctures(f"only {N} puncture(s) on the sphere")
    h1_U = N - 2
    h0_int = len(profile.integral)
    return LesTable(
        h1_int=0, h1_U=h1_U, h1_rel=h1_U + h0_int, h0_int=h0_int, h0_U=0, h0_rel=0
    )


def lifted_rays(sys: GkzSystem, div: DivisorData) -> List[IntVector]:
    """Rays lifted to the total space: (rho, a[rho][1], ..., a[rho][r])."""
    return [RAYS.ray(label) + tuple(div.a[label]) for label in RAYS.labels]


def toric_curve_report(sys: GkzSystem) -> ToricCurveReport:
    """
    Assemble divisor data, exponents, LES table and rank for an n = 1 datum.

    Args:
        sys: GKZ datum

    Returns:
        ToricCurveReport

    Raises:
        UnsupportedDimension, ConstantBlock, TrivialLocalSystem, TooFewPunctures
    """
    div = divisor_coefficients(sys)
    I, J = split_integral_rays(div, sys.beta_head)
    profile = monodromy_profile(sys, div, I, J)
    les = les_dimensions(profile)
    return ToricCurveReport(
        divisors=div,
        profile=profile,
        les=les,
        rank=les.h1_rel,
        lifted=tuple(lifted_rays(sys, div)),
    )


def solution_rank(sys: GkzSystem) -> int:
    """
    Rank of the solution space predicted by the relative homology count.

    Args:
        sys: GKZ datum with n = 1

    Returns:
        h1_rel of the generic LES table (equals sum of lattice lengths)

    Raises:
        HypothesisViolation: If -beta is not interior to the cone of A
    """
    if not check_semi_nonresonant(sys):
        raise HypothesisViolation("-beta is not in the interior of cone(A)")
    return toric_curve_report(sys).rank

"""GKZ datum assembly, hypothesis checks and hypergeometric operators."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.exact_linalg import (
    IntMatrix,
    IntVector,
    RatVector,
    cone_facet_normals,
    cone_interior_contains,
    lattice_index,
    rational_rank,
)
from src.polytope_volume import PointConfiguration, normalized_volume
from src.utils.errors import (
    IntegralBeta,
    LatticeNotSpanned,
    NotFullRank,
    ShapeError,
)
from src.utils.format_utils import format_monomial, format_rational

logger = logging.getLogger(__name__)

WeightBlocks = Tuple[Tuple[IntVector, ...], ...]


@dataclass(frozen=True)
class GkzSystem:
    """A validated GKZ datum: weight blocks, head parameters and matrix A.

    Rows 1..r of ``matrix`` are block indicators, rows r+1..r+n stack the
    weight vectors. Build instances through ``assemble_system``.
    """

    r: int
    n: int
    weight_blocks: WeightBlocks
    beta_head: RatVector
    matrix: IntMatrix = field(compare=False, repr=False)

    @property
    def m(self) -> int:
        return self.matrix.cols

    @property
    def beta(self) -> RatVector:
        """Full parameter vector (beta_1, ..., beta_r, 0, ..., 0)."""
        return self.beta_head + (Fraction(0),) * self.n

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(block) for block in self.weight_blocks)

    def block_of_column(self) -> List[int]:
        """Block index (0-based) of every column of A."""
        return [k for k, size in enumerate(self.block_sizes) for _ in range(size)]

    def columns(self) -> List[IntVector]:
        return self.matrix.columns()


@dataclass(frozen=True)
class BoxOperator:
    """Box operator D^nu_plus - D^nu_minus."""

    nu_plus: IntVector
    nu_minus: IntVector

    @property
    def degree(self) -> int:
        return sum(self.nu_plus)


@dataclass(frozen=True)
class EulerOperator:
    """Euler operator sum_j a_ij x_j D_j - beta_i (row_index is 1-based)."""

    row_index: int
    coefficients: IntVector
    beta_i: Fraction


def assemble_system(
    r: int,
    n: int,
    weight_blocks: Sequence[Sequence[Sequence[int]]],
    beta_head: Sequence[Union[int, Fraction]],
) -> GkzSystem:
    """
    Assemble and validate a GKZ datum.

    Args:
        r: Number of weight blocks (line bundle factors)
        n: Torus dimension
        weight_blocks: r blocks, each a list of length-n integer weight vectors
        beta_head: r rational head parameters

    Returns:
        Validated GkzSystem

    Raises:
        ShapeError: If block count, vector lengths or beta length are wrong
        IntegralBeta: If some beta_k is an integer
        NotFullRank: If A does not have rank r + n
        LatticeNotSpanned: If the columns of A do not generate Z^(r+n)
    """
    if r < 1 or n < 1:
        raise ShapeError(f"r and n must be positive (got r={r}, n={n})")
    if len(weight_blocks) != r:
        raise ShapeError(f"expected {r} weight blocks, got {len(weight_blocks)}")
    if len(beta_head) != r:
        raise ShapeError(f"expected {r} beta entries, got {len(beta_head)}")

    blocks = []
    for k, block in enumerate(weight_blocks):
        if len(block) == 0:
            raise ShapeError(f"weight block {k} is empty")
        vectors = []
        for j, w in enumerate(block):
            if len(w) != n:
                raise ShapeError(
                    f"weight vector {j} of block {k} has length {len(w)}, expected {n}"
                )
            vectors.append(tuple(int(v) for v in w))
        blocks.append(tuple(vectors))

    beta = tuple(Fraction(b) for b in beta_head)
    for k, b in enumerate(beta):
        if b.denominator == 1:
            raise IntegralBeta(f"beta_{k + 1} = {format_rational(b)} is an integer")

    columns = [
        tuple(int(i == k) for i in range(r)) + w
        for k, block in enumerate(blocks)
        for w in block
    ]
    matrix = IntMatrix.from_columns(columns)

    rank = rational_rank(matrix)
    if rank != r + n:
        raise NotFullRank(f"A has rank {rank}, expected {r + n}")
    index = lattice_index(matrix)
    if index != 1:
        raise LatticeNotSpanned(f"columns of A span a sublattice of index {index}")

    logger.debug(f"Assembled {r + n}x{matrix.cols} GKZ matrix")
    return GkzSystem(
        r=r, n=n, weight_blocks=tuple(blocks), beta_head=beta, matrix=matrix
    )


def cyclic_cover_system(weights: Sequence[Sequence[int]], k: int) -> GkzSystem:
    """
    Datum governing periods of k-fold cyclic covers branched along a section.

    Args:
        weights: Exponent vectors of the section
        k: Covering degree (>= 2)

    Returns:
        GkzSystem with r = 1 and beta_1 = 1/k - 1
    """
    if k < 2:
        raise ShapeError(f"covering degree must be at least 2, got {k}")
    if not weights:
        raise ShapeError("section has no monomials")
    n = len(weights[0])
    return assemble_system(1, n, [weights], [Fraction(1, k) - 1])


def check_semi_nonresonant(sys: GkzSystem) -> bool:
    """Whether -beta lies in the interior of the cone spanned by the columns of A."""
    return cone_interior_contains(sys.columns(), tuple(-b for b in sys.beta))


def check_nonresonant(sys: GkzSystem) -> bool:
    """Classical non-resonance: <n, beta> is non-integral for every facet normal n."""
    beta = sys.beta
    for normal in cone_facet_normals(sys.columns()):
        value = sum((a * b for a, b in zip(normal, beta)), Fraction(0))
        if value.denominator == 1:
            return False
    return True


def euler_operators(sys: GkzSystem) -> List[EulerOperator]:
    """One Euler operator per row of A."""
    beta = sys.beta
    return [
        EulerOperator(row_index=i + 1, coefficients=sys.matrix.row(i), beta_i=beta[i])
        for i in range(sys.matrix.rows)
    ]


def default_degree_bound(sys: GkzSystem) -> int:
    """Twice the largest column 1-norm of A."""
    return 2 * max(sum(abs(v) for v in col) for col in sys.columns())


def _exponent_vectors(m: int, bound: int) -> List[IntVector]:
    """All nonnegative integer vectors of length m with entry sum in 1..bound."""
    vectors = []
    for degree in range(1, bound + 1):
        for combo in combinations_with_replacement(range(m), degree):
            nu = [0] * m
            for j in combo:
                nu[j] += 1
            vectors.append(tuple(nu))
    return vectors


def box_operators(
    sys: GkzSystem, degree_bound: Optional[int] = None
) -> List[BoxOperator]:
    """
    Enumerate box operators of degree at most degree_bound.

    Every kernel vector nu of A with |nu_plus| <= degree_bound is split into
    disjointly supported positive and negative parts. The pair is stored with
    the lexicographically larger part as nu_plus.

    Args:
        sys: Validated GKZ datum
        degree_bound: Maximal degree (default: default_degree_bound)

    Returns:
        Sorted list of BoxOperator (empty for degree_bound 0)
    """
    bound = default_degree_bound(sys) if degree_bound is None else degree_bound
    if bound < 1:
        return []

    fibers: Dict[tuple, List[IntVector]] = defaultdict(list)
    for nu in _exponent_vectors(sys.m, bound):
        fibers[sys.matrix.apply(nu)].append(nu)

    found = set()
    for vectors in fibers.values():
        for i, u in enumerate(vectors):
            for v in vectors[i + 1 :]:
                if any(a and b for a, b in zip(u, v)):
                    continue
                plus, minus = (u, v) if u > v else (v, u)
                found.add(BoxOperator(nu_plus=plus, nu_minus=minus))

    operators = sorted(found, key=lambda op: (op.nu_plus, op.nu_minus))
    logger.debug(f"Found {len(operators)} box operators up to degree {bound}")
    return operators


def _render_monomial(nu: Sequence[int]) -> str:
    factors = [format_monomial(j + 1, p) for j, p in enumerate(nu) if p > 0]
    return "*".join(factors) if factors else "1"


def render_box(op: BoxOperator) -> str:
    """Canonical text form, e.g. "D1^2 - D2*D3"."""
    return f"{_render_monomial(op.nu_plus)} - {_render_monomial(op.nu_minus)}"


def render_euler(op: EulerOperator) -> str:
    """Canonical text form, e.g. "1*x1*D1 + 1*x2*D2 - (-1/2)"."""
    text = ""
    for j, a in enumerate(op.coefficients):
        if a == 0:
            continue
        term = f"{abs(a)}*x{j + 1}*D{j + 1}"
        if not text:
            text = term if a > 0 else f"-{term}"
        else:
            text += f" + {term}" if a > 0 else f" - {term}"
    return f"{text or '0'} - ({format_rational(op.beta_i)})"


def system_report(sys: GkzSystem, degree_bound: Optional[int] = None) -> Dict:
    """
    Summarize validation flags, operator counts and the normalized volume.

    Args:
        sys: Validated GKZ datum
        degree_bound: Box operator degree bound (default: default_degree_bound)

    Returns:
        Dictionary with a fixed key order
    """
    bound = default_degree_bound(sys) if degree_bound is None else degree_bound
    config = PointConfiguration.from_columns(sys.columns())
    return {
        "valid": True,
        "r": sys.r,
        "n": sys.n,
        "m": sys.m,
        "hypothesis": check_semi_nonresonant(sys),
        "nonresonant": check_nonresonant(sys),
        "euler_operators": len(euler_operators(sys)),
        "box_operators": len(box_operators(sys, bound)),
        "degree_bound": bound,
        "volume": normalized_volume(config),
    }

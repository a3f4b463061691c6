"""Normalized lattice volume of point configurations via placing triangulations."""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from src.exact_linalg import IntMatrix, IntVector, rational_rank, smith_normal_form
from src.utils.errors import DegenerateConfiguration, DimensionMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointConfiguration:
    """Finite list of lattice points in Z^dim."""

    dim: int
    points: Tuple[IntVector, ...]

    def __post_init__(self):
        if not self.points:
            raise DegenerateConfiguration("empty point configuration")
        for i, p in enumerate(self.points):
            if len(p) != self.dim:
                raise DimensionMismatch(
                    f"point {i} has length {len(p)}, expected {self.dim}"
                )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "PointConfiguration":
        points = tuple(tuple(int(v) for v in c) for c in columns)
        return cls(dim=len(points[0]) if points else 0, points=points)


@dataclass(frozen=True)
class AffineReduction:
    """Points rewritten in a basis of the affine lattice they span.

    ``basis`` holds the basis vectors in the original coordinates; point i
    equals points[0] + sum_k reduced[i][k] * basis[k].
    """

    points: Tuple[IntVector, ...]
    basis: Tuple[IntVector, ...]
    dim: int


@dataclass
class Triangulation:
    """Simplices as sorted index tuples with their normalized volumes."""

    simplices: List[Tuple[int, ...]]
    volumes: List[int]

    @property
    def total_volume(self) -> int:
        return sum(self.volumes)


def affine_reduce(config: PointConfiguration) -> AffineReduction:
    """
    Express a configuration in a lattice basis of its affine span.

    Differences to the first point form a matrix M; with U * M * V = S the
    reduced coordinates are (U d)_i / s_i and the basis vectors are the
    first rank columns of M * V.

    Args:
        config: Point configuration

    Returns:
        AffineReduction of reduced dimension dim' = affine rank
    """
    origin = config.points[0]
    differences = [
        tuple(a - b for a, b in zip(p, origin)) for p in config.points[1:]
    ]
    if not differences or config.dim == 0 or not any(any(d) for d in differences):
        return AffineReduction(
            points=tuple(() for _ in config.points), basis=(), dim=0
        )

    M = IntMatrix.from_columns(differences)
    snf = smith_normal_form(M)
    rank = snf.rank
    scales = snf.diagonal[:rank]

    reduced = [tuple([0] * rank)]
    for d in differences:
        image = snf.U.apply(d)
        reduced.append(tuple(image[i] // scales[i] for i in range(rank)))
    basis_matrix = M @ snf.V
    basis = tuple(basis_matrix.column(i) for i in range(rank))
    logger.debug(f"Affine reduction: {config.dim} -> {rank} dimensions")
    return AffineReduction(points=tuple(reduced), basis=basis, dim=rank)


def _orientation(vertices: Sequence[IntVector]) -> int:
    """Determinant of the homogenized vertex matrix rows (1, v)."""
    return IntMatrix([(1,) + tuple(v) for v in vertices]).determinant()


def _affine_rank(points: Sequence[IntVector]) -> int:
    if len(points) < 2:
        return 0
    origin = points[0]
    differences = [tuple(a - b for a, b in zip(p, origin)) for p in points[1:]]
    return rational_rank(IntMatrix(differences))


def simplex_volume(vertices: Sequence[Sequence[int]]) -> int:
    """
    Normalized volume of a lattice simplex.

    Args:
        vertices: d + 1 points in Z^d

    Returns:
        |det| of the edge matrix (0 for a degenerate simplex)
    """
    origin = vertices[0]
    edges = [[a - b for a, b in zip(v, origin)] for v in vertices[1:]]
    if len(edges) != len(origin):
        raise DimensionMismatch(
            f"{len(vertices)} vertices do not form a simplex in dimension {len(origin)}"
        )
    return abs(IntMatrix(edges).determinant())


def _boundary_facets(
    simplices: Sequence[Tuple[int, ...]],
) -> Dict[Tuple[int, ...], int]:
    """Facets lying in exactly one simplex, mapped to the opposite vertex."""
    counts: Counter = Counter()
    opposite: Dict[Tuple[int, ...], int] = {}
    for simplex in simplices:
        for v in simplex:
            facet = tuple(i for i in simplex if i != v)
            counts[facet] += 1
            opposite[facet] = v
    return {f: opposite[f] for f, c in counts.items() if c == 1}


def placing_triangulation(points: Sequence[Sequence[int]]) -> Triangulation:
    """
    Incremental placing triangulation in input order.

    The initial simplex is built greedily from points that raise the affine
    rank; every later point is coned over the boundary facets it sees.
    Orientation tests are exact integer determinants.

    Args:
        points: Lattice points affinely spanning Z^d, d >= 1

    Returns:
        Triangulation with per-simplex normalized volumes

    Raises:
        DegenerateConfiguration: If the points do not affinely span Z^d
    """
    pts = [tuple(int(v) for v in p) for p in points]
    if not pts or len(pts[0]) == 0:
        raise DegenerateConfiguration("affine span is a single point")
    d = len(pts[0])
    if _affine_rank(pts) < d:
        raise DegenerateConfiguration(f"points do not affinely span dimension {d}")

    initial = [0]
    for i in range(1, len(pts)):
        if _affine_rank([pts[j] for j in initial] + [pts[i]]) == len(initial):
            initial.append(i)
            if len(initial) == d + 1:
                break
    simplices = [tuple(initial)]

    placed = set(initial)
    for p in range(len(pts)):
        if p in placed:
            continue
        placed.add(p)
        for facet, q in _boundary_facets(simplices).items():
            facet_points = [pts[i] for i in facet]
            side_p = _orientation(facet_points + [pts[p]])
            if side_p == 0:
                continue
            side_q = _orientation(facet_points + [pts[q]])
            if (side_p > 0) != (side_q > 0):
                simplices.append(tuple(sorted(facet + (p,))))

    volumes = [simplex_volume([pts[i] for i in s]) for s in simplices]
    logger.debug(f"Placing triangulation: {len(simplices)} simplices")
    return Triangulation(simplices=simplices, volumes=volumes)


def normalized_volume(config: PointConfiguration) -> int:
    """
    Normalized volume of conv(points) in the affine lattice they span.

    Args:
        config: Point configuration

    Returns:
        Volume normalized so that a unimodular simplex has volume 1

    Raises:
        DegenerateConfiguration: If the configuration is a single point
    """
    reduction = affine_reduce(config)
    if reduction.dim == 0:
        raise DegenerateConfiguration("affine span is a single point")
    return placing_triangulation(reduction.points).total_volume

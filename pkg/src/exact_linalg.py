"""Exact integer and rational linear algebra.

Matrices are numpy arrays of Python integers (``dtype=object``), so every
operation is arbitrary precision and no floating point is involved. The
module provides Smith normal forms, integer kernel lattices, ranks, exact
rational solving and brute-force facet enumeration for small polyhedral
cones.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import DimensionMismatch, NotFullDimensional

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]
RatVector = Tuple[Fraction, ...]


def to_rat_vector(values: Iterable[Union[int, Fraction]]) -> RatVector:
    """Normalize a sequence of integers/fractions to a tuple of Fractions."""
    return tuple(Fraction(v) for v in values)


class IntMatrix:
    """Dense integer matrix with arbitrary-precision entries."""

    def __init__(self, entries: Union[Sequence[Sequence[int]], np.ndarray]):
        """
        Initialize an integer matrix.

        Args:
            entries: Rectangular nested sequence (or 2D array) of integers

        Raises:
            ValueError: If the input is empty, ragged or non-integral
        """
        rows = [list(row) for row in entries]
        if not rows or not rows[0]:
            raise ValueError("IntMatrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValueError("IntMatrix rows must have equal length")
        data = np.empty((len(rows), width), dtype=object)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                if isinstance(value, (bool, float)) or int(value) != value:
                    raise ValueError(f"entry ({i}, {j}) is not an integer: {value!r}")
                data[i, j] = int(value)
        self._data = data

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        """Return the size x size identity matrix."""
        return cls([[int(i == j) for j in range(size)] for i in range(size)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        """Build a matrix whose columns are the given vectors."""
        return cls([list(row) for row in zip(*columns)])

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def data(self) -> np.ndarray:
        """Copy of the underlying object array."""
        return self._data.copy()

    def tolist(self) -> List[List[int]]:
        return [[int(v) for v in row] for row in self._data]

    def row(self, i: int) -> IntVector:
        return tuple(int(v) for v in self._data[i])

    def column(self, j: int) -> IntVector:
        return tuple(int(v) for v in self._data[:, j])

    def columns(self) -> List[IntVector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self._data.T)

    def apply(self, vector: Sequence[Union[int, Fraction]]) -> tuple:
        """
        Multiply the matrix by a column vector.

        Args:
            vector: Integer or rational vector of length cols

        Returns:
            Tuple of length rows (ints stay ints, fractions stay fractions)
        """
        if len(vector) != self.cols:
            raise DimensionMismatch(
                f"vector of length {len(vector)} against {self.cols} columns"
            )
        return tuple(
            sum((self._data[i, j] * vector[j] for j in range(self.cols)), 0)
            for i in range(self.rows)
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return IntMatrix(self._data.dot(other._data))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            (self._data == other._data).all()
        )

    def __hash__(self) -> int:
        return hash((self._data.shape, tuple(self._data.flatten().tolist())))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"

    def determinant(self) -> int:
        """
        Exact determinant by fraction-free (Bareiss) elimination.

        Returns:
            Determinant as a Python int

        Raises:
            DimensionMismatch: If the matrix is not square
        """
        if self.rows != self.cols:
            raise DimensionMismatch(
                f"determinant of non-square {self.rows}x{self.cols}"
            )
        a = self.tolist()
        size = self.rows
        sign = 1
        previous = 1
        for k in range(size - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, size) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, size):
                for j in range(k + 1, size):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
            previous = a[k][k]
        return sign * a[size - 1][size - 1]


@dataclass(frozen=True)
class SnfDecomposition:
    """Smith normal form U * M * V = S with unimodular U and V."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> IntVector:
        size = min(self.S.rows, self.S.cols)
        return tuple(self.S.row(i)[i] for i in range(size))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _pick_pivot(S: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    """Smallest |entry| in S[t:, t:], ties broken by lowest (row, col)."""
    best = None
    for i in range(t, S.shape[0]):
        for j in range(t, S.shape[1]):
            value = S[i, j]
            if value != 0 and (best is None or abs(value) < best[0]):
                best = (abs(value), i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(M: IntMatrix) -> SnfDecomposition:
    """
    Compute the Smith normal form of an integer matrix.

    Pivots are the smallest nonzero entry of the active submatrix; after the
    pivot row and column are cleared, an entry not divisible by the pivot is
    folded into the pivot row and the step repeats, so the diagonal satisfies
    s1 | s2 | ... and the pivot magnitude strictly decreases until it does.

    Args:
        M: Integer matrix

    Returns:
        SnfDecomposition with U * M * V = S, det(U), det(V) in {1, -1}
    """
    S = M.data
    rows, cols = S.shape
    U = IntMatrix.identity(rows).data
    V = IntMatrix.identity(cols).data

    for t in range(min(rows, cols)):
        while True:
            pivot = _pick_pivot(S, t)
            if pivot is None:
                break
            i, j = pivot
            if i != t:
                S[[t, i]] = S[[i, t]]
                U[[t, i]] = U[[i, t]]
            if j != t:
                S[:, [t, j]] = S[:, [j, t]]
                V[:, [t, j]] = V[:, [j, t]]

            clean = True
            for i in range(t + 1, rows):
                if S[i, t] != 0:
                    q = S[i, t] // S[t, t]
                    S[i] = S[i] - q * S[t]
                    U[i] = U[i] - q * U[t]
                    clean = clean and S[i, t] == 0
            for j in range(t + 1, cols):
                if S[t, j] != 0:
                    q = S[t, j] // S[t, t]
                    S[:, j] = S[:, j] - q * S[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                    clean = clean and S[t, j] == 0
            if not clean:
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if S[i, j] % S[t, t] != 0
                ),
                None,
            )
            if offender is None:
                break
            S[t] = S[t] + S[offender]
            U[t] = U[t] + U[offender]

        if S[t, t] < 0:
            S[t] = -S[t]
            U[t] = -U[t]

    diagonal = [S[k, k] for k in range(min(rows, cols))]
    logger.debug(f"SNF of {rows}x{cols} matrix: diagonal {diagonal}")
    return SnfDecomposition(S=IntMatrix(S), U=IntMatrix(U), V=IntMatrix(V))


def integer_kernel_basis(M: IntMatrix) -> List[IntVector]:
    """
    Return a Z-basis of the integer kernel {v : M v = 0}.

    Args:
        M: Integer matrix

    Returns:
        List of cols - rank integer vectors (columns of V beyond the rank)
    """
    snf = smith_normal_form(M)
    return [snf.V.column(j) for j in range(snf.rank, M.cols)]


def rational_rank(M: IntMatrix) -> int:
    """
    Rank over the rationals by fraction-free elimination.

    Args:
        M: Integer matrix

    Returns:
        Rank
    """
    a = M.tolist()
    rows, cols = len(a), len(a[0])
    rank = 0
    previous = 1
    for col in range(cols):
        pivot = next((i for i in range(rank, rows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(rank + 1, rows):
            for j in range(col + 1, cols):
                a[i][j] = (a[i][j] * a[rank][col] - a[i][col] * a[rank][j]) // previous
            a[i][col] = 0
        previous = a[rank][col]
        rank += 1
        if rank == rows:
            break
    return rank


def lattice_index(M: IntMatrix) -> int:
    """Index of the column lattice of M in its saturation."""
    index = 1
    for d in smith_normal_form(M).diagonal:
        if d != 0:
            index *= d
    return index


def solve_rational(
    M: IntMatrix, rhs: Sequence[Union[int, Fraction]]
) -> Optional[RatVector]:
    """
    Find one exact solution of M x = rhs.

    Free variables are set to zero.

    Args:
        M: Integer matrix
        rhs: Rational right-hand side of length M.rows

    Returns:
        Solution vector, or None if the system is inconsistent

    Raises:
        DimensionMismatch: If len(rhs) != M.rows
    """
    if len(rhs) != M.rows:
        raise DimensionMismatch(f"rhs of length {len(rhs)} against {M.rows} rows")
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(M.tolist(), rhs)]
    rows, cols = M.rows, M.cols
    pivots: List[int] = []
    r = 0
    for col in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        lead = a[r][col]
        a[r] = [v / lead for v in a[r]]
        for i in range(rows):
            if i != r and a[i][col] != 0:
                factor = a[i][col]
                a[i] = [v - factor * w for v, w in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    if any(a[i][cols] != 0 for i in range(r, rows)):
        return None
    solution = [Fraction(0)] * cols
    for i, col in enumerate(pivots):
        solution[col] = a[i][cols]
    return tuple(solution)


def primitive(vector: Sequence[int]) -> IntVector:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for v in vector:
        g = gcd(g, int(v))
    if g == 0:
        return tuple(int(v) for v in vector)
    return tuple(int(v) // g for v in vector)


def _dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def cone_facet_normals(generators: Sequence[Sequence[int]]) -> List[IntVector]:
    """
    Enumerate primitive inward facet normals of a full-dimensional cone.

    Brute force over all (dim-1)-subsets of generators: C(m, dim-1) kernel
    computations, intended for m up to about 12 and dim up to about 4.

    Args:
        generators: Integer vectors spanning the ambient space

    Returns:
        Sorted, deduplicated list of primitive normals n with <n, g> >= 0 for all g

    Raises:
        NotFullDimensional: If the generators do not span
    """
    gens = [tuple(int(v) for v in g) for g in generators]
    if not gens:
        raise NotFullDimensional("no generators")
    dim = len(gens[0])
    if rational_rank(IntMatrix.from_columns(gens)) < dim:
        raise NotFullDimensional(f"{len(gens)} generators do not span dimension {dim}")

    if dim == 1:
        signs = {1 if g[0] > 0 else -1 for g in gens if g[0] != 0}
        return [(signs.pop(),)] if len(signs) == 1 else []

    normals = set()
    for subset in combinations(range(len(gens)), dim - 1):
        sub = IntMatrix([gens[k] for k in subset])
        if rational_rank(sub) < dim - 1:
            continue
        (normal,) = integer_kernel_basis(sub)
        normal = primitive(normal)
        values = [_dot(normal, g) for g in gens]
        if all(v >= 0 for v in values):
            normals.add(normal)
        elif all(v <= 0 for v in values):
            normals.add(tuple(-v for v in normal))
    return sorted(normals, reverse=True)


def cone_interior_contains(
    generators: Sequence[Sequence[int]], point: Sequence[Union[int, Fraction]]
) -> bool:
    """
    Test whether a point lies in the open interior of a cone.

    A cone equal to the whole space has no facets and contains every point
    in its interior.

    Args:
        generators: Integer vectors spanning the ambient space
        point: Rational point

    Returns:
        True iff <n, point> > 0 for every inward facet normal n

    Raises:
        NotFullDimensional: If the generators do not span
    """
    normals = cone_facet_normals(generators)
    values = [Fraction(v) for v in point]
    return all(_dot(n, values) > 0 for n in normals)

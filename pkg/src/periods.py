"""Numerical twisted periods for GKZ systems over the projective line.

A period is (1/2 pi i) * integral of prod_k b_k(t)^beta_k dt/t along a cycle,
where b_k(t) = sum_j x_kj t^w_kj. Cycles are circles in the t-chart or in
the u = 1/t chart:

- closed circles (total monodromy trivial), integrated with the periodic
  trapezoid rule;
- anchored loops through a ray point whose exponent is a positive integer
  (relative cycles), integrated with composite Gauss-Legendre panels.

Each log b_k is continued node to node starting from the principal branch
at the first node; a phase step of pi/2 or more raises BranchJump and the
node count is doubled up to a cap.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement
from math import pi
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import psutil

from src.gkz_core import GkzSystem
from src.toric_curve import RHO_0, RHO_INF, solution_rank
from src.utils.errors import (
    BranchJump,
    CycleNotClosed,
    DegenerateCoefficients,
    InsufficientCycles,
    RootFindingDiverged,
    ShapeError,
    UnsupportedDimension,
)
from src.utils.format_utils import format_complex, format_rational

logger = logging.getLogger(__name__)

RESIDUAL_TARGET = 1e-12
MAX_PHASE_STEP = pi / 2
PANEL_NODES = 64
MODULUS_MARGIN = 1e-3
CHARTS = ("t", "u")


@dataclass(frozen=True)
class EvaluationPoint:
    """Complex coefficients x_kj of the sections b_k, with their weights."""

    weights: Tuple[Tuple[int, ...], ...]
    coeffs: Tuple[Tuple[complex, ...], ...]

    def __post_init__(self):
        if len(self.weights) != len(self.coeffs):
            raise ShapeError(
                f"{len(self.coeffs)} coefficient blocks "
                f"for {len(self.weights)} weight blocks"
            )
        for k, (w, x) in enumerate(zip(self.weights, self.coeffs)):
            if len(w) != len(x):
                raise ShapeError(
                    f"block {k + 1} has {len(x)} coefficients, expected {len(w)}"
                )

    @classmethod
    def from_system(
        cls, sys: GkzSystem, coeffs: Sequence[Sequence[complex]]
    ) -> "EvaluationPoint":
        """
        Build an evaluation point for a datum with n = 1.

        Args:
            sys: GKZ datum
            coeffs: Per-block complex coefficients, aligned with the weight blocks

        Returns:
            EvaluationPoint with validated extreme coefficients

        Raises:
            UnsupportedDimension: If sys.n != 1
            ShapeError: If the coefficient shape does not match the blocks
            DegenerateCoefficients: If an extreme coefficient vanishes
        """
        if sys.n != 1:
            raise UnsupportedDimension(f"periods need n = 1, got n = {sys.n}")
        point = cls(
            weights=tuple(tuple(w[0] for w in block) for block in sys.weight_blocks),
            coeffs=tuple(tuple(complex(v) for v in block) for block in coeffs),
        )
        for k in range(point.r):
            point.polynomial(k)
        return point

    @property
    def r(self) -> int:
        return len(self.weights)

    @property
    def flat(self) -> np.ndarray:
        return np.array([v for block in self.coeffs for v in block], dtype=complex)

    @property
    def column_weights(self) -> List[int]:
        return [w for block in self.weights for w in block]

    @property
    def column_blocks(self) -> List[int]:
        return [k for k, block in enumerate(self.weights) for _ in block]

    def with_flat(self, values: Sequence[complex]) -> "EvaluationPoint":
        """Same weights, new flattened coefficients."""
        values = list(values)
        blocks, start = [], 0
        for block in self.weights:
            blocks.append(tuple(complex(v) for v in values[start : start + len(block)]))
            start += len(block)
        return EvaluationPoint(weights=self.weights, coeffs=tuple(blocks))

    def scaled(self, factor: complex) -> "EvaluationPoint":
        return self.with_flat(self.flat * factor)

    def polynomial(self, k: int) -> np.ndarray:
        """
        Ascending coefficients of t^(-min w) * b_k(t).

        Raises:
            DegenerateCoefficients: If the lowest or highest coefficient is zero
        """
        low = min(self.weights[k])
        poly = np.zeros(max(self.weights[k]) - low + 1, dtype=complex)
        for w, x in zip(self.weights[k], self.coeffs[k]):
            poly[w - low] += x
        if poly[0] == 0 or poly[-1] == 0:
            raise DegenerateCoefficients(
                f"extreme coefficient of block {k + 1} is zero"
            )
        return poly

    @cached_property
    def zeros(self) -> Tuple[np.ndarray, ...]:
        zeros = tuple(find_zeros(self, k) for k in range(self.r))
        moduli = sorted(abs(complex(z)) for roots in zeros for z in roots)
        for lo, hi in zip(moduli, moduli[1:]):
            if hi <= lo * (1 + MODULUS_MARGIN) ** 2:
                logger.warning(
                    f"Zero moduli {lo:.6g} and {hi:.6g} coincide within "
                    f"{MODULUS_MARGIN:g}; no gap circle between them"
                )
        return zeros

    def to_dict(self) -> Dict:
        return {"x": [[format_complex(v) for v in block] for block in self.coeffs]}


@dataclass(frozen=True)
class CycleSpec:
    """A circle in the t- or u-chart.

    With ``anchor`` set the circle passes through the chart origin
    (radius == |center|) and is integrated as an open path from it.
    """

    radius: float
    orientation: int = 1
    nodes: int = 4096
    center: complex = 0j
    chart: str = "t"
    anchor: Optional[str] = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.nodes < 256 or self.nodes & (self.nodes - 1):
            raise ValueError(f"nodes must be a power of two >= 256, got {self.nodes}")
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        off_origin = abs(abs(self.center) - self.radius) > 1e-9 * self.radius
        if self.anchor is not None and off_origin:
            raise ValueError("an anchored circle must pass through the chart origin")

    def with_nodes(self, nodes: int) -> "CycleSpec":
        return replace(self, nodes=nodes)

    def reversed(self) -> "CycleSpec":
        return replace(self, orientation=-self.orientation)

    def to_dict(self) -> Dict:
        return {
            "chart": self.chart,
            "center": format_complex(self.center),
            "radius": float(self.radius),
            "orientation": self.orientation,
            "nodes": self.nodes,
            "anchor": self.anchor,
        }


@dataclass(frozen=True)
class Singularity:
    """Branch point of the integrand in a chart; block is None at the chart origin."""

    position: complex
    exponent: Fraction
    block: Optional[int] = None


@dataclass(frozen=True)
class CycleCandidate:
    cycle: CycleSpec
    enclosed_exponent: Fraction
    closed: bool

    @property
    def usable(self) -> bool:
        return self.closed or self.cycle.anchor is not None


@dataclass(frozen=True)
class PeriodValue:
    value: complex
    enclosed_exponent: Fraction
    closed: bool
    nodes: int
    anchored: bool = False
    windings: Tuple[int, ...] = ()

    def to_dict(self) -> Dict:
        return {
            "value": format_complex(self.value),
            "enclosed_exponent": format_rational(self.enclosed_exponent),
            "closed": self.closed,
            "anchored": self.anchored,
            "nodes": self.nodes,
            "windings": list(self.windings),
        }


@dataclass
class _PathSample:
    """Nodes of one path with continued logarithms of every b_k."""

    z: np.ndarray
    dz: np.ndarray
    weights: np.ndarray
    logs: np.ndarray
    sign: int
    nodes: int
    windings: Tuple[int, ...] = field(default=())


# Root finding


def find_zeros(point: EvaluationPoint, k: int, max_iter: int = 500) -> np.ndarray:
    """
    Zeros of b_k in the torus by Aberth-Ehrlich simultaneous iteration.

    Args:
        point: Evaluation point
        k: Block index (0-based)
        max_iter: Iteration cap

    Returns:
        Array of len_k nonzero complex roots

    Raises:
        DegenerateCoefficients: If an extreme coefficient is zero
        RootFindingDiverged: If the relative residual stays above 1e-12
    """
    ascending = point.polynomial(k)
    coeffs = ascending[::-1]
    degree = len(coeffs) - 1
    if degree == 0:
        return np.zeros(0, dtype=complex)
    if degree == 1:
        roots = np.array([-coeffs[1] / coeffs[0]])
    else:
        deriv = np.polyder(coeffs)
        # Cauchy bound for the initial circle
        radius = 1.0 + np.max(np.abs(coeffs[1:] / coeffs[0]))
        angles = 2 * pi * np.arange(degree) / degree + 0.4
        roots = radius * np.exp(1j * angles)
        for _ in range(max_iter):
            p = np.polyval(coeffs, roots)
            dp = np.polyval(deriv, roots)
            diff = roots[:, None] - roots[None, :]
            np.fill_diagonal(diff, np.inf)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = p / dp
                delta = ratio / (1.0 - ratio * np.sum(1.0 / diff, axis=1))
            delta = np.where(np.isfinite(delta), delta, 0.0)
            roots = roots - delta
            if np.all(np.abs(delta) <= 1e-14 * np.maximum(1.0, np.abs(roots))):
                break

    powers = np.abs(roots)[:, None] ** np.arange(degree, -1, -1)[None, :]
    scale = powers @ np.abs(coeffs)
    residual = np.abs(np.polyval(coeffs, roots)) / scale
    if not np.all(residual < RESIDUAL_TARGET):
        raise RootFindingDiverged(
            f"block {k + 1}: relative residual {residual.max():.2e} "
            f"after {max_iter} iterations"
        )
    logger.debug(f"Block {k + 1}: {degree} zeros, max residual {residual.max():.1e}")
    return roots


def chart_singularities(
    point: EvaluationPoint, beta: Sequence[Fraction], chart: str = "t"
) -> List[Singularity]:
    """
    Branch points of the integrand in a chart.

    The chart origin comes first: t = 0 carries sum_k beta_k min w_k and
    u = 0 carries -sum_k beta_k max w_k. Zeros of b_k carry beta_k.
    """
    beta = [Fraction(b) for b in beta]
    if chart == "t":
        origin = sum((b * min(w) for b, w in zip(beta, point.weights)), Fraction(0))
    else:
        origin = -sum((b * max(w) for b, w in zip(beta, point.weights)), Fraction(0))
    singularities = [Singularity(position=0j, exponent=origin)]
    for k, roots in enumerate(point.zeros):
        for root in roots:
            position = complex(root) if chart == "t" else 1.0 / complex(root)
            singularities.append(
                Singularity(position=position, exponent=beta[k], block=k)
            )
    return singularities


def _enclosed_exponent(
    singularities: Sequence[Singularity], cycle: CycleSpec
) -> Fraction:
    total = Fraction(0)
    for s in singularities:
        if cycle.anchor is not None and s.block is None:
            continue
        if abs(s.position - cycle.center) < cycle.radius:
            total += s.exponent
    return total


def annotate_cycle(
    point: EvaluationPoint, beta: Sequence[Fraction], cycle: CycleSpec
) -> CycleCandidate:
    """Attach the enclosed exponent and closedness to a cycle."""
    exponent = _enclosed_exponent(chart_singularities(point, beta, cycle.chart), cycle)
    return CycleCandidate(
        cycle=cycle,
        enclosed_exponent=exponent,
        closed=cycle.anchor is None and exponent.denominator == 1,
    )


# Cycle inventory


def admissible_circles(
    point: EvaluationPoint, beta: Sequence[Fraction], nodes: int = 4096
) -> List[CycleCandidate]:
    """
    Origin-centred t-chart circles, one per gap between zero moduli.

    Radii are min/2, the geometric mean of each pair of neighbouring moduli
    and 2 * max; gaps narrower than a relative margin of 1e-3 are skipped.

    Args:
        point: Evaluation point
        beta: Head parameters
        nodes: Quadrature node count for the returned cycles

    Returns:
        Candidates annotated with enclosed exponent and closed flag
    """
    moduli = sorted(abs(complex(z)) for roots in point.zeros for z in roots)
    if not moduli:
        return [annotate_cycle(point, beta, CycleSpec(radius=1.0, nodes=nodes))]
    radii = [moduli[0] / 2]
    for lo, hi in zip(moduli, moduli[1:]):
        if hi > lo * (1 + MODULUS_MARGIN) ** 2:
            radii.append(float(np.sqrt(lo * hi)))
    radii.append(moduli[-1] * 2)
    return [
        annotate_cycle(point, beta, CycleSpec(radius=radius, nodes=nodes))
        for radius in radii
    ]


def cluster_circles(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    nodes: int = 4096,
    max_size: int = 3,
    margin: float = 0.1,
) -> List[CycleCandidate]:
    """
    Closed t-chart circles around small clusters of singularities.

    Each subset of at most max_size singularities (the origin included) is
    circled about its centroid when a radius separates it from every other
    singularity by the relative margin; only closed circles are kept.
    """
    singularities = chart_singularities(point, beta, "t")
    positions = np.array([s.position for s in singularities])
    found = []
    for size in range(1, max_size + 1):
        for subset in combinations(range(len(singularities)), size):
            exponent = sum((singularities[i].exponent for i in subset), Fraction(0))
            if exponent.denominator != 1:
                continue
            center = complex(np.mean(positions[list(subset)]))
            distances = np.abs(positions - center)
            inside = max(distances[i] for i in subset)
            outside = [
                distances[i] for i in range(len(singularities)) if i not in subset
            ]
            if not outside:
                continue
            nearest = min(outside)
            if nearest <= inside * (1 + margin) ** 2:
                continue
            radius = float(np.sqrt(inside * nearest)) if inside > 0 else nearest / 2
            cycle = CycleSpec(radius=radius, center=center, nodes=nodes)
            found.append(
                CycleCandidate(cycle=cycle, enclosed_exponent=exponent, closed=True)
            )
    logger.debug(f"{len(found)} closed cluster circles")
    return found


def _anchored_circle(
    target: Singularity,
    others: Sequence[Singularity],
    chart: str,
    anchor: str,
    nodes: int,
    margin: float,
) -> Optional[CycleSpec]:
    for scale in (1.0, 0.8, 0.65):
        for angle in (0.0, pi / 8, -pi / 8, pi / 4, -pi / 4):
            center = target.position * scale * np.exp(1j * angle)
            radius = abs(center)
            if abs(target.position - center) > radius / (1 + margin):
                continue
            if all(abs(s.position - center) >= radius * (1 + margin) for s in others):
                return CycleSpec(
                    radius=radius,
                    center=complex(center),
                    chart=chart,
                    anchor=anchor,
                    nodes=nodes,
                )
    return None


def anchored_loops(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    nodes: int = 4096,
    margin: float = 0.1,
) -> List[CycleCandidate]:
    """
    Relative cycles: loops from an integral ray point around one zero and back.

    A loop is built at t = 0 (rho_0) or u = 0 (rho_inf) when the exponent there
    is an integer; under the cone hypothesis it is then positive, so the
    integrand is analytic at the anchor.
    """
    loops = []
    for chart, anchor in (("t", RHO_0), ("u", RHO_INF)):
        singularities = chart_singularities(point, beta, chart)
        if singularities[0].exponent.denominator != 1:
            continue
        zeros = singularities[1:]
        for i, target in enumerate(zeros):
            others = zeros[:i] + zeros[i + 1 :]
            cycle = _anchored_circle(target, others, chart, anchor, nodes, margin)
            if cycle is None:
                logger.warning(
                    f"No separated loop from {anchor} around zero {target.position:.4g}"
                )
                continue
            loops.append(
                CycleCandidate(
                    cycle=cycle, enclosed_exponent=target.exponent, closed=False
                )
            )
    return loops


def cycle_inventory(
    point: EvaluationPoint, beta: Sequence[Fraction], nodes: int = 4096
) -> List[CycleSpec]:
    """Usable cycles: closed gap circles, closed cluster circles and anchored loops."""
    candidates = (
        admissible_circles(point, beta, nodes)
        + cluster_circles(point, beta, nodes)
        + anchored_loops(point, beta, nodes)
    )
    cycles = [c.cycle for c in candidates if c.usable]
    logger.debug(
        f"Cycle inventory: {len(cycles)} of {len(candidates)} candidates usable"
    )
    return cycles


# Quadrature


@lru_cache(maxsize=None)
def _legendre_panel() -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(PANEL_NODES)


def _path_nodes(cycle: CycleSpec, nodes: int):
    """Nodes z, derivatives dz/dphi and weights in phi; circles get one closing node."""
    sigma = cycle.orientation
    if cycle.anchor is None:
        phi = 2 * pi * np.arange(nodes + 1) / nodes
        z = cycle.center + cycle.radius * np.exp(1j * sigma * phi)
        dz = 1j * sigma * (z[:nodes] - cycle.center)
        weights = np.full(nodes, 2 * pi / nodes)
        return z, dz, weights
    x, w = _legendre_panel()
    panels = max(1, nodes // PANEL_NODES)
    edges = np.linspace(0.0, 2 * pi, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    phi = (half[:, None] * x[None, :] + mid[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    rotation = np.exp(1j * sigma * phi)
    z = cycle.center * (1 - rotation)
    dz = -1j * sigma * cycle.center * rotation
    return z, dz, weights


def _sample_path(point: EvaluationPoint, cycle: CycleSpec, nodes: int) -> _PathSample:
    z, dz, weights = _path_nodes(cycle, nodes)
    sign = 1 if cycle.chart == "t" else -1
    values = np.array(
        [
            sum(x * z ** (sign * w) for w, x in zip(ws, xs))
            for ws, xs in zip(point.weights, point.coeffs)
        ]
    )
    phase = np.unwrap(np.angle(values), axis=1)
    steps = np.abs(np.diff(phase, axis=1))
    if steps.size and steps.max() >= MAX_PHASE_STEP:
        raise BranchJump(f"phase step {steps.max():.3f} at {nodes} nodes")
    logs = np.log(np.abs(values)) + 1j * phase

    count = len(weights)
    windings: Tuple[int, ...] = ()
    if cycle.anchor is None:
        windings = tuple(int(round((p[count] - p[0]) / (2 * pi))) for p in phase)
    return _PathSample(
        z=z[:count],
        dz=dz,
        weights=weights,
        logs=logs[:, :count],
        sign=sign,
        nodes=nodes,
        windings=windings,
    )


def _sample_with_refinement(
    point: EvaluationPoint, cycle: CycleSpec, max_nodes: int
) -> _PathSample:
    nodes = cycle.nodes
    while True:
        try:
            return _sample_path(point, cycle, nodes)
        except BranchJump as e:
            if nodes * 2 > max_nodes:
                raise BranchJump(f"{e}; node cap {max_nodes} reached") from e
            logger.warning(f"{e}; refining to {nodes * 2} nodes")
            nodes *= 2


def falling_factorial(beta: Fraction, order: int) -> Fraction:
    value = Fraction(1)
    for i in range(order):
        value *= Fraction(beta) - i
    return value


def _integrate(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    sample: _PathSample,
    alpha: Sequence[int],
) -> complex:
    """(1/2 pi i) * sum of weights times the alpha-derivative of the integrand."""
    blocks = point.column_blocks
    masses = [0] * point.r
    for j, a in enumerate(alpha):
        masses[blocks[j]] += a
    power = sum(a * w for a, w in zip(alpha, point.column_weights))

    coefficient = 1.0
    exponent = np.zeros(sample.z.shape, dtype=complex)
    for k, (b, mu) in enumerate(zip(beta, masses)):
        coefficient *= float(falling_factorial(b, mu))
        exponent += float(Fraction(b) - mu) * sample.logs[k]
    integrand = (
        coefficient
        * np.exp(exponent)
        * sample.z ** (sample.sign * power)
        * sample.sign
        * sample.dz
        / sample.z
    )
    return complex(np.sum(sample.weights * integrand) / (2j * pi))


def derivative_period(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    cycle: CycleSpec,
    alpha: Sequence[int],
    max_nodes: int = 1 << 16,
) -> complex:
    """
    Period of the alpha-th x-derivative of the integrand.

    The integrand is prod_k falling(beta_k, mu_k) b_k^(beta_k - mu_k) t^(alpha . w),
    mu_k the alpha-mass on block k.

    Args:
        point: Evaluation point
        beta: Head parameters
        cycle: Cycle to integrate over
        alpha: Nonnegative multi-index over all columns
        max_nodes: Refinement cap

    Returns:
        Complex period value

    Raises:
        BranchJump: If continuation fails at max_nodes
    """
    if len(alpha) != len(point.column_weights):
        raise ShapeError(
            f"multi-index of length {len(alpha)} "
            f"for {len(point.column_weights)} columns"
        )
    sample = _sample_with_refinement(point, cycle, max_nodes)
    return _integrate(point, beta, sample, alpha)


def twisted_period(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    cycle: CycleSpec,
    max_nodes: int = 1 << 16,
) -> PeriodValue:
    """
    Branch-tracked quadrature of (1/2 pi i) * integral of prod b_k^beta_k dt/t.

    Open (non-closed, unanchored) circles are integrated too and flagged.

    Args:
        point: Evaluation point
        beta: Head parameters
        cycle: Cycle to integrate over
        max_nodes: Refinement cap

    Returns:
        PeriodValue with value, enclosed exponent and closedness
    """
    candidate = annotate_cycle(point, beta, cycle)
    sample = _sample_with_refinement(point, cycle, max_nodes)
    value = _integrate(point, beta, sample, [0] * len(point.column_weights))
    return PeriodValue(
        value=value,
        enclosed_exponent=candidate.enclosed_exponent,
        closed=candidate.closed,
        nodes=sample.nodes,
        anchored=cycle.anchor is not None,
        windings=sample.windings,
    )


def euler_residual(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    cycle: CycleSpec,
    sys: GkzSystem,
    max_nodes: int = 1 << 16,
) -> List[float]:
    """
    Residuals |sum_j a_ij x_j d_j Phi - beta_i Phi| of the Euler operators.

    Args:
        point: Evaluation point
        beta: Head parameters
        cycle: Closed or anchored cycle
        sys: GKZ datum supplying the rows of A
        max_nodes: Refinement cap

    Returns:
        One residual magnitude per row of A

    Raises:
        CycleNotClosed: If the cycle is neither closed nor anchored
    """
    candidate = annotate_cycle(point, beta, cycle)
    if not candidate.usable:
        raise CycleNotClosed(
            f"enclosed exponent {format_rational(candidate.enclosed_exponent)} "
            "is not integral"
        )
    m = len(point.column_weights)
    sample = _sample_with_refinement(point, cycle, max_nodes)
    phi = _integrate(point, beta, sample, [0] * m)
    gradient = [
        _integrate(point, beta, sample, [int(i == j) for i in range(m)])
        for j in range(m)
    ]
    x = point.flat
    full_beta = sys.beta
    residuals = []
    for i in range(sys.matrix.rows):
        row = sys.matrix.row(i)
        total = sum(row[j] * x[j] * gradient[j] for j in range(m))
        residuals.append(float(abs(total - float(full_beta[i]) * phi)))
    return residuals


# Period matrix


def multi_indices(m: int, max_order: int) -> List[Tuple[int, ...]]:
    """All alpha in N^m with |alpha| <= max_order, by degree then column order."""
    indices = []
    for degree in range(max_order + 1):
        for combo in combinations_with_replacement(range(m), degree):
            alpha = [0] * m
            for j in combo:
                alpha[j] += 1
            indices.append(tuple(alpha))
    return indices


@dataclass(frozen=True)
class PeriodJob:
    """Derivative periods of one cycle for a list of multi-indices."""

    point: EvaluationPoint
    beta: Tuple[Fraction, ...]
    cycle: CycleSpec
    alphas: Tuple[Tuple[int, ...], ...]
    max_nodes: int = 1 << 16

    def run(self) -> np.ndarray:
        sample = _sample_with_refinement(self.point, self.cycle, self.max_nodes)
        return np.array(
            [_integrate(self.point, self.beta, sample, alpha) for alpha in self.alphas],
            dtype=complex,
        )


def worker_count(workers: Optional[int] = None) -> int:
    """Thread pool size: explicit value or the number of physical cores."""
    if workers:
        return workers
    return psutil.cpu_count(logical=False) or 1


def period_matrix(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    cycles: Sequence[CycleSpec],
    max_order: int = 2,
    max_nodes: int = 1 << 16,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Matrix M[cycle, alpha] of derivative periods, |alpha| <= max_order.

    Cycles are integrated on a thread pool; rows are placed by cycle index.
    """
    point.zeros  # computed once before the pool starts
    alphas = tuple(multi_indices(len(point.column_weights), max_order))
    jobs = [
        PeriodJob(
            point=point,
            beta=tuple(Fraction(b) for b in beta),
            cycle=cycle,
            alphas=alphas,
            max_nodes=max_nodes,
        )
        for cycle in cycles
    ]
    if not jobs:
        return np.zeros((0, len(alphas)), dtype=complex)
    with ThreadPoolExecutor(max_workers=worker_count(workers)) as pool:
        rows = list(pool.map(PeriodJob.run, jobs))
    return np.vstack(rows)


def numerical_rank(matrix: np.ndarray, tol: float) -> int:
    """
    Rank by Gaussian elimination with full pivoting and a relative threshold.

    Rows and columns whose max-norm is at most tol times the global max-norm
    are zeroed; the rest are scaled to unit max-norm (columns, then rows) and
    elimination stops at the first pivot not exceeding tol.
    """
    a = np.array(matrix, dtype=complex)
    if a.size == 0:
        return 0
    magnitude = np.abs(a)
    largest = magnitude.max()
    if not largest > 0:
        return 0
    negligible = tol * largest
    a[magnitude.max(axis=1) <= negligible, :] = 0
    a[:, magnitude.max(axis=0) <= negligible] = 0
    for axis in (0, 1):
        scale = np.max(np.abs(a), axis=axis, keepdims=True)
        a = np.divide(a, scale, out=np.zeros_like(a), where=scale > 0)
    rows, cols = a.shape
    rank = 0
    for k in range(min(rows, cols)):
        block = np.abs(a[k:, k:])
        i, j = np.unravel_index(np.argmax(block), block.shape)
        if not block[i, j] > tol:
            break
        a[[k, k + i]] = a[[k + i, k]]
        a[:, [k, k + j]] = a[:, [k + j, k]]
        a[k + 1 :, k:] -= np.outer(a[k + 1 :, k] / a[k, k], a[k, k:])
        rank += 1
    return rank


def period_matrix_rank(
    point: EvaluationPoint,
    beta: Sequence[Fraction],
    sys: GkzSystem,
    cycles: Optional[Sequence[CycleSpec]] = None,
    max_order: int = 2,
    tol: float = 1e-6,
    nodes: int = 4096,
    max_nodes: int = 1 << 16,
    workers: Optional[int] = None,
) -> int:
    """
    Numerical rank of the period matrix over usable cycles.

    Args:
        point: Evaluation point
        beta: Head parameters
        sys: GKZ datum (supplies the predicted rank)
        cycles: Cycles to use (default: cycle_inventory)
        max_order: Largest derivative order
        tol: Relative pivot threshold
        nodes: Node count for inventory cycles
        max_nodes: Refinement cap
        workers: Thread pool size

    Returns:
        Numerical rank

    Raises:
        InsufficientCycles: If fewer usable cycles than the predicted rank
    """
    if cycles is None:
        cycles = cycle_inventory(point, beta, nodes)
    usable = [c for c in cycles if annotate_cycle(point, beta, c).usable]
    predicted = solution_rank(sys)
    if len(usable) < predicted:
        raise InsufficientCycles(
            f"{len(usable)} usable cycles for predicted rank {predicted}"
        )
    matrix = period_matrix(point, beta, usable, max_order, max_nodes, workers)
    rank = numerical_rank(matrix, tol)
    logger.debug(f"Period matrix {matrix.shape}: rank {rank} (predicted {predicted})")
    return rank


def generic_point(sys: GkzSystem, seed: int = 0) -> EvaluationPoint:
    """Reproducible evaluation point with standard complex normal coefficients."""
    rng = np.random.default_rng(seed)
    coeffs = [
        rng.standard_normal(len(block)) + 1j * rng.standard_normal(len(block))
        for block in sys.weight_blocks
    ]
    return EvaluationPoint.from_system(sys, coeffs)

"""Report sections, validation checks and their rendering."""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.gkz_core import (
    GkzSystem,
    box_operators,
    check_nonresonant,
    check_semi_nonresonant,
    default_degree_bound,
    euler_operators,
    render_box,
    render_euler,
    system_report,
)
from src.periods import (
    EvaluationPoint,
    cycle_inventory,
    euler_residual,
    generic_point,
    period_matrix_rank,
    twisted_period,
)
from src.polytope_volume import PointConfiguration, normalized_volume
from src.toric_curve import solution_rank, toric_curve_report
from src.twist_cokernel import (
    ONE,
    QuotientElement,
    TwistContext,
    apply_twisted_derivation,
    connection_residue,
    functional_L,
    solve_preimage_trace,
)
from src.utils.config import SCHEMA_VERSION, RunSettings
from src.utils.errors import GkzError
from src.utils.format_utils import format_complex, format_rational

logger = logging.getLogger(__name__)
console = Console(stderr=True)


class CheckResult:
    """Container for check result."""

    def __init__(
        self, name: str, status: str, message: str, recommendation: Optional[str] = None
    ):
        """
        Initialize check result.

        Args:
            name: Check name
            status: Status (pass, fail, warning)
            message: Status message
            recommendation: Optional recommendation
        """
        self.name = name
        self.status = status  # 'pass', 'fail', 'warning'
        self.message = message
        self.recommendation = recommendation

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "status": self.status,
            "message": self.message,
            "recommendation": self.recommendation,
        }


def run_checks(sys: GkzSystem) -> List[CheckResult]:
    """
    Check the standing assumptions of an assembled datum.

    Shape, rank, lattice and beta checks already passed during assembly and
    are reported as such; the cone hypothesis can still fail.

    Args:
        sys: Assembled GKZ datum

    Returns:
        List of check results
    """
    results = [
        CheckResult(
            name="Matrix A",
            status="pass",
            message=f"{sys.matrix.rows}x{sys.m}, full rank, columns span the lattice",
        ),
        CheckResult(
            name="Parameter beta",
            status="pass",
            message="beta = ("
            + ", ".join(format_rational(b) for b in sys.beta)
            + "), head entries non-integral",
        ),
    ]

    if check_semi_nonresonant(sys):
        results.append(
            CheckResult(
                name="Cone hypothesis",
                status="pass",
                message="-beta lies in the interior of cone(A)",
            )
        )
    else:
        results.append(
            CheckResult(
                name="Cone hypothesis",
                status="fail",
                message="-beta is not in the interior of cone(A)",
                recommendation="Shift beta_k by integers towards the cone interior",
            )
        )

    if check_nonresonant(sys):
        results.append(
            CheckResult(
                name="Non-resonance", status="pass", message="beta is non-resonant"
            )
        )
    else:
        results.append(
            CheckResult(
                name="Non-resonance",
                status="warning",
                message="beta is resonant on some facet of cone(A)",
                recommendation="Rank still follows from the cone hypothesis",
            )
        )

    if sys.n == 1:
        results.append(
            CheckResult(name="Torus dimension", status="pass", message="n = 1")
        )
    else:
        results.append(
            CheckResult(
                name="Torus dimension",
                status="warning",
                message=f"n = {sys.n}: rank prediction and periods unavailable",
            )
        )
    return results


def display_checks(
    checks: Sequence[CheckResult], out: Optional[Console] = None
) -> None:
    """
    Display check results in a formatted table.

    Args:
        checks: List of check results
        out: Console to print to (default: stderr console)
    """
    out = out or console
    table = Table(
        title="GKZ Datum Check Results",
        show_header=True,
        header_style="bold cyan",
    )
    table.add_column("Check", style="cyan", width=20)
    table.add_column("Status", justify="center", width=12)
    table.add_column("Message", style="dim", width=50)
    table.add_column("Recommendation", style="yellow", width=40)

    for result in checks:
        if result.status == "pass":
            status_text = "[bold green]✓ PASS[/bold green]"
        elif result.status == "warning":
            status_text = "[bold yellow]⚠ WARNING[/bold yellow]"
        else:
            status_text = "[bold red]✗ FAIL[/bold red]"
        table.add_row(
            result.name, status_text, result.message, result.recommendation or ""
        )

    out.print(table)

    pass_count = sum(1 for r in checks if r.status == "pass")
    warning_count = sum(1 for r in checks if r.status == "warning")
    fail_count = sum(1 for r in checks if r.status == "fail")

    summary_text = Text()
    summary_text.append("Summary: ", style="bold")
    summary_text.append(f"{pass_count} passed", style="green")
    if warning_count > 0:
        summary_text.append(f", {warning_count} warnings", style="yellow")
    if fail_count > 0:
        summary_text.append(f", {fail_count} failed", style="red")

    out.print(
        Panel(
            summary_text,
            title="[bold cyan]Check Summary[/bold cyan]",
            border_style="cyan",
        )
    )


# Sections


def validate_section(sys: GkzSystem, settings: RunSettings, **_) -> Dict:
    checks = run_checks(sys)
    return {
        "valid": all(c.status != "fail" for c in checks),
        "hypothesis": check_semi_nonresonant(sys),
        "nonresonant": check_nonresonant(sys),
        "checks": [c.to_dict() for c in checks],
    }


def operators_section(sys: GkzSystem, settings: RunSettings, **_) -> Dict:
    bound = settings.degree_bound
    if bound is None:
        bound = default_degree_bound(sys)
    boxes = box_operators(sys, bound)
    return {
        "degree_bound": bound,
        "euler": [
            {
                "row": op.row_index,
                "coefficients": list(op.coefficients),
                "beta": format_rational(op.beta_i),
                "text": render_euler(op),
            }
            for op in euler_operators(sys)
        ],
        "box": [
            {
                "nu_plus": list(op.nu_plus),
                "nu_minus": list(op.nu_minus),
                "text": render_box(op),
            }
            for op in boxes
        ],
    }


def volume_section(sys: GkzSystem, settings: RunSettings, **_) -> Dict:
    return {"volume": normalized_volume(PointConfiguration.from_columns(sys.columns()))}


def toric_section(sys: GkzSystem, settings: RunSettings, **_) -> Dict:
    return toric_curve_report(sys).to_dict()


def rank_section(sys: GkzSystem, settings: RunSettings, **_) -> Dict:
    toric = toric_curve_report(sys)
    rank = solution_rank(sys)
    volume = volume_section(sys, settings)["volume"]
    return {
        "rank": rank,
        "volume": volume,
        "I": list(toric.I),
        "J": list(toric.J),
        "les": toric.les.to_dict(),
        "agrees": rank == volume,
    }


def periods_section(
    sys: GkzSystem,
    settings: RunSettings,
    point: Optional[EvaluationPoint] = None,
    **_,
) -> Dict:
    """Period values, Euler residuals and the period-matrix rank at one point."""
    if point is None:
        point = generic_point(sys, settings.seed)
    beta = sys.beta_head
    cycles = cycle_inventory(point, beta, settings.nodes)
    entries = []
    for cycle in cycles:
        period = twisted_period(point, beta, cycle, settings.max_nodes)
        residuals = euler_residual(point, beta, cycle, sys, settings.max_nodes)
        entries.append(
            {
                "cycle": cycle.to_dict(),
                "period": period.to_dict(),
                "euler_residual": max(residuals),
            }
        )
    rank = period_matrix_rank(
        point,
        beta,
        sys,
        cycles=cycles,
        max_order=settings.max_order,
        tol=settings.tol,
        nodes=settings.nodes,
        max_nodes=settings.max_nodes,
        workers=settings.workers,
    )
    predicted = solution_rank(sys)
    return {
        "point": point.to_dict()["x"],
        "zeros": [[format_complex(z) for z in roots] for roots in point.zeros],
        "nodes": settings.nodes,
        "tol": settings.tol,
        "max_order": settings.max_order,
        "cycles": entries,
        "matrix_rank": rank,
        "predicted_rank": predicted,
        "agrees": rank == predicted,
    }


SECTIONS: Dict[str, Callable[..., Dict]] = {
    "validate": validate_section,
    "operators": operators_section,
    "volume": volume_section,
    "toric": toric_section,
    "rank": rank_section,
    "periods": periods_section,
}


def applicable_sections(sys: GkzSystem, point: Optional[EvaluationPoint]) -> List[str]:
    """Sections of the aggregate report for a datum."""
    names = ["validate", "operators", "volume"]
    if sys.n == 1:
        names += ["toric", "rank"]
        if point is not None:
            names.append("periods")
    return names


def collect_report(
    sys: GkzSystem,
    settings: RunSettings,
    point: Optional[EvaluationPoint] = None,
    sections: Optional[Sequence[str]] = None,
    problem: Optional[Dict] = None,
) -> Dict:
    """
    Collect the aggregate report.

    Args:
        sys: Assembled GKZ datum
        settings: Run settings
        point: Evaluation point for the periods section
        sections: Section names (default: applicable_sections)
        problem: Serialized problem to embed

    Returns:
        Dictionary with a fixed key order
    """
    logger.info("Collecting report...")
    names = list(sections) if sections is not None else applicable_sections(sys, point)
    report: Dict = {"schema_version": SCHEMA_VERSION, "command": "report"}
    if problem is not None:
        report["problem"] = problem
    report["system"] = system_report(sys, settings.degree_bound)
    for name in names:
        report[name] = SECTIONS[name](sys, settings, point=point)
    logger.info("Report collected successfully")
    return report


def save_report(report: Dict, output_file: Path) -> None:
    """
    Save report to JSON file.

    Args:
        report: Report dictionary
        output_file: Path to output JSON file
    """
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, "w", encoding="utf-8") as f:
            f.write(dumps_report(report))
        logger.info(f"Report saved to {output_file}")
    except OSError as e:
        logger.error(f"Error saving report to {output_file}: {e}")
        raise


def dumps_report(report: Dict) -> str:
    """Canonical JSON text of a report, newline-terminated."""
    text = json.dumps(report, indent=2, ensure_ascii=False, default=_json_default)
    return text + "\n"


def _json_default(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, complex):
        return format_complex(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _summary_rows(report: Dict) -> List[tuple]:
    rows = [("Command", str(report.get("command", "")))]
    sections = {k: v for k, v in report.items() if isinstance(v, dict)}
    flat = dict(report)
    for section in sections.values():
        flat.update(section)
    for key, label in (
        ("valid", "Valid"),
        ("hypothesis", "Cone hypothesis"),
        ("nonresonant", "Non-resonant"),
        ("volume", "Normalized volume"),
        ("I", "Integral rays I"),
        ("J", "Punctured rays J"),
        ("rank", "Predicted rank"),
        ("matrix_rank", "Period matrix rank"),
        ("predicted_rank", "Predicted rank (periods)"),
        ("functional", "Functional value"),
    ):
        if key in flat and not isinstance(flat[key], dict):
            value = flat[key]
            if isinstance(value, list):
                value = ", ".join(str(v) for v in value) or "(none)"
            rows.append((label, str(value)))
    if isinstance(flat.get("box"), list):
        rows.append(("Box operators", str(len(flat["box"]))))
    if isinstance(flat.get("les"), dict):
        les = flat["les"]
        rows.append(("LES dimensions", " ".join(str(v) for v in les.values())))
    return rows


def print_report_summary(report: Dict, out: Optional[Console] = None) -> None:
    """
    Print a human-readable summary of the report.

    Args:
        report: Report dictionary
        out: Console to print to (default: stderr console)
    """
    out = out or console
    table = Table(title="GKZ Report Summary", box=box.ROUNDED, header_style="bold cyan")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for label, value in _summary_rows(report):
        table.add_row(label, value)
    out.print(table)


def report_error(error: GkzError, out: Optional[Console] = None) -> None:
    """Print a one-line diagnostic for a package error."""
    out = out or console
    out.print(f"[bold red]✗ {type(error).__name__}[/bold red]: {escape(str(error))}")


def cokernel_section(
    beta: Fraction,
    g: Fraction,
    c: Optional[Sequence[Fraction]] = None,
    d: Optional[Sequence[Fraction]] = None,
    dg: Optional[Sequence[Fraction]] = None,
) -> Dict:
    """
    Preimage recursion trace for a class r under the twisted derivation.

    Without c and d the target is r = D_f(D_s + s), which is in the image.
    A target outside the image is traced through its projection r - L(r) * 1.

    Args:
        beta: Non-integral parameter
        g: Nonzero value of g
        c: Coefficients of D_s^0, D_s^1, ...
        d: Coefficients of s^1, s^2, ...
        dg: Optional gradient values for connection residues

    Returns:
        Dictionary with target, functional value, image flag, trace and residues
    """
    ctx = TwistContext(beta=beta, g=g, dg=tuple(dg) if dg is not None else None)
    if c is None and d is None:
        target = apply_twisted_derivation(ctx, QuotientElement(c=(0, 1), d=(1,)))
    else:
        target = QuotientElement(c=tuple(c or ()), d=tuple(d or ()))
    value = functional_L(ctx, target)
    section = {
        "beta": format_rational(ctx.beta),
        "g": format_rational(ctx.g),
        "target": target.to_dict(),
        "functional": format_rational(value),
        "in_image": value == 0,
    }
    if value != 0:
        target = target - value * ONE
        section["projected"] = target.to_dict()
    section["trace"] = solve_preimage_trace(ctx, target).to_dict()
    if ctx.dg is not None:
        section["connection_residues"] = [
            format_rational(connection_residue(ctx, i)) for i in range(len(ctx.dg))
        ]
    return section

"""Command-line interface: parse problem files, dispatch subcommands, emit JSON."""

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

# Add src directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.gkz_core import GkzSystem, assemble_system
from src.periods import EvaluationPoint
from src.report import (
    SECTIONS,
    cokernel_section,
    collect_report,
    display_checks,
    dumps_report,
    print_report_summary,
    report_error,
    run_checks,
    save_report,
)
from src.utils.config import SCHEMA_VERSION, RunSettings
from src.utils.errors import (
    GkzError,
    InputError,
    IntegralBeta,
    NumericError,
    ParseError,
    ShapeError,
    ValidationError,
)
from src.utils.format_utils import (
    format_complex,
    format_rational,
    parse_complex,
    parse_rational,
)
from src.utils.logger import setup_logger

logger = setup_logger("src")

COMMANDS = (
    "validate",
    "operators",
    "volume",
    "toric",
    "rank",
    "periods",
    "cokernel-demo",
    "report",
)
REQUIRED_FIELDS = ("r", "n", "weights", "beta")
OPTIONAL_FIELDS = ("x", "nodes", "tol", "max_order", "degree_bound", "seed")
KNOWN_FIELDS = ("schema_version",) + REQUIRED_FIELDS + OPTIONAL_FIELDS

Coefficients = Tuple[Tuple[complex, ...], ...]


@dataclass(frozen=True)
class ProblemFile:
    """A validated problem file."""

    r: int
    n: int
    weights: Tuple[Tuple[Tuple[int, ...], ...], ...]
    beta: Tuple[Fraction, ...]
    x: Optional[Coefficients] = None
    nodes: Optional[int] = None
    tol: Optional[float] = None
    max_order: Optional[int] = None
    degree_bound: Optional[int] = None
    seed: Optional[int] = None
    system: Optional[GkzSystem] = field(default=None, compare=False, repr=False)

    @property
    def point(self) -> Optional[EvaluationPoint]:
        if self.x is None:
            return None
        return EvaluationPoint.from_system(self.system, self.x)

    def settings_layer(self) -> Dict[str, Any]:
        return {
            "nodes": self.nodes,
            "tol": self.tol,
            "max_order": self.max_order,
            "degree_bound": self.degree_bound,
            "seed": self.seed,
        }


def _int(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(path, f"must be at least {minimum}, got {value}")
    return value


def _list(value: Any, path: str, length: Optional[int] = None) -> list:
    if not isinstance(value, list):
        raise ValidationError(path, f"expected a list, got {type(value).__name__}")
    if length is not None and len(value) != length:
        raise ValidationError(
            path,
            f"expected {length} entries, got {len(value)}",
            cause=ShapeError(f"length {len(value)} != {length}"),
        )
    return value


def _nodes(value: Any, path: str) -> int:
    nodes = _int(value, path, minimum=256)
    if nodes & (nodes - 1):
        raise ValidationError(path, f"node count must be a power of two, got {nodes}")
    return nodes


def _tol(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ValidationError(
            path, f"tolerance must be a positive number, got {value!r}"
        )
    return float(value)


def parse_point(
    data: Any, r: int, sizes: Sequence[int], path: str = "$.x"
) -> Coefficients:
    """
    Parse per-block complex coefficients.

    Args:
        data: List of r blocks of [re, im] pairs (or real numbers)
        r: Number of blocks
        sizes: Expected block sizes
        path: JSON path for diagnostics

    Returns:
        Tuple of coefficient tuples
    """
    blocks = []
    for k, block in enumerate(_list(data, path, r)):
        entries = _list(block, f"{path}[{k}]", sizes[k])
        values = []
        for j, entry in enumerate(entries):
            try:
                values.append(parse_complex(entry))
            except ValueError as e:
                raise ValidationError(f"{path}[{k}][{j}]", str(e), cause=e) from e
        blocks.append(tuple(values))
    return tuple(blocks)


def parse_problem_data(data: Any) -> ProblemFile:
    """
    Validate a decoded problem document.

    Args:
        data: Decoded JSON value

    Returns:
        ProblemFile with its assembled GkzSystem

    Raises:
        ValidationError: On the first violated constraint, with its JSON path
    """
    if not isinstance(data, dict):
        raise ValidationError("$", "problem must be a JSON object")
    for key in data:
        if key not in KNOWN_FIELDS:
            raise ValidationError(f"$.{key}", "unknown field")
    for key in REQUIRED_FIELDS:
        if key not in data:
            raise ValidationError(f"$.{key}", "missing required field")
    if "schema_version" in data and data["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            "$.schema_version", f"unsupported schema version {data['schema_version']!r}"
        )

    r = _int(data["r"], "$.r", minimum=1)
    n = _int(data["n"], "$.n", minimum=1)

    weights = []
    for k, block in enumerate(_list(data["weights"], "$.weights", r)):
        vectors = []
        for j, vector in enumerate(_list(block, f"$.weights[{k}]")):
            entries = _list(vector, f"$.weights[{k}][{j}]", n)
            vectors.append(
                tuple(
                    _int(v, f"$.weights[{k}][{j}][{i}]")
                    for i, v in enumerate(entries)
                )
            )
        if not vectors:
            raise ValidationError(f"$.weights[{k}]", "weight block is empty")
        weights.append(tuple(vectors))

    beta = []
    for k, value in enumerate(_list(data["beta"], "$.beta", r)):
        try:
            b = parse_rational(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(
                f"$.beta[{k}]", "expected a rational \"p/q\"", cause=e
            ) from e
        if b.denominator == 1:
            raise ValidationError(
                f"$.beta[{k}]",
                "beta entries must be non-integral",
                cause=IntegralBeta(f"beta_{k + 1} = {format_rational(b)}"),
            )
        beta.append(b)

    try:
        system = assemble_system(r, n, weights, beta)
    except InputError as e:
        raise ValidationError("$.weights", str(e), cause=e) from e

    x = None
    if data.get("x") is not None:
        x = parse_point(data["x"], r, [len(block) for block in weights])
        try:
            EvaluationPoint.from_system(system, x)
        except InputError as e:
            raise ValidationError("$.x", str(e), cause=e) from e

    params: Dict[str, Any] = {}
    if data.get("nodes") is not None:
        params["nodes"] = _nodes(data["nodes"], "$.nodes")
    if data.get("tol") is not None:
        params["tol"] = _tol(data["tol"], "$.tol")
    if data.get("max_order") is not None:
        params["max_order"] = _int(data["max_order"], "$.max_order", minimum=0)
    if data.get("degree_bound") is not None:
        params["degree_bound"] = _int(data["degree_bound"], "$.degree_bound", minimum=0)
    if data.get("seed") is not None:
        params["seed"] = _int(data["seed"], "$.seed")

    return ProblemFile(
        r=r,
        n=n,
        weights=tuple(weights),
        beta=tuple(beta),
        x=x,
        system=system,
        **params,
    )


def _read_json(source: Union[str, Path, TextIO]) -> Any:
    try:
        if hasattr(source, "read"):
            text = source.read()
        elif str(source) == "-":
            text = sys.stdin.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read {source}: {e}") from e


def parse_problem(source: Union[str, Path, TextIO]) -> ProblemFile:
    """
    Read and validate a problem file.

    Args:
        source: Path, "-" for stdin, or an open text stream

    Returns:
        Validated ProblemFile

    Raises:
        ParseError: If the input is not valid UTF-8 JSON
        ValidationError: If a field violates its constraint
    """
    return parse_problem_data(_read_json(source))


def serialize_problem(problem: ProblemFile) -> Dict[str, Any]:
    """
    Canonical JSON form of a problem; parse_problem_data inverts it.

    Args:
        problem: Validated problem

    Returns:
        Dictionary with fixed key order
    """
    data: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "r": problem.r,
        "n": problem.n,
        "weights": [[list(w) for w in block] for block in problem.weights],
        "beta": [format_rational(b) for b in problem.beta],
    }
    if problem.x is not None:
        data["x"] = [[format_complex(v) for v in block] for block in problem.x]
    for key, value in problem.settings_layer().items():
        if value is not None:
            data[key] = value
    return data


def _rational_list(text: Optional[str], flag: str) -> Optional[List[Fraction]]:
    if text is None:
        return None
    try:
        return [parse_rational(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(
            flag, f"expected comma-separated rationals, got {text!r}", cause=e
        ) from e


def _rational(text: Optional[str], flag: str) -> Optional[Fraction]:
    values = _rational_list(text, flag)
    if values is None:
        return None
    if len(values) != 1:
        raise ValidationError(flag, f"expected one rational, got {text!r}")
    return values[0]


def run(
    command: str,
    problem: Optional[ProblemFile],
    settings: Optional[RunSettings] = None,
    options: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Execute a subcommand and return its report.

    Args:
        command: One of COMMANDS
        problem: Validated problem (optional for cokernel-demo)
        settings: Run settings (default: RunSettings merged with the problem)
        options: Subcommand options ("point", "beta", "g", "c", "d", "dg")

    Returns:
        Report dictionary with schema_version and command first
    """
    options = options or {}
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    if settings is None:
        settings = RunSettings().merged(problem.settings_layer() if problem else {})
    header = {"schema_version": SCHEMA_VERSION, "command": command}

    if command == "cokernel-demo":
        beta = options.get("beta")
        if beta is None and problem is not None:
            beta = problem.beta[0]
        if beta is None:
            raise ValidationError("--beta", "required when no problem file is given")
        g = options.get("g")
        section = cokernel_section(
            beta=beta,
            g=Fraction(1) if g is None else g,
            c=options.get("c"),
            d=options.get("d"),
            dg=options.get("dg"),
        )
        return {**header, **section}

    if problem is None:
        raise ValidationError("$", "a problem file is required")
    point = options.get("point") or problem.point
    if command == "report":
        return collect_report(
            problem.system, settings, point=point, problem=serialize_problem(problem)
        )
    return {**header, **SECTIONS[command](problem.system, settings, point=point)}


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "problem",
        nargs="?",
        default=None,
        help="Problem JSON file, or - for stdin (default: stdin)",
    )
    common.add_argument(
        "--seed", type=int, default=None, help="Random seed (default: 0)"
    )
    common.add_argument(
        "--table", action="store_true", help="Render a summary table to stderr"
    )
    common.add_argument(
        "-o", "--output", type=Path, default=None, help="Also save the report to a file"
    )
    common.add_argument(
        "--log-level",
        type=str,
        default=None,
        help="Logging level (default: $GKZ_LOG_LEVEL or WARNING)",
    )

    parser = argparse.ArgumentParser(
        prog="gkz-periods",
        description=(
            "GKZ hypergeometric systems: validation, operators, volume, rank "
            "and periods"
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser(
        "validate", parents=[common], help="Check the standing assumptions"
    )
    operators = subparsers.add_parser(
        "operators", parents=[common], help="Emit Euler and box operators"
    )
    operators.add_argument(
        "--max-degree", type=int, default=None, help="Box operator degree bound"
    )
    subparsers.add_parser("volume", parents=[common], help="Normalized volume of A")
    subparsers.add_parser(
        "toric", parents=[common], help="Divisor and exponent data (n = 1)"
    )
    subparsers.add_parser(
        "rank", parents=[common], help="Predicted solution rank (n = 1)"
    )

    periods = subparsers.add_parser(
        "periods", parents=[common], help="Twisted periods and period-matrix rank"
    )
    periods.add_argument(
        "--at", type=Path, default=None, help="JSON file with the point x"
    )
    periods.add_argument(
        "--nodes", type=int, default=None, help="Quadrature nodes (default: 4096)"
    )
    periods.add_argument(
        "--tol", type=float, default=None, help="Rank threshold (default: 1e-6)"
    )
    periods.add_argument(
        "--max-order",
        type=int,
        default=None,
        help="Largest derivative order (default: 2)",
    )

    demo = subparsers.add_parser(
        "cokernel-demo",
        parents=[common],
        help="Preimage recursion for the twisted derivation",
    )
    demo.add_argument("--beta", type=str, default=None, help="Parameter beta as p/q")
    demo.add_argument(
        "--g", type=str, default=None, help="Value of g as p/q (default: 1)"
    )
    demo.add_argument(
        "--c", type=str, default=None, help="Coefficients of D_s^i, comma-separated"
    )
    demo.add_argument(
        "--d", type=str, default=None, help="Coefficients of s^j (j >= 1)"
    )
    demo.add_argument("--dg", type=str, default=None, help="Gradient values of g")

    subparsers.add_parser(
        "report", parents=[common], help="Aggregate all applicable sections"
    )
    return parser


def _cli_layer(args: argparse.Namespace) -> Dict[str, Any]:
    layer: Dict[str, Any] = {"seed": args.seed}
    if getattr(args, "max_degree", None) is not None:
        layer["degree_bound"] = _int(args.max_degree, "--max-degree", minimum=0)
    if getattr(args, "nodes", None) is not None:
        layer["nodes"] = _nodes(args.nodes, "--nodes")
    if getattr(args, "tol", None) is not None:
        layer["tol"] = _tol(args.tol, "--tol")
    if getattr(args, "max_order", None) is not None:
        layer["max_order"] = _int(args.max_order, "--max-order", minimum=0)
    return layer


def _options(
    args: argparse.Namespace, problem: Optional[ProblemFile]
) -> Dict[str, Any]:
    options: Dict[str, Any] = {}
    if args.command == "periods" and args.at is not None:
        data = _read_json(args.at)
        if isinstance(data, dict):
            data = data.get("x")
        system = problem.system
        coeffs = parse_point(data, system.r, system.block_sizes)
        try:
            options["point"] = EvaluationPoint.from_system(system, coeffs)
        except InputError as e:
            raise ValidationError("$.x", str(e), cause=e) from e
    if args.command == "cokernel-demo":
        options["beta"] = _rational(args.beta, "--beta")
        options["g"] = _rational(args.g, "--g")
        options["c"] = _rational_list(args.c, "--c")
        options["d"] = _rational_list(args.d, "--d")
        options["dg"] = _rational_list(args.dg, "--dg")
    return options


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Exit code: 0 ok, 2 input error, 3 numeric error, 1 internal error
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger("src", level=args.log_level)

    try:
        problem = None
        if args.command != "cokernel-demo" or args.problem is not None:
            problem = parse_problem(args.problem or "-")
        settings = RunSettings().merged(
            problem.settings_layer() if problem else {}, _cli_layer(args)
        )
        report = run(args.command, problem, settings, _options(args, problem))
    except InputError as e:
        report_error(e)
        return 2
    except NumericError as e:
        report_error(e)
        return 3
    except GkzError as e:
        report_error(e)
        return 1
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return 1

    if args.command == "validate":
        display_checks(run_checks(problem.system))
    if args.table:
        print_report_summary(report)
    sys.stdout.write(dumps_report(report))
    if args.output:
        save_report(report, args.output)
    return 0 if report.get("valid", True) else 2


if __name__ == "__main__":
    sys.exit(main())

"""Formatting utilities for exact rationals, complexes and vectors."""

from fractions import Fraction
from typing import Iterable, List, Sequence, Union

Rational = Union[int, Fraction]


def format_rational(value: Rational) -> str:
    """
    Format a rational number in canonical "p/q" form.

    Args:
        value: Integer or Fraction

    Returns:
        Formatted string (e.g., "-1/2", "3")
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Union[str, int]) -> Fraction:
    """
    Parse a rational number from "p/q" or integer form.

    Args:
        text: String such as "-1/2" or "3", or an int

    Returns:
        Fraction in lowest terms

    Raises:
        ValueError: If the text is not a rational literal
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational string: {text!r}")
    stripped = text.strip()
    if not stripped or "." in stripped or "e" in stripped.lower():
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(stripped)


def format_complex(value: complex) -> List[float]:
    """
    Format a complex number as a two-element [re, im] list.

    Args:
        value: Complex number

    Returns:
        [real part, imaginary part] as Python floats
    """
    value = complex(value)
    return [float(value.real), float(value.imag)]


def parse_complex(value: Union[Sequence[float], float, int]) -> complex:
    """
    Parse a complex from [re, im] or a real number.

    Args:
        value: Two-element list or real scalar

    Returns:
        Complex number

    Raises:
        ValueError: On malformed input
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ValueError(f"complex parts must be numbers: {value!r}")
        return complex(float(re), float(im))
    raise ValueError(f"expected [re, im] or a number, got {value!r}")


def format_rational_vector(values: Iterable[Rational]) -> List[str]:
    """Format each entry of a rational vector as "p/q"."""
    return [format_rational(v) for v in values]


def format_monomial(index: int, power: int, symbol: str = "D") -> str:
    """
    Format a power of a 1-based indexed symbol.

    Args:
        index: 1-based variable index
        power: Exponent (>= 1)
        symbol: Variable prefix

    Returns:
        Formatted string (e.g., "D1^2", "D3")
    """
    if power == 1:
        return f"{symbol}{index}"
    return f"{symbol}{index}^{power}"

"""Exception hierarchy for GKZ period computations.

Two families matter to callers: ``InputError`` (the datum or a request is
invalid, CLI exit code 2) and ``NumericError`` (a floating-point procedure
failed to converge, CLI exit code 3).
"""

from typing import Optional


class GkzError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GkzError):
    """Invalid input data or request."""


class NumericError(GkzError):
    """A numerical procedure failed."""


# exact-linalg


class DimensionMismatch(InputError):
    """Matrix and vector shapes do not agree."""


class NotFullDimensional(InputError):
    """Cone generators do not span the ambient space."""


# gkz-core


class ShapeError(InputError):
    """Weight blocks or parameters have the wrong shape."""


class NotFullRank(InputError):
    """The assembled matrix A does not have full row rank."""


class LatticeNotSpanned(InputError):
    """The columns of A do not generate the full integer lattice."""


class IntegralBeta(InputError):
    """Some head parameter beta_k is an integer."""


class HypothesisViolation(InputError):
    """-beta is not in the interior of the cone spanned by the columns of A."""


# polytope-volume


class DegenerateConfiguration(InputError):
    """Point configuration has trivial affine span."""


# toric-curve


class UnsupportedDimension(InputError):
    """Only torus dimension n = 1 is supported."""


class ConstantBlock(InputError):
    """A weight block has lattice length zero."""


class TooFewPunctures(InputError):
    """Fewer than two punctures on the sphere."""


class TrivialLocalSystem(InputError):
    """No puncture carries a non-integral exponent."""


# twist-cokernel


class GIsZero(InputError):
    """The functional is undefined where g vanishes."""


class NotInImage(InputError):
    """The element is not in the image of the twisted derivation."""


class MissingGradient(InputError):
    """A gradient value of g was required but not supplied."""


# periods


class DegenerateCoefficients(InputError):
    """An extreme coefficient of a section vanishes."""


class CycleNotClosed(InputError):
    """The cycle carries non-trivial monodromy and no anchor."""


class RootFindingDiverged(NumericError):
    """Simultaneous root refinement did not reach the residual target."""


class BranchJump(NumericError):
    """Phase step between quadrature nodes exceeded the continuation limit."""


class InsufficientCycles(NumericError):
    """Too few usable cycles to realize the predicted rank."""


# cli


class ParseError(InputError):
    """Problem file is not valid JSON."""


class ValidationError(InputError):
    """Problem file failed validation at a JSON path."""

    def __init__(self, path: str, message: str, cause: Optional[Exception] = None):
        """
        Initialize validation error.

        Args:
            path: JSON path of the offending field (e.g. "$.weights[0][1]")
            message: Description of the violated constraint
            cause: Underlying error, if any
        """
        self.path = path
        self.cause = cause
        kind = f"{type(cause).__name__}: " if cause is not None else ""
        super().__init__(f"{path}: {kind}{message}")

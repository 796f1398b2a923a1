"""Exception types shared across the package.

Class names double as the error vocabulary of the CLI: input and
validation failures map to exit code 2, budget exhaustion to 3, and
negative analysis outcomes to 1.
"""


class AltboundError(Exception):
    """Base class for all errors raised by this package."""


# ---- input / validation ------------------------------------------------


class ParseError(AltboundError):
    """Malformed input document."""


class ShapeError(AltboundError):
    """Matrix or vector dimensions are inconsistent."""


class EmptyAlphabet(AltboundError):
    """An alphabet contains no matrices."""


class NonSquare(AltboundError):
    """Operation requires a square matrix."""


class Singular(AltboundError):
    """Matrix is singular within the determinant tolerance."""


class IndexOutOfRange(AltboundError):
    """An alphabet index is out of range."""


class LengthMismatch(AltboundError):
    """Index sequences have incompatible lengths."""


class ZeroVector(AltboundError):
    """A nonzero vector is required."""


class DeterminantNotOne(AltboundError):
    """Counterexample construction requires determinant-one inputs."""


class GammaIsOne(AltboundError):
    """Skew parameter of exactly one degenerates to a plain rotation."""


class AlphaTooLarge(AltboundError):
    """Scale factor breaks the per-block contraction certificate."""


class HypothesisViolated(AltboundError):
    """System does not satisfy the hypothesis class an operation needs."""


# ---- search / analysis -------------------------------------------------


class BudgetExceeded(AltboundError):
    """Enumeration would exceed the node budget."""


class NotFoundWithinCap(AltboundError):
    """No block length up to the cap reaches the requested threshold."""


class MaxStepsExceeded(AltboundError):
    """Iteration did not reach its target within the step limit."""

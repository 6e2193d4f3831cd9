"""Exception types shared across the package."""


class LowRankError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(LowRankError, ValueError):
    """Operands live in spaces of different dimensions."""


class SingularMatrix(LowRankError):
    """Dense LU factorization hit a pivot below the singularity threshold."""


class SingularBase(LowRankError):
    """The base operator B could not be factorized."""


class SingularPerturbation(LowRankError):
    """The determinant of the identity-plus-dyads factor is (numerically) zero."""


class TruncatedDetSingular(LowRankError):
    """The truncated determinant at the requested order is (numerically) zero."""


class DegenerateMetric(LowRankError):
    """The bilinear form is singular and induces no isomorphism with the dual."""


class ProblemFormatError(LowRankError):
    """A problem description (JSON) does not match the expected schema."""

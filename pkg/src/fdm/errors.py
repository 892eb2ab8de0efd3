"""Exception hierarchy.

Every error raised by the library derives from :class:`FDMError`, so callers
(and the command line front end) can map failures to exit codes without
inspecting messages.
"""


class FDMError(Exception):
    """Base class for library errors."""


class ValidationError(FDMError, ValueError):
    """Input rejected before any numerical work (CLI exit code 2)."""


class DimensionMismatch(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class NonPositiveScale(ValidationError):
    pass


class DegeneratePolar(ValidationError):
    pass


class UnboundedBelow(ValidationError):
    pass


class SearchBoxTooSmall(FDMError):
    """The maximizer of an inner concave program sits on the search box."""


class NegativeBase(ValidationError):
    pass


class Diverged(FDMError):
    pass


class LogOfZero(ValidationError):
    pass


class ZeroQ(ValidationError):
    pass


class ConjugateUnbounded(FDMError):
    pass


class NonConvergent(FDMError):
    pass


class PreconditionFailed(ValidationError):
    pass


class EmptyMeasure(ValidationError):
    pass


class SupportDegenerate(ValidationError):
    pass


class QPositive(ValidationError):
    """The solver only covers q <= 0."""


class NotConverged(FDMError):
    """Iteration cap reached; the partial result is attached."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class TruncationTooSmall(FDMError):
    pass


class SchemaError(ValidationError):
    """Malformed JSON input; ``pointer`` is a JSON pointer to the field."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer

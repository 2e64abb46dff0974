"""Exception hierarchy shared by every module."""


class AredError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateRange(AredError):
    """A variable range with high <= low."""


class EmptyDomain(AredError):
    """A domain with no independent variables."""


class OutOfDomain(AredError):
    """Coordinates outside the closed domain box."""


class DrawExhausted(AredError):
    """Rejection sampling failed within the attempt budget."""


class EmptyArchive(AredError):
    """An operation that needs at least one archived sample got none."""


class InsufficientData(AredError):
    """Too few measured samples to fit or score a model."""


class SolverDiverged(AredError):
    """The dual solver hit its iteration cap before meeting the KKT tolerance."""


class LengthMismatch(AredError):
    """Paired series of unequal length."""


class MissingEndpoints(AredError):
    """Initial samples do not cover the required domain corners."""


class UnmeasuredInitialSample(AredError):
    """An initial sample without a measured dependent value."""


class WrongState(AredError):
    """A session operation called outside its legal protocol state."""


class NonFiniteValue(AredError):
    """A measured value that is NaN or infinite."""


class NotConverged(AredError):
    """Model export requested before the session met its stopping rule."""


class CaseBudgetExceeded(AredError):
    """The autonomous loop hit its hard case budget (reported, not raised)."""


class IoFailure(AredError):
    """Filesystem-level read/write failure."""


class SchemaMismatch(AredError):
    """A persisted document with an unknown schema version."""


class CorruptDocument(AredError):
    """A persisted document that fails parsing or its digest check."""

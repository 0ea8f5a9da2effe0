"""Exception hierarchy.

Everything a caller can fix by supplying different input derives from
:class:`ValidationError`; :class:`ConsistencyFailure` signals that two
independent routes to the same verdict disagreed.
"""


class QInstrumentError(Exception):
    """Base class for all package errors."""


class ValidationError(QInstrumentError, ValueError):
    """An input violates a stated invariant."""


class NotHermitian(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotOrthonormal(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class CompletenessViolation(ValidationError):
    """The state transformers do not satisfy sum_i M_i^dag M_i = 1."""


class ZeroProbabilityOutcome(ValidationError):
    """A selective update was requested for an outcome with p_i ~ 0."""


class IndexOutOfRange(ValidationError, IndexError):
    pass


class InvalidDecomposition(ValidationError):
    pass


class NotSingular(ValidationError):
    pass


class NotLocallyNontrivial(ValidationError):
    pass


class ConsistencyFailure(QInstrumentError, RuntimeError):
    """Two independent criteria returned different verdicts."""

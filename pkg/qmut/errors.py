"""

Exceptions raised by qmut.

"""


class QmutError(Exception):
    """Base class for all qmut errors."""


class IncompatibleAmbientError(QmutError, ValueError):
    """A value cannot be expressed in the requested ambient ring."""


class VertexIndexError(QmutError, IndexError):
    """A vertex index is out of range for a quiver."""


class RankBoundError(QmutError, ValueError):
    """The rank of a quiver exceeds the configured canonical-form bound."""


class ConditionError(QmutError, ValueError):
    """A standard form violates the condition set of its family."""


class NotLabelValuedError(QmutError, ValueError):
    """Some arrow weight is not of the form 2cos(pi m/d)."""


class RealizationError(QmutError):
    """A Gram matrix is not a realization of the companion quiver."""


class DocumentError(QmutError, ValueError):
    """A quiver document could not be parsed or failed validation."""


class PrecisionExhaustedError(QmutError, ArithmeticError):
    """Interval evaluation hit the precision cap without deciding a sign.

    This cannot happen for a canonical nonzero value and indicates a bug.

    """

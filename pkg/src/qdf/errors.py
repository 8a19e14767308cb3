"""Exception hierarchy shared by all qdf modules.

Every error raised by the library derives from :class:`QdfError`, so callers
(including the command-line frontend, which maps subclasses to exit codes)
can distinguish bad input from exceeded resource limits and from genuine
numerical trouble.
"""


class QdfError(Exception):
    """Base class for all library errors."""


class ShapeError(QdfError, ValueError):
    """Operands have incompatible or unexpected dimensions."""


class ResourceError(QdfError, ValueError):
    """A requested computation exceeds the supported desk-scale limits."""


class InvariantError(QdfError, ValueError):
    """A value violates a required invariant (Hermiticity, trace, PSD, ...)."""


class NotPositiveDefiniteError(InvariantError):
    """An operator required to be positive definite has a tiny or negative eigenvalue."""


class NotInformationallyCompleteError(QdfError, ValueError):
    """A POVM does not consist of exactly d^2 linearly independent elements.

    Carries the numerical rank of the Gram matrix in ``gram_rank``.
    """

    def __init__(self, message: str, gram_rank: int | None = None):
        super().__init__(message)
        self.gram_rank = gram_rank


class NotAWitnessError(QdfError, ValueError):
    """The operator has no negative eigenvalue, so no witness can be built."""


class DegeneratePosteriorError(QdfError, ValueError):
    """Every grid point has zero likelihood; the posterior is undefined."""


class PriorSupportError(QdfError, ValueError):
    """A prior assigns no appreciable weight near the true state."""


class NumericalError(QdfError, RuntimeError):
    """An internal numerical routine failed to produce a usable result."""

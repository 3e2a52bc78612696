"""Exception hierarchy shared by all modules."""


class SecantLabError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(SecantLabError, ValueError):
    """Invalid input parameters (bad radius, non-finite matrix, invalid window...)."""


class QuadratureError(SecantLabError, RuntimeError):
    """Quadrature failed to converge within the refinement budget."""

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class OverflowConversionError(SecantLabError, OverflowError):
    """A log-domain quantity is too large to be represented natively."""


class UnstableGeneratorError(SecantLabError):
    """The integer translates of the window are not a Riesz sequence."""


class CoverageError(SecantLabError):
    """The representation window is too small for the requested scale."""


class NotEnumerableError(SecantLabError):
    """A point set cannot be written as n + delta_n with bounded delta_n."""


class EmptySectionError(SecantLabError):
    """A finite section of a sampling matrix has no admissible rows."""


class SingularityError(SecantLabError):
    """Evaluation requested at an essential singularity (z = 0)."""


class InconsistentDataError(SecantLabError):
    """Interpolation data cannot be matched by any element of the space."""


class InconsistencyError(SecantLabError):
    """Internal cross-checks disagree; signals an implementation bug."""


class AliasingError(SecantLabError):
    """Circle sampling is too coarse for the requested Laurent band."""

"""Exception and warning types raised by cdmaps."""


class CDMError(Exception):
    """Base class for all cdmaps errors."""


class InvalidInput(CDMError, ValueError):
    pass


class DegenerateDegree(CDMError):
    """A row degree vanished; the kernel graph is disconnected or degenerate."""


class NumericalFailure(CDMError):
    pass


class DegeneratePhase(CDMError):
    """A zero inner product left the phase factor undefined."""


class SpectralUnderflow(CDMError):
    """A retained eigenvalue is too small to be raised to a negative power."""


class DegenerateScatter(CDMError):
    """Within-class scatter is zero, so the Fisher ratio is infinite."""


class ZeroVariance(CDMError):
    pass


class AmbiguousRotation(UserWarning):
    """Cross-covariance is rank deficient; the optimal rotation is not unique."""

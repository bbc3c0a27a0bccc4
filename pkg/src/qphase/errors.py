"""Exception hierarchy shared by every qphase module."""


class QPhaseError(Exception):
    """Base class for all library errors."""


class NormalizationError(QPhaseError):
    """Amplitudes plus residual mass do not sum to one."""


class InvalidAmplitude(QPhaseError):
    """An amplitude is NaN or infinite."""


class DimensionError(QPhaseError):
    """A moment or witness order exceeds the retained Fock dimension."""


class ParamError(QPhaseError, ValueError):
    """State parameters fall outside the accepted domain."""


class DomainError(QPhaseError, ValueError):
    """Parameters are nominally valid but produce an ill-defined state."""


class TruncationError(QPhaseError):
    """An infinite expansion needs more terms than the hard cap allows."""


class PhaseUndefined(QPhaseError):
    """The mean field vanishes so the phase quantities are undefined."""


class ClosedFormUndefined(QPhaseError):
    """A printed closed-form expression cannot be evaluated coherently."""


class ConfigError(QPhaseError, ValueError):
    """Sweep configuration is malformed."""


class UnknownFigure(ConfigError):
    """No preset exists for the requested figure id."""

"""Exception hierarchy shared across the package."""


class LTError(Exception):
    """Base class for all errors raised by ltbounds."""


class QuadratureNotConverged(LTError):
    pass


class NormalizationViolated(LTError):
    pass


class NotConverged(LTError):
    pass


class DomainTooSmall(LTError):
    pass


class RouteDisagreement(LTError):
    pass


class NoModesSelected(LTError):
    pass


class ProfileNotLocalized(LTError):
    pass


class PauliViolation(LTError):
    """Density matrix has eigenvalues outside [0, 1]."""


class ConsistencyError(LTError):
    """Two evaluations of the same quantity disagree beyond tolerance."""

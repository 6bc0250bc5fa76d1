"""Exception hierarchy shared by all wedgeflow modules."""


class WedgeFlowError(Exception):
    """Base class for numerical failures raised by the library."""

    name = "WedgeFlowError"


class VacuumError(WedgeFlowError):
    name = "VacuumError"


class NotSupersonic(WedgeFlowError):
    name = "NotSupersonic"


class BetaOutOfRange(WedgeFlowError):
    name = "BetaOutOfRange"


class NoRoot(WedgeFlowError):
    name = "NoRoot"


class AxiallySubsonic(WedgeFlowError):
    """Raised when u1 <= c, so x1 is no longer a marching direction."""

    name = "AxiallySubsonic"

    def __init__(self, message, slice_index=None):
        super().__init__(message)
        self.slice_index = slice_index


class NoIntersection(WedgeFlowError):
    name = "NoIntersection"


class DetachedError(WedgeFlowError):
    """Required turning exceeds the detachment angle of the local state."""

    name = "Detached"


class InsufficientData(WedgeFlowError):
    name = "InsufficientData"


class NonConvergence(WedgeFlowError):
    """Raised with the partial results attached so nothing is hidden."""

    name = "NonConvergence"

    def __init__(self, message, state=None, fit=None, report=None):
        super().__init__(message)
        self.state = state
        self.fit = fit
        self.report = report


class CflViolation(WedgeFlowError):
    name = "CflViolation"


class OutOfDomain(WedgeFlowError):
    name = "OutOfDomain"


class ValidationError(ValueError):
    """Bad user input (config keys, parameter ranges)."""

    name = "ValidationError"

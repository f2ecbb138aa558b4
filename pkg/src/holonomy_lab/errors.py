"""Exception hierarchy for holonomy_lab."""


class HolonomyError(Exception):
    """Base class for all library errors."""


class NumericalError(HolonomyError):
    """A computation could not produce a trustworthy result."""


class ConfigError(HolonomyError):
    """Invalid scenario configuration."""


class NonHermitianInput(HolonomyError, ValueError):
    pass


class NonUnitaryInput(HolonomyError, ValueError):
    pass


class ZeroVector(HolonomyError, ValueError):
    pass


class NotAProjector(HolonomyError, ValueError):
    pass


class StartMismatch(HolonomyError, ValueError):
    pass


class EndpointMismatch(HolonomyError, ValueError):
    pass


class NotClosed(HolonomyError, ValueError):
    pass


class StepTooLarge(NumericalError):
    """Adjacent directors are too close to orthogonal to pick a sheet."""


class LiftAmbiguous(NumericalError):
    pass


class EndpointUnresolved(NumericalError):
    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class DegeneracyOnPath(NumericalError):
    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class StepTooCoarse(NumericalError, ValueError):
    pass


class GridMismatch(HolonomyError, ValueError):
    pass


class NonPositiveInput(HolonomyError, ValueError):
    pass

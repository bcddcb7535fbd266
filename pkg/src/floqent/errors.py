"""Exception types raised across the package."""


class FloqentError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(FloqentError, ValueError):
    pass


class NonUnitaryInput(FloqentError, ValueError):
    pass


class IndefiniteInput(FloqentError, ValueError):
    pass


class DegenerateSpectrum(FloqentError):
    pass


class ResonantDenominator(FloqentError):
    pass


class StepSizeUnderflow(FloqentError, RuntimeError):
    pass


class QuasienergyDegeneracy(FloqentError):
    pass


class AmbiguousTracking(FloqentError):
    pass


class TraceLeak(FloqentError):
    pass


class NonphysicalState(FloqentError):
    pass


class DegenerateSteadyState(FloqentError):
    """Generator kernel has dimension > 1; ``states`` holds every kernel vector."""

    def __init__(self, message, states=()):
        super().__init__(message)
        self.states = list(states)


class NonPhysicalInput(FloqentError, ValueError):
    pass


class UnknownBasis(FloqentError, ValueError):
    pass


class ConfigError(FloqentError, ValueError):
    pass

"""Exception types shared across the package."""


class MidalignError(Exception):
    """Base class for all package-specific errors."""


class NonConvergence(MidalignError):
    """Newton iteration failed; carries the last iterate in .last_state."""

    def __init__(self, message, last_state=None, residual_norm=None):
        super().__init__(message)
        self.last_state = last_state
        self.residual_norm = residual_norm


class SingularDenominator(MidalignError):
    """A partition-series coupling denominator 1 - 2*gamma*Gamma vanished."""


class NonPositiveDensity(MidalignError):
    """Noise density takes negative values; cannot be sampled."""


class AntipodalPair(MidalignError):
    """Midpoint of two antipodal angles is undefined."""


class BlowUp(MidalignError):
    """Mode amplitudes exceeded the integration guard."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class RateWindowError(MidalignError):
    """Mode amplitude left the linear regime inside the fit window."""


class InsufficientData(MidalignError):
    """Not enough converged diagram rows inside the fit window."""


class InsufficientDecay(MidalignError):
    """Characteristic function has not decayed enough for inversion."""

"""Exception types shared across the package."""


class SprinkledNLSError(Exception):
    """Base class for package errors."""


class ConfigError(SprinkledNLSError):
    """Invalid configuration file, key, or value."""


class ResolutionError(SprinkledNLSError):
    """Grid too coarse to represent the requested mollification width."""


class BlowUpError(SprinkledNLSError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(f"non-finite field values at step {step} (t = {time:.6g})")


class OracleInstabilityError(SprinkledNLSError):
    """Reference integrator norm grew beyond its stability tolerance."""

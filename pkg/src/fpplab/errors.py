"""Exception types raised across fpplab."""


class FPPError(Exception):
    """Base class for all fpplab errors."""


class OutOfDomainError(FPPError, ValueError):
    """A point or edge lies outside the box (or outside the half-plane mask)."""


class InvalidParameterError(FPPError, ValueError):
    pass


class InsufficientDataError(FPPError, ValueError):
    """Too little data (directions, arc points) for the requested construction."""


class DegenerateFitError(FPPError, ValueError):
    pass


class RangeError(FPPError, ValueError):
    """A path does not meet every horizontal line of the requested range."""


class ConfigError(FPPError, ValueError):
    pass


class InvariantViolation(FPPError, AssertionError):
    """An invariant that must hold pathwise was observed to fail."""

"""Exception types raised across the package."""


class WarpDriftError(Exception):
    """Base class for all package errors."""


class InvalidBandwidthError(WarpDriftError, ValueError):
    """A bandwidth was not strictly positive."""


class InvalidConfigError(WarpDriftError, ValueError):
    """A configuration value violates a precondition."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class InvalidInputError(WarpDriftError, ValueError):
    """Input data is empty or malformed."""


class SimulationBlowupError(WarpDriftError, RuntimeError):
    """The Euler-Maruyama recursion produced a non-finite value."""

    def __init__(self, step, message=None):
        super().__init__(message or f"non-finite value at step {step}")
        self.step = step


class UnsupportedWarpError(WarpDriftError, TypeError):
    """The operation needs an analytic warp (density and inverse)."""


class IncompatibleGridError(WarpDriftError, ValueError):
    """Two curves or a curve and a quadrature rule live on different grids."""


class DomainError(WarpDriftError, ValueError):
    """Argument outside the domain of a function (e.g. inverse CDF)."""

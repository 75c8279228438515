"""Exception hierarchy shared across the package."""


class FracSplitError(Exception):
    """Base class for all package errors."""


class GridError(FracSplitError, ValueError):
    """Invalid grid parameters or mismatched grids."""


class NonFiniteFieldError(FracSplitError, ValueError):
    """A field would contain NaN or Inf samples."""


class DegenerateDurationError(FracSplitError, ValueError):
    """Kernel requested at sigma * t == 0, where it is a point mass."""


class ReactionError(FracSplitError, ValueError):
    """Bad reaction specification or state vector length."""


class OptionsError(FracSplitError, ValueError):
    """Invalid integrator or scheme options."""


class BlowUpError(FracSplitError, ArithmeticError):
    """Raised where a completed trajectory is required but the flow blew up."""

    def __init__(self, message, time_estimate=float("nan"), component=None):
        super().__init__(message)
        self.time_estimate = time_estimate
        self.component = component


class ConfigError(FracSplitError, ValueError):
    """Configuration document failed to parse or validate."""

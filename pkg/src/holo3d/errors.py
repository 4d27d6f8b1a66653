"""Exception types shared across the package."""


class Holo3DError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(Holo3DError, ValueError):
    """Operands live on incompatible grids or plane stacks."""


class ParameterError(Holo3DError, ValueError):
    """A scalar parameter or configuration value is out of range."""


class UndefinedMetricError(Holo3DError, ValueError):
    """A relative error metric was requested with a zero-norm reference."""


class DivergenceError(Holo3DError, RuntimeError):
    """Non-finite values appeared during an iterative solve."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite values at iteration {iteration}")

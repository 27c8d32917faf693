"""Exception types raised by the toolkit."""


class ToolkitError(ValueError):
    """Base class for invalid input or failed numerical work."""


class DimensionError(ToolkitError):
    pass


class RootFindingError(ToolkitError):
    """A scalar root finder could not bracket or converge."""


class BudgetExceededError(ToolkitError):
    pass


class UnsupportedDimensionError(ToolkitError):
    pass


class IterationError(ToolkitError):
    """A fixed-point orbit produced a non-finite iterate."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite iterate at step {step}")

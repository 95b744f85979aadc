"""Exception types shared across the solver modules."""


class GameError(Exception):
    """Base class for all errors raised by biasedgames."""


class ValidationError(GameError, ValueError):
    """Inputs violate a type invariant (ranges, normalization, shapes)."""


class DomainError(GameError, ValueError):
    """Inputs are valid but outside the domain where an operation is defined."""


class BudgetError(GameError, ValueError):
    """Requested problem size exceeds a fixed computational budget."""


class ThresholdError(GameError, RuntimeError):
    """Threshold search found no sign change to bracket."""

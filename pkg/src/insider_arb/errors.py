class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative routine stopped before meeting its tolerance."""

    def __init__(self, message: str, best_estimate: float = float("nan"), error_estimate: float = float("nan")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class InvariantError(ValueError):
    """A data structure violates one of its stated invariants."""


class AdmissibilityError(ArithmeticError):
    """A wealth factor became nonpositive."""


class CoverageError(ValueError):
    """A truncated range does not hold enough probability mass."""


class BudgetError(RuntimeError):
    """An enumeration exceeded its configured budget."""

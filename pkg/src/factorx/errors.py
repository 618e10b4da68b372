"""Exception types shared across the package."""


class FactorxError(Exception):
    """Base class for all package errors."""


class ParseError(FactorxError, ValueError):
    """Malformed graph or degree-sequence input."""


class DomainError(FactorxError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConvergenceError(FactorxError, RuntimeError):
    """An iterative solver failed to reach the requested tolerance.

    Carries the best iterate found (``beta``) and its residual sup-norm
    (``residual_inf``) so callers can inspect or restart.
    """

    def __init__(self, message, beta=None, residual_inf=None):
        super().__init__(message)
        self.beta = beta
        self.residual_inf = residual_inf


class BudgetExceededError(FactorxError, RuntimeError):
    """A computation would exceed its configured work budget."""

    def __init__(self, message, count=None, budget=None):
        super().__init__(message)
        self.count = count
        self.budget = budget

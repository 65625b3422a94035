"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical domain (non-positive volume, negative time...)."""


class SolverError(RuntimeError):
    """A nonlinear solve did not converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class TruncationError(RuntimeError):
    """The truncated self-similar domain is too small for the profile tails."""


class ConfigurationError(ValueError):
    """End states or run settings violate a structural requirement."""


class DiagnosticError(RuntimeError):
    """A fit or diagnostic could not be formed from the available data."""


class NumericalAbort(RuntimeError):
    """Time integration hit a non-physical state (positivity loss or NaN)."""

    def __init__(self, message, state=None, step_index=None):
        super().__init__(message)
        self.state = state
        self.step_index = step_index

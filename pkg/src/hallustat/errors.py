"""Structured errors carrying the CLI exit code they map to."""


class WorkbenchError(Exception):
    """Base class; exit_code is what the CLI process returns on this failure."""

    exit_code = 1


class ConfigError(WorkbenchError):
    """Malformed or missing configuration."""

    exit_code = 2


class DomainError(WorkbenchError, ValueError):
    """Arguments outside a formula's or type's domain."""

    exit_code = 3


class DominationError(WorkbenchError):
    """A required stochastic-domination condition failed or is undecidable."""

    exit_code = 4


class BudgetExceeded(WorkbenchError):
    """An enumeration would exceed the configured budget."""

    exit_code = 5

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget

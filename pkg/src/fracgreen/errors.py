"""Exception types shared across the solver suite."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConfigError(ValueError):
    """Invalid run configuration.  Carries the full list of validation errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PrecisionError(RuntimeError):
    """Requested precision was not reached.  Carries the best value obtained."""

    def __init__(self, message, best_value=None, error_estimate=None, diagnostics=None):
        super().__init__(message)
        self.best_value = best_value
        self.error_estimate = error_estimate
        self.diagnostics = diagnostics or {}


class ConvergenceError(RuntimeError):
    """An iteration failed to converge.  Carries the partial report if any."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StepSizeError(RuntimeError):
    """Time-panel refinement exceeded its budget."""

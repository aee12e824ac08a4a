"""Semantic exception hierarchy shared by all modules."""


class SqccError(Exception):
    """Base class for all package errors."""


class DomainError(SqccError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(SqccError, ArithmeticError):
    """A numerical procedure failed (non-convergence, indefinite matrix, ...)."""


class ConvergenceError(NumericError):
    """An iteration did not converge; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class PhysicalityError(SqccError, ValueError):
    """A state or channel violates the uncertainty-principle bound."""

"""Exceptions raised throughout SPyShift.

The command line maps them onto exit codes:
    ContractViolation -> 1, NumericError -> 2, AcceptanceFailure -> 3."""


class SPyShiftError(Exception):
    """Base class for every SPyShift failure."""
    exitcode = 1


class ContractViolation(SPyShiftError, ValueError):
    """A precondition of an operation was violated."""
    exitcode = 1


class DomainError(ContractViolation):
    """An input lies outside the domain of a kernel, filter or density."""


class InconsistencyError(ContractViolation):
    """Two inputs disagree (e.g. a Landweber lambda that is not 1/t)."""


class DegenerateInput(ContractViolation):
    """The input carries no information (e.g. all weights are zero)."""


class ConfigurationError(ContractViolation):
    """An inputs dictionary has unknown keys or invalid choices."""


class NumericError(SPyShiftError, ArithmeticError):
    """A numerical routine failed (eigensolver, quadrature, ...)."""
    exitcode = 2


class PSDViolation(NumericError):
    """A matrix that must be positive semidefinite is not."""


class DivergenceError(NumericError):
    """An iteration blew up."""


class AcceptanceFailure(SPyShiftError):
    """A diagnostic inequality or rate acceptance check failed."""
    exitcode = 3

"""
Custom exceptions for contextBell.

All exceptions inherit from AppError so the command-line layer can catch
them in one place and translate them into exit codes. Each exception logs
its message on initialisation using the shared logger.

Notes:
- `exit_code` is 2 for bad input (parse, range, precondition failures)
  and 1 for failed computations (optimizer, output).
- Precondition errors also subclass ValueError.
"""

from contextBell.utils.logger_config import logger


class AppError(Exception):
    """
    Base exception class for application-specific errors.

    Parameters
    ----------
    context : str
        What was being checked or computed when the error occurred.
    detail : object, optional
        Extra information (a value, a tolerance, an underlying exception)
        appended to the message.
    """

    exit_code = 1
    template = "{context} failed"

    def __init__(self, context, detail=None):
        self.context = context
        self.detail = detail

        message = self.template.format(context=context)
        if detail is not None:
            message += f": {detail}"

        super().__init__(message)

        logger.error(message)


class InputError(AppError, ValueError):
    """Base class for errors caused by invalid input or a violated
    precondition."""

    exit_code = 2
    template = "Invalid input: {context}"


########################################################################
# Linear algebra and state errors
########################################################################


class ZeroVectorError(InputError):
    """Raised when a vector with (numerically) zero norm is normalised."""

    template = "Cannot normalise zero vector: {context}"


class DimensionMismatchError(InputError):
    """Raised when the dimensions of states and operators disagree."""

    template = "Dimension mismatch in {context}"


class NotHermitianError(InputError):
    """Raised when a matrix that must be Hermitian is not."""

    template = "Matrix is not Hermitian: {context}"


class NotNormalizedError(InputError):
    """Raised when a state that must have unit norm does not."""

    template = "State is not normalised: {context}"


class NotSymmetricError(InputError):
    """Raised when a two-qubit state has an antisymmetric component above
    the tolerance."""

    template = "State is not symmetric under qubit exchange: {context}"


class NotUnitError(InputError):
    """Raised when a measurement direction is not a unit vector."""

    template = "Direction is not a unit vector: {context}"


class InvalidPentagramError(InputError):
    """Raised when five directions break cyclic-adjacent orthogonality."""

    template = "Invalid pentagram: {context}"


class InvalidConcurrenceError(InputError):
    """Raised when a concurrence lies outside [0, 1]."""

    template = "Concurrence outside [0, 1]: {context}"


class OutOfRangeError(InputError):
    """Raised when a value lies outside the valid interval of an
    operation."""

    template = "Value out of range for {context}"


class NotCommutingError(InputError):
    """Raised when a joint measurement is requested for observables that do
    not commute."""

    template = "Observables do not commute: {context}"


class NotDichotomicError(InputError):
    """Raised when a sampled observable has eigenvalues other than +1/-1."""

    template = "Observable is not dichotomic: {context}"


########################################################################
# Computation errors
########################################################################


class ConvergenceFailureError(AppError):
    """Raised when a multi-start optimization has not settled."""

    template = "Optimizer did not converge in {context}"


class CollapseError(AppError):
    """Raised when a repeated projective measurement does not reproduce
    its first outcome."""

    template = "Inconsistent state collapse in {context}"


########################################################################
# Command-line errors
########################################################################


class StateParseError(InputError):
    """Raised when a state document cannot be parsed."""

    template = "Could not parse state field '{context}'"


class ConfigError(InputError):
    """Raised when a configuration document is malformed or out of range."""

    template = "Invalid configuration value '{context}'"


class OutputWriteError(AppError):
    """Raised when results cannot be written to the requested path."""

    template = "Failure writing: {context}"

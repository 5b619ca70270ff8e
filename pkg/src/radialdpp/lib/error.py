"""
A module for error classes in the program.

Classes:
    BaseError: Base error class.
    UnsupportedError: Exception raised for unsupported operations.
    DomainError: Exception raised when an argument lies outside an operation's domain.
    DataError: Exception raised for errors related to input data.
    DataInvalidError: Exception raised when input data is invalid.
    NumericalError: Exception raised when a numerical procedure fails.
    QuadratureError: Exception raised when adaptive quadrature does not converge.
    TruncationError: Exception raised when an index truncation cannot be certified.
    RegimeError: Exception raised when a scaling regime cannot be classified.
    ExperimentRejected: Exception raised when an experiment plan cannot be run.
"""

from typing import Optional


class BaseError(Exception):
    """Base error class."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class UnsupportedError(BaseError):
    """Exception raised for unsupported operations."""

    pass


class DomainError(BaseError, ValueError):
    """Exception raised when an argument lies outside an operation's domain."""

    pass


class DataError(BaseError):
    """Exception raised for errors related to input data."""

    pass


class DataInvalidError(DataError):
    """Exception raised when input data is invalid."""

    pass


class NumericalError(BaseError):
    """Exception raised when a numerical procedure fails."""

    pass


class QuadratureError(NumericalError):
    """
    Exception raised when adaptive quadrature does not converge.

    Attributes:
        value (float): The best estimate reached before giving up.
        error_estimate (float): The error estimate of `value`.
    """

    def __init__(
        self,
        message: str,
        value: Optional[float] = None,
        error_estimate: Optional[float] = None,
    ):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["value"] = self.value
        data["error_estimate"] = self.error_estimate
        return data


class TruncationError(NumericalError):
    """Exception raised when an index truncation cannot be certified."""

    pass


class RegimeError(BaseError):
    """Exception raised when a scaling regime cannot be classified."""

    pass


class ExperimentRejected(BaseError):
    """Exception raised when an experiment plan cannot be run."""

    pass

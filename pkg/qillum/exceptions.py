"""Error hierarchy shared by every qillum module.

Each error also derives from the closest built-in exception, so callers that
only know about ``ValueError`` or ``KeyError`` keep working.
"""
from typing import Any


class QIllumError(Exception):
    """Base class for all qillum errors."""


class InvalidDimensionError(QIllumError, ValueError):
    pass


class TruncationError(QIllumError, ValueError):
    """Raised when a Fock cutoff discards more probability than allowed."""

    def __init__(self, message: str, tail_mass: float | None = None) -> None:
        super().__init__(message)
        self.tail_mass = tail_mass


class DomainError(QIllumError, ValueError):
    pass


class ArgumentOrderError(DomainError):
    pass


class ConvergenceError(QIllumError, ArithmeticError):
    pass


class LabelCollisionError(QIllumError, KeyError):
    pass


class LabelNotFoundError(QIllumError, KeyError):
    pass


class DegenerateError(QIllumError, ZeroDivisionError):
    pass


class DegenerateMeasurementError(DegenerateError):
    pass


class SupportMismatchError(QIllumError, ValueError):
    pass


class InvalidBasisError(QIllumError, ValueError):
    pass


class HierarchyViolation(QIllumError, AssertionError):
    """Raised when error probabilities computed from QFI, CFI and SNR are not
    ordered.

    Args:
        message (str): Description of the violation.
        probabilities (tuple[float, float, float]): The offending triple
            ``(P(qfi), P(cfi), P(snr))``.
    """

    def __init__(
        self, message: str, probabilities: tuple[float, float, float]
    ) -> None:
        super().__init__(message)
        self.probabilities = probabilities


class VerificationError(QIllumError):
    """Raised by grid verification when one or more configurations fail.

    Args:
        failures (list[Any]): One entry per failing configuration, in grid
            order.
    """

    def __init__(self, failures: list[Any]) -> None:
        names = ", ".join(
            f"#{failure.index} ({type(failure.error).__name__})"
            for failure in failures
        )
        super().__init__(f"{len(failures)} configuration(s) failed: {names}")
        self.failures = failures

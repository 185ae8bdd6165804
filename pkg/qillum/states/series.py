"""Hypergeometric-type series behind the photon-added and photon-subtracted
probe normalizations.
"""
import math

from qillum.exceptions import ArgumentOrderError, DomainError
from qillum.utils import sum_ratio_series

PLUS = "plus"
MINUS = "minus"


def _check_kappa(kappa: int, name: str = "kappa") -> None:
    if int(kappa) != kappa or kappa < 0:
        raise DomainError(f"Invalid {name}: {kappa}. Must be an integer >= 0.")


def _check_unit_interval(x: float, name: str) -> None:
    if not 0.0 <= x < 1.0:
        raise DomainError(f"Invalid {name}: {x}. Must be in [0, 1).")


def gauss_2f1_diagonal(kappa: int, x: float) -> float:
    """``2F1(kappa + 1, kappa + 1; 1; x) = sum_n C(n + kappa, kappa)^2 x^n``.

    Args:
        kappa (int): Number of added or subtracted photons.
        x (float): Argument, ``z^2`` for the probe states.

    Raises:
        DomainError: If ``x`` is outside ``[0, 1)`` or ``kappa < 0``.
        ConvergenceError: If the series hits the term cap.

    Returns:
        float: The series value.
    """
    _check_kappa(kappa)
    _check_unit_interval(x, "x")
    if x == 0.0:
        return 1.0
    value, _ = sum_ratio_series(
        1.0, lambda n: ((n + 1 + kappa) / (n + 1)) ** 2 * x
    )
    return value


def normalization_factor(sign: str, kappa: int, iota: int, z: float) -> float:
    """Photon-number moment factors of the photon-added (``plus``) and
    photon-subtracted (``minus``) TMSV families.

    ``plus``:  ``(1 - z^2) sum_n z^(2n) (n + kappa)! (n + iota)! / (n!)^2``
    ``minus``: ``(1 - z^2) sum_{n >= kappa} z^(2n) (n!)^2 /
    ((n - kappa)! (n - iota)!)``

    Args:
        sign (str): "plus" or "minus".
        kappa (int): First order.
        iota (int): Second order.
        z (float): Squeezing parameter ``tanh r``.

    Raises:
        DomainError: On an unknown sign or out-of-range arguments.
        ArgumentOrderError: For ``minus`` with ``kappa < iota``.

    Returns:
        float: The converged factor.
    """
    _check_kappa(kappa)
    _check_kappa(iota, "iota")
    _check_unit_interval(z, "z")
    x = z * z
    if sign == PLUS:
        first = float(math.factorial(kappa) * math.factorial(iota))
        value, _ = sum_ratio_series(
            first, lambda n: x * (n + 1 + kappa) * (n + 1 + iota) / (n + 1) ** 2
        )
    elif sign == MINUS:
        if kappa < iota:
            raise ArgumentOrderError(
                f"Subtracted normalization needs kappa >= iota, got "
                + f"kappa={kappa}, iota={iota}"
            )
        if x == 0.0:
            return 1.0 if kappa == 0 else 0.0
        first = x**kappa * math.factorial(kappa) ** 2
        first /= math.factorial(kappa - iota)
        value, _ = sum_ratio_series(
            first,
            lambda n: x
            * (n + kappa + 1) ** 2
            / ((n + 1) * (n + kappa + 1 - iota)),
        )
    else:
        raise DomainError(f"Invalid sign: {sign!r}. Must be 'plus' or 'minus'.")
    return (1.0 - x) * value

import numpy as np

from qillum.exceptions import DegenerateError, DomainError
from qillum.states.probes import DiagonalSchmidtState, mean_photon
from qillum.states.series import MINUS, PLUS, normalization_factor


def g2_tmsv(N_S: float) -> float:
    if not N_S > 0.0:
        raise DomainError(f"g2 diverges at N_S={N_S}")
    return 2.0 + 1.0 / N_S


def g2_from_normalization_factors(sign: str, kappa: int, z: float) -> float:
    """Signal-idler cross-correlation written with the normalization factors
    of the photon-added (``plus``) or photon-subtracted (``minus``) family.
    Valid for every ``kappa >= 0``.

    Args:
        sign (str): "plus" or "minus".
        kappa (int): Number of added or subtracted photons.
        z (float): Squeezing parameter.

    Raises:
        DomainError: On an unknown sign.
        DegenerateError: If the mean photon number vanishes.

    Returns:
        float: ``<N_S N_I> / (<N_S> <N_I>)``.
    """
    if sign == PLUS:
        n_kk = normalization_factor(PLUS, kappa, kappa, z)
        n_k1k = normalization_factor(PLUS, kappa + 1, kappa, z)
        n_k1k1 = normalization_factor(PLUS, kappa + 1, kappa + 1, z)
        denominator = (n_k1k - n_kk) ** 2
        if denominator == 0.0:
            raise DegenerateError(f"g2 diverges for kappa={kappa}, z={z}")
        return 1.0 + (n_k1k1 * n_kk - n_k1k**2) / denominator
    if sign == MINUS:
        n_kk = normalization_factor(MINUS, kappa, kappa, z)
        n_k1k = normalization_factor(MINUS, kappa + 1, kappa, z)
        n_k1k1 = normalization_factor(MINUS, kappa + 1, kappa + 1, z)
        if n_k1k == 0.0:
            raise DegenerateError(f"g2 diverges for kappa={kappa}, z={z}")
        return n_k1k1 * n_kk / n_k1k**2
    raise DomainError(f"Invalid sign: {sign!r}. Must be 'plus' or 'minus'.")


def g2_schmidt(sign: str, kappa: int, z: float) -> float:
    if kappa == 0:
        x = z * z
        if x == 0.0:
            raise DomainError("g2 diverges for the twin vacuum")
        return g2_tmsv(x / (1.0 - x))
    return g2_from_normalization_factors(sign, kappa, z)


def g2_fock_sum(state: DiagonalSchmidtState) -> float:
    """``sum c_m^2 m^2 / (sum c_m^2 m)^2`` evaluated on the amplitudes."""
    N_S = mean_photon(state)
    if N_S == 0.0:
        raise DomainError("g2 diverges at N_S=0")
    second = float(np.dot(state.probabilities, state.joint_photons**2))
    return second / N_S**2

"""Closed-form figures of merit in the small-reflectivity limit.

Moments are reported in the convention where the reflected mode gains
``+eta a_S``, so a matched measurement has ``mu1 >= mu0``.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np
from scipy import special
from typing_extensions import Self

from qillum.constants import (
    DEFAULT_ETA,
    HIERARCHY_TOL,
    MAX_SMALL_ETA,
    OPTIMALITY_RTOL_ANALYTIC,
)
from qillum.exceptions import DegenerateMeasurementError, DomainError
from qillum.states.probes import DiagonalSchmidtState, mean_photon
from qillum.states.series import MINUS, PLUS


@dataclass(frozen=True)
class EnvironmentSpec:
    N_B: float
    eta: float = DEFAULT_ETA
    M: int = 1

    def __post_init__(self) -> None:
        if not self.N_B >= 0.0:
            raise DomainError(f"Invalid N_B: {self.N_B}. Must be >= 0.")
        if not 0.0 <= self.eta <= MAX_SMALL_ETA:
            raise DomainError(
                f"Invalid eta: {self.eta}. Must be in [0, {MAX_SMALL_ETA}] "
                + "for the small-reflectivity formulas."
            )
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"Invalid M: {self.M}. Must be an integer >= 1.")

    @property
    def reflectivity(self) -> float:
        return math.sin(self.eta) ** 2


@dataclass(frozen=True)
class MeasurementMoments:
    """Mean and variance of a single-copy measurement outcome under H0 (no
    object) and H1 (object present with reflectivity amplitude ``eta``).
    """

    mu0: float
    mu1: float
    var0: float
    var1: float
    eta: float

    def __post_init__(self) -> None:
        if self.var0 < 0.0 or self.var1 < 0.0:
            raise DomainError(
                f"Negative variance: var0={self.var0}, var1={self.var1}"
            )

    @property
    def sigma0(self) -> float:
        return math.sqrt(self.var0)

    @property
    def sigma1(self) -> float:
        return math.sqrt(self.var1)

    @property
    def gap(self) -> float:
        return self.mu1 - self.mu0

    def to_dict(self) -> dict:
        return {
            "mu0": self.mu0,
            "mu1": self.mu1,
            "var0": self.var0,
            "var1": self.var1,
            "eta": self.eta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        keys = ("mu0", "mu1", "var0", "var1", "eta")
        return cls(**{k: data[k] for k in keys})


@dataclass(frozen=True)
class FisherReport:
    """Analytic QFI of one configuration alongside whatever the oracle
    computed for it.
    """

    qfi_analytic: float
    qfi_oracle: float | None = None
    cfi: float | None = None
    snr_over_eta: float | None = None
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def relative_discrepancy(self) -> float | None:
        if self.qfi_oracle is None:
            return None
        if self.qfi_analytic == 0.0:
            return abs(self.qfi_oracle)
        return abs(self.qfi_analytic - self.qfi_oracle) / self.qfi_analytic

    def hierarchy_ok(self, tol: float = HIERARCHY_TOL) -> bool:
        """``4 (snr / eta)^2 <= cfi <= qfi`` for whichever terms are present.

        The CFI is compared with the oracle QFI when there is one, since both
        come from the same truncated model.
        """
        ok = True
        if self.snr_over_eta is not None and self.cfi is not None:
            ok &= 4.0 * self.snr_over_eta**2 <= self.cfi + tol
        if self.cfi is not None:
            qfi = self.qfi_oracle
            if qfi is None:
                qfi = self.qfi_analytic
            ok &= self.cfi <= qfi + tol
        return bool(ok)

    def to_dict(self) -> dict:
        return {
            "qfi_analytic": self.qfi_analytic,
            "qfi_oracle": self.qfi_oracle,
            "cfi": self.cfi,
            "snr_over_eta": self.snr_over_eta,
            "relative_discrepancy": self.relative_discrepancy,
            "config": dict(self.config),
        }


def _thermal_ratio(N_B: float) -> float:
    if not N_B >= 0.0:
        raise DomainError(f"Invalid N_B: {N_B}. Must be >= 0.")
    return N_B / (1.0 + N_B)


def qfi_ci(a_expect: complex, N_B: float) -> float:
    """QFI of classical illumination, ``4 |<a_S>|^2 / (2 N_B + 1)``."""
    _thermal_ratio(N_B)
    return 4.0 * abs(a_expect) ** 2 / (2.0 * N_B + 1.0)


def qfi_coherent(N_S: float, N_B: float) -> float:
    return qfi_ci(math.sqrt(N_S), N_B)


def qfi_tmsv(N_S: float, N_B: float) -> float:
    """TMSV QFI, ``4 N_S / (1 + N_B) / (1 + x t)`` with ``x = N_S/(1+N_S)``
    and ``t = N_B/(1+N_B)``.
    """
    if N_S < 0.0:
        raise DomainError(f"Invalid N_S: {N_S}. Must be >= 0.")
    t = _thermal_ratio(N_B)
    x = N_S / (1.0 + N_S)
    return 4.0 * N_S / (1.0 + N_B) / (1.0 + x * t)


def qfi_schmidt(state: DiagonalSchmidtState, N_B: float) -> float:
    """QFI of any diagonal Schmidt probe,
    ``4/(1+N_B) sum_m (c_{m-1} c_m)^2 m / (c_{m-1}^2 + c_m^2 t)``.

    Pairs where both amplitudes vanish contribute nothing.
    """
    t = _thermal_ratio(N_B)
    c = state.amplitudes
    if c.size < 2:
        return 0.0
    lower = c[:-1] ** 2
    upper = c[1:] ** 2
    m = state.joint_photons[1:]
    denominator = lower + upper * t
    mask = denominator > 0.0
    terms = lower[mask] * upper[mask] * m[mask] / denominator[mask]
    return float(4.0 / (1.0 + N_B) * terms.sum())


def _x_psi(sign: str) -> float:
    if sign == PLUS:
        return 2.0
    if sign == MINUS:
        return 1.0
    raise DomainError(f"Invalid sign: {sign!r}. Must be 'plus' or 'minus'.")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Invalid p: {p}. Must be in [0, 1].")


def qfi_psi(p: float, sign: str, N_B: float) -> float:
    _check_p(p)
    x = _x_psi(sign)
    t = _thermal_ratio(N_B)
    return 4.0 * x / (1.0 + N_B) * p * (1.0 - p) / ((1.0 - p) + p * t)


def averaged_qfi(qfi: float, N_S: float) -> float:
    if not N_S > 0.0:
        raise DomainError(f"Averaged QFI undefined at N_S={N_S}")
    return qfi / N_S


def averaged_qfi_psi(p: float, sign: str, N_B: float) -> float:
    """``F / N_S`` for the toy states, finite at ``p = 0`` for ``minus``."""
    _check_p(p)
    x = _x_psi(sign)
    t = _thermal_ratio(N_B)
    prefactor = 4.0 * x / (1.0 + N_B) * (1.0 - p) / ((1.0 - p) + p * t)
    if sign == MINUS:
        return prefactor
    return prefactor * p / (1.0 + p)


def psi_plus_optimum(N_B: float) -> float:
    """Maximizer of ``F_plus / N_S`` over ``p``, the root in ``[0, 1]`` of
    ``1 - 2p + (2s - 1) p^2`` with ``s = 1 / (1 + N_B)``.
    """
    _thermal_ratio(N_B)
    return (1.0 + N_B) / (1.0 + N_B + math.sqrt(2.0 * N_B * (1.0 + N_B)))


def moments_quadrature(
    a_expect: complex, phi: float, N_B: float, eta: float = DEFAULT_ETA
) -> MeasurementMoments:
    """Moments of the reflected quadrature ``a_R e^(-i phi) + h.c.``."""
    _thermal_ratio(N_B)
    theta = cmath.phase(a_expect) if a_expect != 0 else 0.0
    variance = 1.0 + 2.0 * N_B
    return MeasurementMoments(
        mu0=0.0,
        mu1=2.0 * eta * abs(a_expect) * math.cos(phi - theta),
        var0=variance,
        var1=variance,
        eta=eta,
    )


def moments_joint_photon(
    state: DiagonalSchmidtState, N_B: float, eta: float = DEFAULT_ETA
) -> MeasurementMoments:
    """Moments of ``a_R a_I + a_R^dag a_I^dag``."""
    _thermal_ratio(N_B)
    c = state.amplitudes
    cross = float(np.sum(c[1:] * c[:-1] * state.joint_photons[1:]))
    N_S = mean_photon(state)
    variance = N_S * N_B + (1.0 + N_S) * (1.0 + N_B)
    return MeasurementMoments(
        mu0=0.0, mu1=2.0 * eta * cross, var0=variance, var1=variance, eta=eta
    )


def snr(moments: MeasurementMoments) -> float:
    denominator = moments.sigma0 + moments.sigma1
    if denominator == 0.0:
        raise DegenerateMeasurementError(
            "SNR undefined: both variances vanish"
        )
    return moments.gap / denominator


class SnrErrorBounds(NamedTuple):
    erfc_form: float
    exponential_form: float
    chernoff_form: float


def perr_from_snr(R: float, M: int) -> float:
    """Minimum error probability ``erfc(sqrt(M / 2) R) / 2`` of the Gaussian
    threshold test.

    ``scipy.special.erfc`` evaluates the Cephes rational and continued
    fraction approximations, accurate to better than 1e-14 absolute.
    """
    if R < 0.0 or M < 1:
        raise DomainError(f"Invalid R={R} or M={M}")
    return float(0.5 * special.erfc(math.sqrt(M / 2.0) * R))


def exponential_bound(R: float, M: int) -> float:
    """``exp(-M R^2 / 2) / 4``; above ``EXPONENTIAL_BOUND_CROSSOVER`` in
    ``sqrt(M / 2) R`` it bounds ``perr_from_snr`` from above.
    """
    return 0.25 * math.exp(-M * R * R / 2.0)


def chernoff_bound(R: float, M: int) -> float:
    """``exp(-M R^2 / 2) / 2``, an upper bound on ``perr_from_snr`` for every
    ``R >= 0``.
    """
    return 0.5 * math.exp(-M * R * R / 2.0)


def snr_error_bounds(R: float, M: int) -> SnrErrorBounds:
    return SnrErrorBounds(
        perr_from_snr(R, M), exponential_bound(R, M), chernoff_bound(R, M)
    )


def perr_from_fisher(F: float, eta: float, M: int) -> float:
    """``exp(-eta^2 M F / 8) / 4``; the same form serves quantum and classical
    Fisher information.
    """
    if F < 0.0:
        raise DomainError(f"Invalid Fisher information: {F}")
    return 0.25 * math.exp(-(eta**2) * M * F / 8.0)


def optimality_gap(moments: MeasurementMoments, qfi: float) -> float:
    """``snr / eta - sqrt(qfi) / 2``; zero certifies the measurement optimal."""
    if not moments.eta > 0.0:
        raise DomainError(f"Optimality gap needs eta > 0, got {moments.eta}")
    return snr(moments) / moments.eta - math.sqrt(qfi) / 2.0


def relative_optimality_gap(moments: MeasurementMoments, qfi: float) -> float:
    scale = math.sqrt(qfi) / 2.0
    if scale == 0.0:
        raise DegenerateMeasurementError("Relative gap undefined at zero QFI")
    return optimality_gap(moments, qfi) / scale


def is_optimal(
    moments: MeasurementMoments,
    qfi: float,
    rtol: float = OPTIMALITY_RTOL_ANALYTIC,
) -> bool:
    return abs(relative_optimality_gap(moments, qfi)) < rtol


def quantum_advantage(qfi_probe: float, N_S: float, N_B: float) -> float:
    """Ratio of a probe's QFI to the coherent-state QFI at equal energy."""
    if not N_S > 0.0:
        raise DomainError(f"Quantum advantage undefined at N_S={N_S}")
    return qfi_probe / qfi_coherent(N_S, N_B)

"""One object per probe configuration, exposing every analytic figure of merit
the sweeps and reports need.
"""
import math
from dataclasses import dataclass

from qillum.analytics.correlation import g2_fock_sum, g2_schmidt, g2_tmsv
from qillum.analytics.metrics import (
    MeasurementMoments,
    averaged_qfi,
    averaged_qfi_psi,
    moments_joint_photon,
    moments_quadrature,
    qfi_ci,
    qfi_psi,
    qfi_schmidt,
    qfi_tmsv,
    quantum_advantage,
    snr,
)
from qillum.constants import (
    CI_FAMILIES,
    DEFAULT_ETA,
    FAMILIES,
    PSI_FAMILIES,
)
from qillum.exceptions import DomainError
from qillum.fock.core import TruncationSpec
from qillum.states.probes import (
    DiagonalSchmidtState,
    GeneralizedCoherent,
    PsiToyState,
    coherent_a_expectation,
    mean_photon,
    schmidt_for_mean_photon,
    schmidt_state,
)
from qillum.states.series import MINUS, PLUS

VARIANT_OF = {
    "tmsv": "tmsv",
    "mpa": "photon_added",
    "mps": "photon_subtracted",
}
SIGN_OF = {"mpa": PLUS, "mps": MINUS, "psi_plus": PLUS, "psi_minus": MINUS}


@dataclass(frozen=True, eq=False)
class ProbeModel:
    family: str
    N_B: float
    kappa: int = 0
    coherent: GeneralizedCoherent | None = None
    schmidt: DiagonalSchmidtState | None = None
    psi: PsiToyState | None = None
    phi: float | None = None

    @property
    def is_ci(self) -> bool:
        return self.family in CI_FAMILIES

    @property
    def a_expect(self) -> complex:
        if self.coherent is None:
            return 0j
        return coherent_a_expectation(self.coherent)

    @property
    def z(self) -> float | None:
        return None if self.schmidt is None else self.schmidt.z

    @property
    def mean_photon(self) -> float:
        if self.coherent is not None:
            return self.coherent.mean_photons
        if self.psi is not None:
            return self.psi.mean_photon
        if self.family == "tmsv" or self.kappa == 0:
            x = self.schmidt.z**2
            return x / (1.0 - x)
        return mean_photon(self.schmidt)

    @property
    def diagonal_state(self) -> DiagonalSchmidtState | None:
        if self.psi is not None:
            return self.psi.schmidt()
        return self.schmidt

    def qfi(self) -> float:
        if self.is_ci:
            return qfi_ci(self.a_expect, self.N_B)
        if self.psi is not None:
            return qfi_psi(self.psi.p, self.psi.sign, self.N_B)
        if self.family == "tmsv" or self.kappa == 0:
            return qfi_tmsv(self.mean_photon, self.N_B)
        return qfi_schmidt(self.schmidt, self.N_B)

    def averaged_qfi(self) -> float:
        if self.psi is not None:
            return averaged_qfi_psi(self.psi.p, self.psi.sign, self.N_B)
        return averaged_qfi(self.qfi(), self.mean_photon)

    def moments(self, eta: float = DEFAULT_ETA) -> MeasurementMoments:
        """Moments of the family's natural measurement: the quadrature at
        ``phi`` (matched to ``<a_S>`` by default) for classical illumination,
        the joint-photon observable otherwise.
        """
        if self.is_ci:
            a = self.a_expect
            phi = self.phi
            if phi is None:
                phi = math.atan2(a.imag, a.real) if a != 0 else 0.0
            return moments_quadrature(a, phi, self.N_B, eta)
        return moments_joint_photon(self.diagonal_state, self.N_B, eta)

    def snr_over_eta(self, eta: float = DEFAULT_ETA) -> float:
        return snr(self.moments(eta)) / eta

    def advantage(self) -> float:
        return quantum_advantage(self.qfi(), self.mean_photon, self.N_B)

    def g2(self) -> float:
        if self.is_ci:
            raise DomainError(f"g2 is not defined for the {self.family} family")
        if self.psi is not None:
            return g2_fock_sum(self.psi.schmidt())
        if self.family == "tmsv" or self.kappa == 0:
            return g2_tmsv(self.mean_photon)
        return g2_schmidt(SIGN_OF[self.family], self.kappa, self.schmidt.z)

    def describe(self) -> dict:
        out: dict = {"family": self.family, "N_B": self.N_B}
        if self.coherent is not None:
            out.update(
                alpha=self.coherent.alpha,
                chi=self.coherent.chi,
                epsilon=self.coherent.epsilon,
                a_expect=self.a_expect,
            )
        if self.schmidt is not None:
            out.update(kappa=self.kappa, z=self.schmidt.z)
        if self.psi is not None:
            out.update(p=self.psi.p)
        if self.phi is not None:
            out.update(phi=self.phi)
        out["N_S"] = self.mean_photon
        return out


def build_probe(
    family: str,
    N_B: float,
    *,
    kappa: int = 0,
    z: float | None = None,
    N_S: float | None = None,
    alpha: complex | None = None,
    chi: float = 0.0,
    epsilon: float = 1.0,
    p: float | None = None,
    phi: float | None = None,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> ProbeModel:
    """Build a probe from whichever parameters identify it.

    Args:
        family (str): One of ``FAMILIES``.
        N_B (float): Mean thermal photon number.
        kappa (int): Photons added or subtracted; 0 means plain TMSV.
        z (float | None): Squeezing ``tanh r`` of Schmidt families.
        N_S (float | None): Mean signal photons; used when ``z``, ``alpha``
            or ``p`` is not given.
        alpha (complex | None): Coherent amplitude.
        chi (float): Nonlinear phase of generalized coherent states.
        epsilon (float): Exponent of the nonlinear phase.
        p (float | None): Toy-state weight.
        phi (float | None): Quadrature phase; matched when omitted.
        trunc (TruncationSpec | None): Explicit Fock cutoffs.
        tail_tolerance (float | None): Tail target for automatic cutoffs.

    Raises:
        DomainError: On an unknown family or missing parameters.

    Returns:
        ProbeModel: The configured probe.
    """
    if family not in FAMILIES:
        raise DomainError(f"Invalid family: {family!r}. Must be in {FAMILIES}.")
    if not N_B >= 0.0:
        raise DomainError(f"Invalid N_B: {N_B}. Must be >= 0.")
    if family in CI_FAMILIES:
        if alpha is None:
            if N_S is None:
                raise DomainError(f"{family} probe needs alpha or N_S")
            alpha = math.sqrt(N_S)
        if family == "coherent":
            chi, epsilon = 0.0, 1.0
        options: dict = {"alpha": alpha, "chi": chi, "epsilon": epsilon}
        if trunc is not None:
            options["cutoff"] = trunc.dim_signal
            options["tail_tolerance"] = trunc.tail_tolerance
        elif tail_tolerance is not None:
            options["tail_tolerance"] = tail_tolerance
        return ProbeModel(
            family, N_B, coherent=GeneralizedCoherent(**options), phi=phi
        )
    if family in PSI_FAMILIES:
        sign = SIGN_OF[family]
        if p is None:
            if N_S is None:
                raise DomainError(f"{family} probe needs p or N_S")
            p = N_S - (1.0 if sign == PLUS else 0.0)
        return ProbeModel(family, N_B, psi=PsiToyState(p, sign))
    if family == "tmsv":
        kappa = 0
    if int(kappa) != kappa or kappa < 0:
        raise DomainError(f"Invalid kappa: {kappa}. Must be an integer >= 0.")
    variant = "tmsv" if kappa == 0 else VARIANT_OF[family]
    if z is None:
        if N_S is None:
            raise DomainError(f"{family} probe needs z or N_S")
        z = schmidt_for_mean_photon(variant, kappa, N_S, tail_tolerance)
    state = schmidt_state(variant, z, kappa, trunc, tail_tolerance)
    return ProbeModel(family, N_B, kappa=kappa, schmidt=state)

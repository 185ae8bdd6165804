"""Closed-form QFI checked against the truncated-Fock oracle, one
configuration at a time or over a grid.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

from typing_extensions import Self

from qillum.analytics.families import ProbeModel, build_probe
from qillum.analytics.metrics import FisherReport, snr
from qillum.constants import (
    DEFAULT_ETA,
    DEFAULT_TAIL_TOLERANCE,
    FAMILIES,
)
from qillum.exceptions import DomainError, QIllumError, VerificationError
from qillum.fock.core import TruncationSpec, thermal_cutoff
from qillum.oracle.sld import (
    DerivativeAtZero,
    cfi_measurement,
    derivative_ci,
    derivative_schmidt,
    moments_numeric,
    natural_observable,
    qfi_numeric,
)
from qillum.utils import parse_complex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    """One probe in one environment, as read from a verification grid.

    ``cutoff`` fixes the signal and idler truncation; ``dim_bath`` fixes the
    bath truncation. Either left out is chosen from ``tail_tolerance``.
    """

    family: str
    N_B: float
    kappa: int = 0
    z: float | None = None
    N_S: float | None = None
    alpha: complex | None = None
    chi: float = 0.0
    epsilon: float = 1.0
    p: float | None = None
    phi: float | None = None
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    cutoff: int | None = None
    dim_bath: int | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(
                f"Invalid family: {self.family!r}. Must be in {FAMILIES}."
            )
        if self.alpha is not None:
            object.__setattr__(self, "alpha", parse_complex(self.alpha))

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise DomainError(f"Unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def truncation(self) -> TruncationSpec | None:
        if self.cutoff is None:
            return None
        dim_bath = self.dim_bath or thermal_cutoff(
            self.N_B, self.tail_tolerance, weighted=True
        )
        return TruncationSpec(
            self.cutoff, self.cutoff, dim_bath, self.tail_tolerance
        )

    def probe(self) -> ProbeModel:
        return build_probe(
            self.family,
            self.N_B,
            kappa=self.kappa,
            z=self.z,
            N_S=self.N_S,
            alpha=self.alpha,
            chi=self.chi,
            epsilon=self.epsilon,
            p=self.p,
            phi=self.phi,
            trunc=self.truncation(),
            tail_tolerance=self.tail_tolerance,
        )


def derivative_for(
    config: OracleConfig, probe: ProbeModel
) -> DerivativeAtZero:
    """The oracle derivative matching ``probe``, with the configuration's
    cutoffs.
    """
    trunc = config.truncation()
    if probe.is_ci:
        dim_bath = trunc.dim_bath if trunc is not None else config.dim_bath
        return derivative_ci(
            probe.a_expect, config.N_B, dim_bath, config.tail_tolerance
        )
    state = probe.diagonal_state
    if trunc is None and config.dim_bath is not None:
        dim = max(2, state.m_max + 1)
        trunc = TruncationSpec(dim, dim, config.dim_bath, config.tail_tolerance)
    return derivative_schmidt(
        state, config.N_B, trunc, tail_tolerance=config.tail_tolerance
    )


def _matched_phase(probe: ProbeModel) -> float:
    if probe.phi is not None:
        return probe.phi
    a = probe.a_expect
    return math.atan2(a.imag, a.real) if a != 0 else 0.0


def run_configuration(
    config: OracleConfig, oracle: bool = True, eta: float = DEFAULT_ETA
) -> FisherReport:
    """Evaluate one configuration.

    Without the oracle only the closed forms are reported. With it the QFI is
    recomputed on the truncated model, and the SNR and CFI of the family's
    natural measurement (quadrature for single-mode probes, joint-photon
    observable otherwise) are computed on the same model.

    Args:
        config (OracleConfig): The configuration.
        oracle (bool): Run the numerical oracle. Defaults to True.
        eta (float): Reflectivity amplitude for the SNR. Defaults to
            DEFAULT_ETA.

    Returns:
        FisherReport: The analytic and numerical figures of merit.
    """
    probe = config.probe()
    description = config.to_dict()
    description["N_S"] = probe.mean_photon
    qfi_analytic = probe.qfi()
    if not oracle:
        return FisherReport(
            qfi_analytic=qfi_analytic,
            snr_over_eta=probe.snr_over_eta(eta),
            config=description,
        )
    d = derivative_for(config, probe)
    observable = natural_observable(d, _matched_phase(probe))
    moments = moments_numeric(d, observable, eta)
    report = FisherReport(
        qfi_analytic=qfi_analytic,
        qfi_oracle=qfi_numeric(d),
        cfi=cfi_measurement(d, observable),
        snr_over_eta=snr(moments) / eta,
        config=description,
    )
    logger.info(
        "%s N_B=%s kappa=%s: analytic %.12g oracle %.12g (rel %.3g)",
        config.family,
        config.N_B,
        config.kappa,
        report.qfi_analytic,
        report.qfi_oracle,
        report.relative_discrepancy,
    )
    return report


def default_grid() -> list[OracleConfig]:
    """Every ``kappa`` in 0..3, ``z`` in {0.1, 0.3, 0.5, 0.7} and ``N_B`` in
    {0.5, 1, 10}, with both photon-added and photon-subtracted states for
    ``kappa >= 1``, followed by single-mode and toy probes at the same ``N_B``.
    """
    grid: list[OracleConfig] = []
    backgrounds = (0.5, 1.0, 10.0)
    for kappa in range(4):
        families = ("tmsv",) if kappa == 0 else ("mpa", "mps")
        for family in families:
            for z in (0.1, 0.3, 0.5, 0.7):
                for N_B in backgrounds:
                    grid.append(OracleConfig(family, N_B, kappa=kappa, z=z))
    for N_B in backgrounds:
        grid.append(OracleConfig("coherent", N_B, N_S=1.0))
        grid.append(
            OracleConfig(
                "generalized_coherent",
                N_B,
                alpha=1.5,
                chi=math.pi / 3.0,
                epsilon=2.0,
            )
        )
        grid.append(OracleConfig("psi_plus", N_B, p=0.4))
        grid.append(OracleConfig("psi_minus", N_B, p=0.4))
    return grid


class ConfigurationFailure(NamedTuple):
    index: int
    config: OracleConfig
    error: QIllumError


def _run_guarded(
    item: tuple[int, OracleConfig], oracle: bool
) -> FisherReport | ConfigurationFailure:
    index, config = item
    try:
        return run_configuration(config, oracle=oracle)
    except QIllumError as error:
        logger.warning(
            "Configuration #%d (%s) failed: %s", index, config.family, error
        )
        return ConfigurationFailure(index, config, error)


def verify_closed_forms(
    grid: Sequence[OracleConfig],
    workers: int | None = None,
    oracle: bool = True,
) -> list[FisherReport]:
    """Run every configuration of ``grid`` and report them in grid order.

    Args:
        grid (Sequence[OracleConfig]): The configurations.
        workers (int | None): Thread count; None or 1 runs serially.
        oracle (bool): Run the numerical oracle. Defaults to True.

    Raises:
        VerificationError: After the whole grid ran, if any configuration
            raised. The error lists each failing index, configuration and
            exception.

    Returns:
        list[FisherReport]: One report per configuration.
    """
    items = list(enumerate(grid))

    def run(
        item: tuple[int, OracleConfig]
    ) -> FisherReport | ConfigurationFailure:
        return _run_guarded(item, oracle)

    if workers is None or workers <= 1:
        outcomes = [run(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(run, items))
    failures = [o for o in outcomes if isinstance(o, ConfigurationFailure)]
    if failures:
        raise VerificationError(failures)
    return [o for o in outcomes if isinstance(o, FisherReport)]

"""Monte Carlo estimate of the error rates of the M-copy threshold test.

The collective outcome of ``M`` copies is drawn directly from its Gaussian
limit, ``Normal(M mu_x, M var_x)`` under hypothesis ``x``. Trials are split in
fixed-size chunks; chunk ``i`` draws from child ``i`` of
``SeedSequence(seed)``, so results do not depend on the worker count.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qillum.analytics.families import ProbeModel
from qillum.analytics.metrics import (
    MeasurementMoments,
    chernoff_bound,
    exponential_bound,
    perr_from_fisher,
    perr_from_snr,
    snr,
)
from qillum.constants import DEFAULT_CHUNK, HIERARCHY_SLACK
from qillum.exceptions import (
    DegenerateMeasurementError,
    DomainError,
    HierarchyViolation,
)

logger = logging.getLogger(__name__)

MAX_SEED = 2**64


@dataclass(frozen=True)
class CampaignSpec:
    moments: MeasurementMoments
    M: int
    trials: int
    seed: int
    chunk_size: int = DEFAULT_CHUNK
    workers: int | None = None

    def __post_init__(self) -> None:
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"Invalid M: {self.M}. Must be an integer >= 1.")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(
                f"Invalid trials: {self.trials}. Must be an integer >= 1."
            )
        if int(self.seed) != self.seed or not 0 <= self.seed < MAX_SEED:
            raise DomainError(
                f"Invalid seed: {self.seed}. Must be an unsigned 64-bit "
                + "integer."
            )
        if self.chunk_size < 1:
            raise DomainError(f"Invalid chunk_size: {self.chunk_size}.")
        if self.moments.sigma0 == 0.0 or self.moments.sigma1 == 0.0:
            raise DegenerateMeasurementError(
                "Campaign needs nonzero variance under both hypotheses"
            )
        if self.moments.mu1 < self.moments.mu0:
            raise DomainError(
                f"mu1={self.moments.mu1} < mu0={self.moments.mu0}: relabel the "
                + "outcomes so that H1 has the larger mean"
            )

    def to_dict(self) -> dict:
        return {
            "moments": self.moments.to_dict(),
            "M": self.M,
            "trials": self.trials,
            "seed": self.seed,
            "chunk_size": self.chunk_size,
        }


@dataclass(frozen=True)
class CampaignResult:
    empirical_false_alarm: float
    empirical_miss: float
    empirical_perr: float
    analytic_perr: float
    stderr: float
    threshold: float
    trials: int
    snr: float
    exponential_bound: float
    chernoff_bound: float

    def to_dict(self) -> dict:
        return {
            "empirical_false_alarm": self.empirical_false_alarm,
            "empirical_miss": self.empirical_miss,
            "empirical_perr": self.empirical_perr,
            "analytic_perr": self.analytic_perr,
            "stderr": self.stderr,
            "threshold": self.threshold,
            "trials": self.trials,
            "snr": self.snr,
            "exponential_bound": self.exponential_bound,
            "chernoff_bound": self.chernoff_bound,
        }


def threshold(moments: MeasurementMoments, M: int) -> float:
    """Decision threshold ``M (s0 mu1 + s1 mu0) / (s0 + s1)`` on the summed
    outcome, minimizing the Gaussian error probability.

    Args:
        moments (MeasurementMoments): Single-copy moments.
        M (int): Number of copies.

    Raises:
        DegenerateMeasurementError: If both standard deviations vanish.

    Returns:
        float: The threshold.
    """
    s0, s1 = moments.sigma0, moments.sigma1
    if s0 + s1 == 0.0:
        raise DegenerateMeasurementError(
            "Threshold undefined: both variances vanish"
        )
    return M * (s0 * moments.mu1 + s1 * moments.mu0) / (s0 + s1)


def _count_errors(
    spec: CampaignSpec, cut: float, size: int, seq: np.random.SeedSequence
) -> tuple[int, int]:
    """False alarms and misses of one chunk of ``size`` decisions."""
    h0, h1 = (np.random.default_rng(s) for s in seq.spawn(2))
    scale = math.sqrt(spec.M)
    m = spec.moments
    null = h0.normal(spec.M * m.mu0, scale * m.sigma0, size)
    present = h1.normal(spec.M * m.mu1, scale * m.sigma1, size)
    return int(np.count_nonzero(null >= cut)), int(
        np.count_nonzero(present < cut)
    )


def run_campaign(spec: CampaignSpec) -> CampaignResult:
    """Simulate ``spec.trials`` decisions under each hypothesis.

    Args:
        spec (CampaignSpec): The campaign.

    Returns:
        CampaignResult: Empirical rates with their analytic counterparts.
    """
    cut = threshold(spec.moments, spec.M)
    n_chunks = math.ceil(spec.trials / spec.chunk_size)
    sizes = [spec.chunk_size] * (n_chunks - 1)
    sizes.append(spec.trials - spec.chunk_size * (n_chunks - 1))
    children = np.random.SeedSequence(spec.seed).spawn(n_chunks)
    logger.debug(
        "Campaign seed=%d: %d chunks over %s workers",
        spec.seed,
        n_chunks,
        spec.workers or 1,
    )

    def run(item: tuple[int, np.random.SeedSequence]) -> tuple[int, int]:
        size, seq = item
        return _count_errors(spec, cut, size, seq)

    items = list(zip(sizes, children))
    if spec.workers is None or spec.workers <= 1:
        counts = [run(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as executor:
            counts = list(executor.map(run, items))
    false_alarms = sum(c[0] for c in counts)
    misses = sum(c[1] for c in counts)

    p_fa = false_alarms / spec.trials
    p_miss = misses / spec.trials
    se_fa = math.sqrt(p_fa * (1.0 - p_fa) / spec.trials)
    se_miss = math.sqrt(p_miss * (1.0 - p_miss) / spec.trials)
    R = snr(spec.moments)
    return CampaignResult(
        empirical_false_alarm=p_fa,
        empirical_miss=p_miss,
        empirical_perr=(p_fa + p_miss) / 2.0,
        analytic_perr=perr_from_snr(R, spec.M),
        stderr=0.5 * math.sqrt(se_fa**2 + se_miss**2),
        threshold=cut,
        trials=spec.trials,
        snr=R,
        exponential_bound=exponential_bound(R, spec.M),
        chernoff_bound=chernoff_bound(R, spec.M),
    )


class HierarchyCheck(NamedTuple):
    p_qfi: float
    p_cfi: float
    p_snr: float
    ordered: bool


def bound_hierarchy_check(
    moments: MeasurementMoments,
    qfi: float,
    cfi: float,
    eta: float,
    M: int,
    raise_on_violation: bool = True,
) -> HierarchyCheck:
    """Error-probability bounds from the QFI, the CFI and the SNR, which must
    be nondecreasing in that order.

    Args:
        moments (MeasurementMoments): Moments of the measurement.
        qfi (float): Quantum Fisher information of the probe.
        cfi (float): Classical Fisher information of the measurement.
        eta (float): Reflectivity amplitude.
        M (int): Number of copies.
        raise_on_violation (bool): Raise instead of returning an unordered
            result. Defaults to True.

    Raises:
        HierarchyViolation: If the order fails by more than HIERARCHY_SLACK.

    Returns:
        HierarchyCheck: The three bounds and whether they are ordered.
    """
    p_qfi = perr_from_fisher(qfi, eta, M)
    p_cfi = perr_from_fisher(cfi, eta, M)
    p_snr = exponential_bound(snr(moments), M)
    ordered = (
        p_qfi <= p_cfi + HIERARCHY_SLACK and p_cfi <= p_snr + HIERARCHY_SLACK
    )
    if not ordered and raise_on_violation:
        raise HierarchyViolation(
            f"Error bounds out of order: P(qfi)={p_qfi:.15g}, "
            + f"P(cfi)={p_cfi:.15g}, P(snr)={p_snr:.15g}",
            (p_qfi, p_cfi, p_snr),
        )
    return HierarchyCheck(p_qfi, p_cfi, p_snr, ordered)


def campaign_from_probe(
    probe: ProbeModel,
    eta: float,
    M: int,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int | None = None,
) -> CampaignSpec:
    return CampaignSpec(
        moments=probe.moments(eta),
        M=M,
        trials=trials,
        seed=seed,
        chunk_size=chunk_size,
        workers=workers,
    )

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize, stats
from typing_extensions import Self

from qillum.constants import DEFAULT_TAIL_TOLERANCE, SERIES_MAX_TERMS
from qillum.exceptions import ConvergenceError, DomainError, TruncationError
from qillum.fock.core import DenseOperator, TruncationSpec
from qillum.states.series import MINUS, PLUS, gauss_2f1_diagonal
from qillum.utils import binomial_recurrence, parse_complex, sum_ratio_series

logger = logging.getLogger(__name__)

Variant = Literal["tmsv", "photon_added", "photon_subtracted", "custom"]
Sign = Literal["plus", "minus"]

VARIANTS = ("tmsv", "photon_added", "photon_subtracted", "custom")


@dataclass(frozen=True, eq=False)
class DiagonalSchmidtState:
    """Probe ``sum_m c_m |m, m>`` with real amplitudes on the joint photon
    numbers ``m = m_min .. m_min + len(amplitudes) - 1``.

    TMSV, photon-added and photon-subtracted TMSV all share this form: the
    photon-added amplitudes sit at ``m = n + kappa`` and the photon-subtracted
    ones at ``m = n - kappa``.
    """

    m_min: int
    amplitudes: np.ndarray = field(repr=False)
    z: float | None
    kappa: int
    variant: Variant
    tail_mass: float = 0.0
    normalizer: float = 1.0

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=float)
        if amplitudes.ndim != 1 or amplitudes.size == 0:
            raise DomainError("Amplitudes must be a nonempty vector")
        if self.m_min < 0:
            raise DomainError(f"Invalid m_min: {self.m_min}")
        if self.variant not in VARIANTS:
            raise DomainError(f"Invalid variant: {self.variant!r}")
        if abs(np.dot(amplitudes, amplitudes) - 1.0) > 1e-12:
            raise DomainError("Amplitudes are not normalized")
        if self.variant != "custom" and np.any(amplitudes < 0.0):
            raise DomainError(f"Negative amplitude for {self.variant} state")
        amplitudes.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def m_max(self) -> int:
        return self.m_min + self.amplitudes.size - 1

    @property
    def joint_photons(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    def padded(self, dim: int | None = None) -> np.ndarray:
        """Amplitudes on ``m = 0 .. dim - 1``, zero below ``m_min``."""
        dim = self.m_max + 1 if dim is None else dim
        if dim <= self.m_max:
            raise TruncationError(
                f"Cutoff {dim} cannot hold joint photon number {self.m_max}"
            )
        out = np.zeros(dim)
        out[self.m_min : self.m_max + 1] = self.amplitudes
        return out

    def density(self, dim_signal: int, dim_idler: int) -> DenseOperator:
        """Projector on ``("S", "I")`` with the given cutoffs."""
        coefficients = self.padded(min(dim_signal, dim_idler))
        ket = np.zeros(dim_signal * dim_idler)
        for m, c in enumerate(coefficients):
            ket[m * dim_idler + m] = c
        return DenseOperator(
            ("S", "I"), (dim_signal, dim_idler), np.outer(ket, ket)
        )

    @classmethod
    def from_amplitudes(
        cls, amplitudes: np.ndarray | list[float], m_min: int = 0
    ) -> Self:
        """Custom state from arbitrary real amplitudes, normalized."""
        amplitudes = np.asarray(amplitudes, dtype=float)
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise DomainError("Cannot normalize a zero amplitude vector")
        return cls(
            m_min=m_min,
            amplitudes=amplitudes / norm,
            z=None,
            kappa=0,
            variant="custom",
        )

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "kappa": self.kappa,
            "z": self.z,
            "m_min": self.m_min,
            "amplitudes": self.amplitudes.tolist(),
            "tail_mass": self.tail_mass,
            "normalizer": self.normalizer,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        return cls(
            m_min=data["m_min"],
            amplitudes=np.asarray(data["amplitudes"]),
            z=data.get("z"),
            kappa=data.get("kappa", 0),
            variant=data.get("variant", "custom"),
            tail_mass=data.get("tail_mass", 0.0),
            normalizer=data.get("normalizer", 1.0),
        )


def _check_z(z: float) -> None:
    if not 0.0 <= z < 1.0:
        raise DomainError(f"Invalid z: {z}. Must be in [0, 1).")


def _schmidt_terms(
    z: float, kappa: int, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized squared amplitudes ``z^(2n) C(n + kappa, kappa)^2`` for
    ``n < count`` together with their square roots.
    """
    n = np.arange(count)
    binomials = binomial_recurrence(kappa, count)
    amplitudes = np.power(z, n) * binomials
    return amplitudes**2, amplitudes


def schmidt_cutoff(
    z: float, kappa: int, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
) -> int:
    """Smallest number of Schmidt terms whose discarded weight, relative to
    the 2F1 normalizer, is below ``tail_tolerance``.

    Args:
        z (float): Squeezing parameter.
        kappa (int): Number of added or subtracted photons (0 for TMSV).
        tail_tolerance (float): Target tail.

    Raises:
        ConvergenceError: If no cutoff below the term cap meets the target.

    Returns:
        int: Number of retained terms, at least 2.
    """
    _check_z(z)
    if z == 0.0:
        return 2
    x = z * z
    normalizer = gauss_2f1_diagonal(kappa, x)
    term = 1.0
    for n in range(SERIES_MAX_TERMS):
        ratio = ((n + 1 + kappa) / (n + 1)) ** 2 * x
        next_term = term * ratio
        if ratio < 1.0 and next_term / (1.0 - ratio) < (
            tail_tolerance * normalizer
        ):
            return max(2, n + 1)
        term = next_term
    raise ConvergenceError(f"No Schmidt cutoff found for z={z}, kappa={kappa}")


def _schmidt_tail(z: float, kappa: int, count: int) -> float:
    """Raw weight of the Schmidt terms ``n >= count`` relative to the 2F1
    normalizer.
    """
    if z == 0.0:
        return 0.0
    x = z * z
    first = x**count * binomial_recurrence(kappa, count + 1)[-1] ** 2
    total, _ = sum_ratio_series(
        first,
        lambda k: ((count + k + 1 + kappa) / (count + k + 1)) ** 2 * x,
        rtol=1e-10,
    )
    return total / gauss_2f1_diagonal(kappa, x)


def _joint_cutoff(trunc: TruncationSpec | None) -> int | None:
    if trunc is None:
        return None
    return min(trunc.dim_signal, trunc.dim_idler)


def _build_schmidt(
    z: float,
    kappa: int,
    variant: Variant,
    trunc: TruncationSpec | None,
    tail_tolerance: float | None,
) -> DiagonalSchmidtState:
    _check_z(z)
    tolerance = (
        trunc.tail_tolerance
        if trunc is not None
        else tail_tolerance or DEFAULT_TAIL_TOLERANCE
    )
    offset = kappa if variant == "photon_added" else 0
    levels = _joint_cutoff(trunc)
    if levels is None:
        count = schmidt_cutoff(z, kappa, tolerance)
    else:
        count = levels - offset
        if count < 1:
            raise TruncationError(
                f"Cutoff {levels} cannot hold the {kappa}-photon-added state"
            )
    weights, amplitudes = _schmidt_terms(z, kappa, count)
    tail = _schmidt_tail(z, kappa, count)
    if tail > tolerance:
        raise TruncationError(
            f"Schmidt tail mass {tail:.3g} for {variant} z={z} kappa={kappa} "
            + f"with {count} terms exceeds tolerance {tolerance:.3g}",
            tail_mass=tail,
        )
    logger.debug(
        "Built %s state z=%s kappa=%d with %d terms (tail %.3g)",
        variant,
        z,
        kappa,
        count,
        tail,
    )
    return DiagonalSchmidtState(
        m_min=offset,
        amplitudes=amplitudes / math.sqrt(weights.sum()),
        z=float(z),
        kappa=int(kappa),
        variant=variant,
        tail_mass=tail,
        normalizer=_schmidt_normalizer(z, kappa),
    )


def _schmidt_normalizer(z: float, kappa: int) -> float:
    return gauss_2f1_diagonal(kappa, z * z)


def _check_positive_kappa(kappa: int) -> None:
    if int(kappa) != kappa or kappa < 1:
        raise DomainError(f"Invalid kappa: {kappa}. Must be an integer >= 1.")


def tmsv_coefficients(
    z: float,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> DiagonalSchmidtState:
    """Two-mode squeezed vacuum, ``c_m = sqrt(1 - z^2) z^m`` renormalized
    after truncation.

    Args:
        z (float): ``tanh r`` in ``[0, 1)``.
        trunc (TruncationSpec | None): Explicit cutoffs. When omitted the
            smallest cutoff meeting ``tail_tolerance`` is used.
        tail_tolerance (float | None): Tail target without ``trunc``.

    Raises:
        DomainError: If ``z`` is outside ``[0, 1)``.
        TruncationError: If the cutoff discards too much weight.

    Returns:
        DiagonalSchmidtState: The truncated state.
    """
    return _build_schmidt(z, 0, "tmsv", trunc, tail_tolerance)


def mpa_coefficients(
    z: float,
    kappa: int,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> DiagonalSchmidtState:
    """Photon-added TMSV: amplitudes ``z^n C(n + kappa, kappa)`` at joint
    photon number ``n + kappa``.
    """
    _check_positive_kappa(kappa)
    return _build_schmidt(z, kappa, "photon_added", trunc, tail_tolerance)


def mps_coefficients(
    z: float,
    kappa: int,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> DiagonalSchmidtState:
    """Photon-subtracted TMSV: amplitudes ``z^(n - kappa) C(n, kappa)`` at
    joint photon number ``n - kappa``, the photon-added vector shifted down to
    start at the vacuum.
    """
    _check_positive_kappa(kappa)
    return _build_schmidt(z, kappa, "photon_subtracted", trunc, tail_tolerance)


def mean_photon(state: DiagonalSchmidtState) -> float:
    return float(np.dot(state.probabilities, state.joint_photons))


def squeezing_from_r(r: float) -> float:
    return math.tanh(r)


def squeezing_for_mean_photon(N_S: float) -> float:
    """TMSV squeezing with ``sinh^2 r = N_S``."""
    if N_S < 0.0:
        raise DomainError(f"Invalid N_S: {N_S}. Must be nonnegative.")
    return math.sqrt(N_S / (1.0 + N_S))


def schmidt_state(
    variant: Variant,
    z: float,
    kappa: int = 0,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> DiagonalSchmidtState:
    """Dispatch on the variant name; ``kappa = 0`` always gives TMSV."""
    if variant == "tmsv" or kappa == 0:
        return tmsv_coefficients(z, trunc, tail_tolerance)
    if variant == "photon_added":
        return mpa_coefficients(z, kappa, trunc, tail_tolerance)
    if variant == "photon_subtracted":
        return mps_coefficients(z, kappa, trunc, tail_tolerance)
    raise DomainError(f"Invalid variant: {variant!r}")


def schmidt_for_mean_photon(
    variant: Variant,
    kappa: int,
    N_S: float,
    tail_tolerance: float | None = None,
) -> float:
    """Squeezing ``z`` at which the probe carries ``N_S`` signal photons.

    Args:
        variant (Variant): "tmsv", "photon_added" or "photon_subtracted".
        kappa (int): Number of added or subtracted photons.
        N_S (float): Target mean photon number.
        tail_tolerance (float | None): Tail target for the states built
            during the search.

    Raises:
        DomainError: If ``N_S`` is below the value at ``z = 0`` (``kappa`` for
            photon addition, 0 otherwise).

    Returns:
        float: The squeezing parameter.
    """
    if variant == "tmsv" or kappa == 0:
        return squeezing_for_mean_photon(N_S)
    floor = float(kappa) if variant == "photon_added" else 0.0
    if N_S < floor:
        raise DomainError(
            f"N_S={N_S} is unreachable for {variant} kappa={kappa}; the "
            + f"minimum is {floor}"
        )
    if N_S == floor:
        return 0.0

    def excess(z: float) -> float:
        state = schmidt_state(variant, z, kappa, tail_tolerance=tail_tolerance)
        return mean_photon(state) - N_S

    upper = 0.5
    while excess(upper) < 0.0:
        upper = (1.0 + upper) / 2.0
    return float(optimize.brentq(excess, 0.0, upper, xtol=1e-15, rtol=1e-14))


@dataclass(frozen=True, eq=False)
class GeneralizedCoherent:
    """Coherent state dressed by the nonlinear phase ``exp(-i chi N^eps)``.

    ``cutoff`` levels are kept; when omitted the smallest cutoff with Poisson
    tail below ``tail_tolerance`` is chosen.
    """

    alpha: complex
    chi: float = 0.0
    epsilon: float = 1.0
    cutoff: int | None = None
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not self.epsilon > 0.0:
            raise DomainError(
                f"Invalid epsilon: {self.epsilon}. Must be positive."
            )
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", self._auto_cutoff())
        elif int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise DomainError(f"Invalid cutoff: {self.cutoff}. Must be >= 2.")
        if self.tail_mass > self.tail_tolerance:
            raise TruncationError(
                f"Poisson tail {self.tail_mass:.3g} with cutoff {self.cutoff} "
                + f"exceeds tolerance {self.tail_tolerance:.3g}",
                tail_mass=self.tail_mass,
            )

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2

    def _auto_cutoff(self) -> int:
        mu = self.mean_photons
        if mu == 0.0:
            return 2
        cutoff = max(2, int(stats.poisson.isf(self.tail_tolerance, mu)) + 2)
        while stats.poisson.sf(cutoff - 1, mu) > self.tail_tolerance:
            cutoff += 1
        return cutoff

    @property
    def tail_mass(self) -> float:
        if self.mean_photons == 0.0:
            return 0.0
        return float(stats.poisson.sf(self.cutoff - 1, self.mean_photons))

    @property
    def poisson_weights(self) -> np.ndarray:
        """Renormalized ``|<n|alpha>|^2`` on the retained levels."""
        n = np.arange(self.cutoff)
        if self.mean_photons == 0.0:
            weights = (n == 0).astype(float)
        else:
            weights = stats.poisson.pmf(n, self.mean_photons)
        return weights / weights.sum()

    def phase_exponent(self) -> np.ndarray:
        """``n^eps`` on the retained levels, evaluated as ``exp(eps ln n)``
        with the vacuum mapped to 0.
        """
        n = np.arange(self.cutoff, dtype=float)
        out = np.zeros(self.cutoff)
        out[1:] = np.exp(self.epsilon * np.log(n[1:]))
        return out

    def ket(self) -> np.ndarray:
        n = np.arange(self.cutoff)
        phase = np.angle(self.alpha) * n - self.chi * self.phase_exponent()
        return np.sqrt(self.poisson_weights) * np.exp(1j * phase)

    def density(self, label: str = "S") -> DenseOperator:
        ket = self.ket()
        return DenseOperator(
            (label,), (self.cutoff,), np.outer(ket, ket.conj())
        )

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "chi": self.chi,
            "epsilon": self.epsilon,
            "cutoff": self.cutoff,
            "tail_mass": self.tail_mass,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        return cls(
            alpha=parse_complex(data["alpha"]),
            chi=data.get("chi", 0.0),
            epsilon=data.get("epsilon", 1.0),
            cutoff=data.get("cutoff"),
        )


def coherent_a_expectation(state: GeneralizedCoherent) -> complex:
    """``<a_S>`` of a generalized coherent state,
    ``alpha sum_n C_n^2 exp(i chi [n^eps - (n + 1)^eps])``.
    """
    if state.chi == 0.0:
        return state.alpha
    exponent = np.append(state.phase_exponent(), state.cutoff**state.epsilon)
    phases = np.exp(1j * state.chi * (exponent[:-1] - exponent[1:]))
    return complex(state.alpha * np.dot(state.poisson_weights, phases))


@dataclass(frozen=True)
class PsiToyState:
    """Two-term entangled probes: ``minus`` is ``sqrt(1-p)|00> + sqrt(p)|11>``
    and ``plus`` is ``sqrt(1-p)|11> + sqrt(p)|22>``.
    """

    p: float
    sign: Sign

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"Invalid p: {self.p}. Must be in [0, 1].")
        if self.sign not in (PLUS, MINUS):
            raise DomainError(f"Invalid sign: {self.sign!r}")

    @property
    def m_min(self) -> int:
        return 1 if self.sign == PLUS else 0

    @property
    def mean_photon(self) -> float:
        return self.m_min + self.p

    def schmidt(self) -> DiagonalSchmidtState:
        return DiagonalSchmidtState(
            m_min=self.m_min,
            amplitudes=np.array([math.sqrt(1.0 - self.p), math.sqrt(self.p)]),
            z=None,
            kappa=0,
            variant="custom",
        )

    def to_dict(self) -> dict:
        return {"p": self.p, "sign": self.sign, "N_S": self.mean_photon}


def psi_toy(p: float, sign: Sign) -> PsiToyState:
    return PsiToyState(p=p, sign=sign)

"""Linear algebra over labeled tensor products of truncated Fock modes.

Basis ordering is the lexicographic multi-index over ``mode_labels``: for
modes ``("I", "R")`` with dims ``(dI, dR)`` the state ``|m, mu>`` sits at
``m * dR + mu``, which is also the order produced by ``np.kron``.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from typing_extensions import Self

from qillum.constants import (
    DEFAULT_TAIL_TOLERANCE,
    HERMITIAN_TOL,
    TRACE_TOL,
)
from qillum.exceptions import (
    DomainError,
    InvalidDimensionError,
    LabelCollisionError,
    LabelNotFoundError,
    TruncationError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationSpec:
    """Fock cutoffs for the signal, idler and bath modes. A mode with cutoff
    ``d`` keeps the levels ``|0>, ..., |d - 1>``.
    """

    dim_signal: int
    dim_idler: int
    dim_bath: int
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE

    def __post_init__(self) -> None:
        for name in ("dim_signal", "dim_idler", "dim_bath"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise InvalidDimensionError(
                    f"Invalid {name}: {value}. Must be an integer >= 2."
                )
        if not 0.0 < self.tail_tolerance < 1.0:
            raise DomainError(
                f"Invalid tail_tolerance: {self.tail_tolerance}. Must be in "
                + "(0, 1)."
            )

    def to_dict(self) -> dict:
        return {
            "dim_signal": self.dim_signal,
            "dim_idler": self.dim_idler,
            "dim_bath": self.dim_bath,
            "tail_tolerance": self.tail_tolerance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        return cls(**data)


def _check_labels(mode_labels: Sequence[str], dims: Sequence[int]) -> None:
    if len(mode_labels) != len(dims):
        raise InvalidDimensionError(
            f"Got {len(mode_labels)} mode labels but {len(dims)} dimensions"
        )
    if len(set(mode_labels)) != len(mode_labels):
        raise LabelCollisionError(f"Duplicate mode labels: {mode_labels}")
    for dim in dims:
        if dim < 1:
            raise InvalidDimensionError(f"Invalid dimension: {dim}")


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Complex matrix over a labeled tensor product of truncated modes."""

    mode_labels: tuple[str, ...]
    dims: tuple[int, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        labels = tuple(self.mode_labels)
        dims = tuple(int(d) for d in self.dims)
        _check_labels(labels, dims)
        entries = np.array(self.entries, dtype=complex)
        side = math.prod(dims)
        if entries.shape != (side, side):
            raise InvalidDimensionError(
                f"Matrix of shape {entries.shape} does not match modes "
                + f"{labels} with dims {dims} (expected side {side})"
            )
        entries.flags.writeable = False
        object.__setattr__(self, "mode_labels", labels)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def _compatible(self, other: "DenseOperator") -> None:
        if self.mode_labels != other.mode_labels or self.dims != other.dims:
            raise InvalidDimensionError(
                f"Operators act on different spaces: {self.mode_labels} "
                + f"{self.dims} vs {other.mode_labels} {other.dims}"
            )

    def _like(self, entries: np.ndarray) -> "DenseOperator":
        return DenseOperator(self.mode_labels, self.dims, entries)

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        self._compatible(other)
        return self._like(self.entries @ other.entries)

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        self._compatible(other)
        return self._like(self.entries + other.entries)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        self._compatible(other)
        return self._like(self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "DenseOperator":
        return self._like(self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "DenseOperator":
        return self._like(-self.entries)

    def dag(self) -> "DenseOperator":
        return self._like(self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) < tol)

    def is_anti_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries + self.entries.conj().T)) < tol)

    def check_density(
        self, hermitian_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL
    ) -> None:
        """Check the density-operator postconditions.

        Args:
            hermitian_tol (float): Entrywise Hermiticity tolerance.
            trace_tol (float): Tolerance on ``|tr - 1|``.

        Raises:
            DomainError: If the operator is not Hermitian or not unit-trace.
        """
        if not self.is_hermitian(hermitian_tol):
            raise DomainError("Density operator is not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise DomainError(
                f"Density operator has trace {self.trace():.15g}, expected 1"
            )

    def index(self, occupations: Sequence[int]) -> int:
        """Flat position of the basis state with the given occupations."""
        return int(np.ravel_multi_index(tuple(occupations), self.dims))

    def relabel(self, mapping: dict[str, str]) -> "DenseOperator":
        labels = tuple(mapping.get(label, label) for label in self.mode_labels)
        return DenseOperator(labels, self.dims, self.entries)


def identity(dim: int, label: str) -> DenseOperator:
    return DenseOperator((label,), (dim,), np.eye(dim))


def annihilation_matrix(dim: int, label: str = "a") -> DenseOperator:
    """Truncated ladder operator with ``<n-1|a|n> = sqrt(n)``.

    Args:
        dim (int): Fock cutoff of the mode.
        label (str): Mode label. Defaults to "a".

    Raises:
        InvalidDimensionError: If ``dim < 2``.

    Returns:
        DenseOperator: The ``dim x dim`` annihilation operator.
    """
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Invalid dim: {dim}. Must be >= 2.")
    return DenseOperator(
        (label,), (dim,), np.diag(np.sqrt(np.arange(1, dim)), k=1)
    )


def number_operator(dim: int, label: str = "a") -> DenseOperator:
    a = annihilation_matrix(dim, label)
    return a.dag() @ a


@dataclass(frozen=True, eq=False)
class ThermalSpectrum:
    """Truncated, renormalized photon-number distribution of a thermal state.

    ``tail_mass`` is the raw probability of the discarded levels, before
    renormalization.
    """

    mean_photons: float
    dim: int
    probabilities: np.ndarray = field(repr=False)
    tail_mass: float

    @property
    def mean_photons_truncated(self) -> float:
        return float(np.dot(np.arange(self.dim), self.probabilities))

    @property
    def photon_tail(self) -> float:
        """Deficit of the truncated mean photon number with respect to
        ``mean_photons``.
        """
        return self.mean_photons - self.mean_photons_truncated

    def to_operator(self, label: str = "B") -> DenseOperator:
        return DenseOperator((label,), (self.dim,), np.diag(self.probabilities))


def _thermal_ratio(N_B: float) -> float:
    return N_B / (N_B + 1.0)


def thermal_state(
    N_B: float,
    dim: int,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float | None = None,
) -> ThermalSpectrum:
    """Geometric photon statistics ``N_B^n / (N_B + 1)^(n + 1)`` truncated to
    ``dim`` levels and renormalized.

    Args:
        N_B (float): Mean thermal photon number.
        dim (int): Number of retained Fock levels.
        trunc (TruncationSpec | None): When given, its ``tail_tolerance``
            bounds the discarded probability.
        tail_tolerance (float | None): Bound on the discarded probability
            when no TruncationSpec is at hand.

    Raises:
        DomainError: If ``N_B < 0``.
        InvalidDimensionError: If ``dim < 2``.
        TruncationError: If the discarded probability exceeds the tolerance.

    Returns:
        ThermalSpectrum: The truncated spectrum and its raw tail mass.
    """
    if not N_B >= 0.0:
        raise DomainError(f"Invalid N_B: {N_B}. Must be nonnegative.")
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Invalid dim: {dim}. Must be >= 2.")
    t = _thermal_ratio(N_B)
    raw = (1.0 - t) * np.power(t, np.arange(dim))
    tail = float(t**dim)
    if trunc is not None:
        tail_tolerance = trunc.tail_tolerance
    if tail_tolerance is not None and tail > tail_tolerance:
        raise TruncationError(
            f"Thermal tail mass {tail:.3g} at N_B={N_B}, dim={dim} exceeds "
            + f"tolerance {tail_tolerance:.3g}",
            tail_mass=tail,
        )
    return ThermalSpectrum(
        mean_photons=float(N_B),
        dim=int(dim),
        probabilities=raw / raw.sum(),
        tail_mass=tail,
    )


def thermal_weighted_tail(N_B: float, dim: int) -> float:
    """Photon-weighted thermal tail ``t^(d-1) (d + N_B) / (N_B + 1)``, the
    relative amount of Fisher information lost by cutting the bath at ``dim``.
    """
    t = _thermal_ratio(N_B)
    return float(t ** (dim - 1) * (dim + N_B) / (N_B + 1.0))


def thermal_cutoff(
    N_B: float, tail_tolerance: float, weighted: bool = False
) -> int:
    """Smallest bath cutoff whose tail is below ``tail_tolerance``.

    Args:
        N_B (float): Mean thermal photon number.
        tail_tolerance (float): Target tail.
        weighted (bool): Use the photon-weighted tail instead of the raw
            probability. Defaults to False.

    Returns:
        int: The cutoff, at least 2.
    """
    if N_B <= 0.0:
        return 2
    t = _thermal_ratio(N_B)
    dim = max(2, math.ceil(math.log(tail_tolerance) / math.log(t)))
    if weighted:
        while thermal_weighted_tail(N_B, dim) >= tail_tolerance:
            dim += 1
    logger.debug("Thermal cutoff %d for N_B=%s", dim, N_B)
    return dim


def tensor_product(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    overlap = set(a.mode_labels) & set(b.mode_labels)
    if overlap:
        raise LabelCollisionError(f"Mode labels overlap: {sorted(overlap)}")
    return DenseOperator(
        a.mode_labels + b.mode_labels,
        a.dims + b.dims,
        np.kron(a.entries, b.entries),
    )


def partial_trace(op: DenseOperator, traced_label: str) -> DenseOperator:
    """Trace out one mode.

    Args:
        op (DenseOperator): Operator on two or more modes.
        traced_label (str): The mode to trace out.

    Raises:
        LabelNotFoundError: If the label is not one of ``op``'s modes.
        InvalidDimensionError: If ``op`` has a single mode; use ``trace``.

    Returns:
        DenseOperator: The reduced operator on the remaining modes.
    """
    if traced_label not in op.mode_labels:
        raise LabelNotFoundError(
            f"Mode {traced_label!r} not in {op.mode_labels}"
        )
    if len(op.mode_labels) == 1:
        raise InvalidDimensionError(
            "Cannot partially trace a single-mode operator"
        )
    k = op.mode_labels.index(traced_label)
    n = len(op.dims)
    tensor = op.entries.reshape(op.dims + op.dims)
    reduced = np.trace(tensor, axis1=k, axis2=k + n)
    labels = op.mode_labels[:k] + op.mode_labels[k + 1 :]
    dims = op.dims[:k] + op.dims[k + 1 :]
    side = math.prod(dims)
    return DenseOperator(labels, dims, reduced.reshape(side, side))


def embed(
    op: DenseOperator, mode_labels: Sequence[str], dims: Sequence[int]
) -> DenseOperator:
    """Place a single-mode operator into a labeled product space, acting as the
    identity on every other mode.
    """
    _check_labels(mode_labels, dims)
    (label,) = op.mode_labels
    if label not in mode_labels:
        raise LabelNotFoundError(f"Mode {label!r} not in {tuple(mode_labels)}")
    k = list(mode_labels).index(label)
    if dims[k] != op.dims[0]:
        raise InvalidDimensionError(
            f"Mode {label!r} has dim {op.dims[0]} but target space uses "
            + f"{dims[k]}"
        )
    entries = np.ones((1, 1), dtype=complex)
    for i, dim in enumerate(dims):
        factor = op.entries if i == k else np.eye(dim)
        entries = np.kron(entries, factor)
    return DenseOperator(tuple(mode_labels), tuple(dims), entries)


def commutator(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    return a @ b - b @ a


def expectation(op: DenseOperator, rho: DenseOperator) -> complex:
    return (op @ rho).trace()


def beamsplitter_generator(
    mode_labels: Sequence[str],
    dims: Sequence[int],
    signal: str = "S",
    bath: str = "B",
) -> DenseOperator:
    """Generator ``G = a_S^dag b - a_S b^dag`` of the signal-bath beam
    splitter, embedded in the full labeled space.

    Args:
        mode_labels (Sequence[str]): Labels of the full space.
        dims (Sequence[int]): Cutoffs of the full space.
        signal (str): Label of the signal mode. Defaults to "S".
        bath (str): Label of the bath mode. Defaults to "B".

    Raises:
        InvalidDimensionError: If labels and dims disagree or a cutoff is < 2.
        LabelNotFoundError: If the signal or bath label is missing.

    Returns:
        DenseOperator: The anti-Hermitian generator.
    """
    _check_labels(mode_labels, dims)
    for label in (signal, bath):
        if label not in mode_labels:
            raise LabelNotFoundError(
                f"Mode {label!r} not in {tuple(mode_labels)}"
            )
    labels = list(mode_labels)
    a_s = embed(
        annihilation_matrix(dims[labels.index(signal)], signal),
        mode_labels,
        dims,
    )
    b = embed(
        annihilation_matrix(dims[labels.index(bath)], bath), mode_labels, dims
    )
    return a_s.dag() @ b - a_s @ b.dag()


def evolve_small_eta(
    state: DenseOperator, G: DenseOperator, eta: float, order: int = 1
) -> DenseOperator:
    """Perturbative beam-splitter evolution
    ``rho + eta [G, rho] (+ eta^2 / 2 [G, [G, rho]])``.

    Args:
        state (DenseOperator): The state at ``eta = 0``.
        G (DenseOperator): Generator on the same space.
        eta (float): Reflectivity amplitude.
        order (int): 1 or 2. Defaults to 1.

    Raises:
        DomainError: If ``order`` is not 1 or 2.

    Returns:
        DenseOperator: The evolved state.
    """
    if order not in (1, 2):
        raise DomainError(f"Invalid order: {order}. Must be 1 or 2.")
    first = commutator(G, state)
    evolved = state + eta * first
    if order == 2:
        evolved = evolved + (eta**2 / 2.0) * commutator(G, first)
    return evolved

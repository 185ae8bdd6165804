"""Truncated-Fock-space oracle for the Fisher information about ``eta`` at
``eta = 0``.

The state at ``eta = 0`` is diagonal in the Fock basis, so the QFI reduces to
``2 sum_ij |d_ij|^2 / (p_i + p_j)`` over the nonzero entries of the
derivative ``d``. Derivatives are stored as ``scipy.sparse`` matrices: the
bath cutoff needed for a 1e-6 match at large ``N_B`` runs into the hundreds
while only O(dim_idler * dim_bath) entries are nonzero.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from qillum.analytics.metrics import MeasurementMoments
from qillum.constants import (
    BASIS_ORTHONORMAL_TOL,
    DEFAULT_ETA,
    DEFAULT_TAIL_TOLERANCE,
    FINITE_DIFFERENCE_STEP,
    HERMITIAN_TOL,
    SLD_NULL_DENOMINATOR,
    SLD_NULL_NUMERATOR,
)
from qillum.exceptions import (
    DomainError,
    InvalidBasisError,
    InvalidDimensionError,
    LabelNotFoundError,
    SupportMismatchError,
    TruncationError,
)
from qillum.fock.core import (
    DenseOperator,
    TruncationSpec,
    beamsplitter_generator,
    evolve_small_eta,
    partial_trace,
    tensor_product,
    thermal_cutoff,
    thermal_state,
    thermal_weighted_tail,
)
from qillum.states.probes import DiagonalSchmidtState, mean_photon

logger = logging.getLogger(__name__)

REFLECTED = "R"
IDLER = "I"


@dataclass(frozen=True, eq=False)
class DerivativeAtZero:
    """``d rho_eta / d eta`` at ``eta = 0`` together with the diagonal of
    ``rho_0``, over the reflected (and idler) Fock basis.

    ``tail_mass`` is the raw probability dropped by truncation and
    ``weighted_tail`` bounds the relative QFI lost to it.
    """

    rho0_diag: np.ndarray = field(repr=False)
    drho: sparse.csr_matrix = field(repr=False)
    mode_labels: tuple[str, ...]
    dims: tuple[int, ...]
    tail_mass: float = 0.0
    weighted_tail: float = 0.0

    def __post_init__(self) -> None:
        size = math.prod(self.dims)
        if self.rho0_diag.shape != (size,) or self.drho.shape != (size, size):
            raise InvalidDimensionError(
                f"Derivative of shape {self.drho.shape} and diagonal of "
                + f"shape {self.rho0_diag.shape} do not match dims {self.dims}"
            )
        if np.any(self.rho0_diag < 0.0):
            raise DomainError("rho0 has negative populations")

    @property
    def size(self) -> int:
        return self.rho0_diag.size

    def trace(self) -> complex:
        return complex(self.drho.diagonal().sum())

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        difference = self.drho - self.drho.conj().T
        if difference.nnz == 0:
            return True
        return bool(abs(difference).max() < tol)

    def rho0(self) -> DenseOperator:
        return DenseOperator(
            self.mode_labels, self.dims, np.diag(self.rho0_diag)
        )

    def to_operator(self) -> DenseOperator:
        return DenseOperator(self.mode_labels, self.dims, self.drho.toarray())


def _bath_dim(
    N_B: float, dim_bath: int | None, tail_tolerance: float
) -> int:
    if dim_bath is None:
        return thermal_cutoff(N_B, tail_tolerance, weighted=True)
    return dim_bath


def _ladder_weights(probabilities: np.ndarray) -> np.ndarray:
    """``sqrt(mu + 1) (p_{mu+1} - p_mu)``, the entries of ``[b, rho_B]``."""
    mu = np.arange(probabilities.size - 1)
    return np.sqrt(mu + 1.0) * (probabilities[1:] - probabilities[:-1])


def derivative_ci(
    a_expect: complex,
    N_B: float,
    dim_bath: int | None = None,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> DerivativeAtZero:
    """Derivative for a single-mode probe,
    ``<a_S^dag> [b, rho_B] - <a_S> [b^dag, rho_B]`` on the reflected mode.

    Args:
        a_expect (complex): ``<a_S>`` of the probe.
        N_B (float): Mean thermal photon number.
        dim_bath (int | None): Reflected-mode cutoff; chosen from
            ``tail_tolerance`` when omitted.
        tail_tolerance (float): Bound on the discarded thermal probability.

    Raises:
        TruncationError: If ``dim_bath`` discards too much thermal weight.

    Returns:
        DerivativeAtZero: The derivative on ``("R",)``.
    """
    dim = _bath_dim(N_B, dim_bath, tail_tolerance)
    thermal = thermal_state(N_B, dim, tail_tolerance=tail_tolerance)
    s = _ladder_weights(thermal.probabilities)
    mu = np.arange(dim - 1)
    a = complex(a_expect)
    rows = np.concatenate([mu, mu + 1])
    cols = np.concatenate([mu + 1, mu])
    values = np.concatenate([a.conjugate() * s, a * s])
    keep = values != 0
    drho = sparse.coo_matrix(
        (values[keep], (rows[keep], cols[keep])), shape=(dim, dim)
    ).tocsr()
    return DerivativeAtZero(
        rho0_diag=thermal.probabilities,
        drho=drho,
        mode_labels=(REFLECTED,),
        dims=(dim,),
        tail_mass=thermal.tail_mass,
        weighted_tail=thermal_weighted_tail(N_B, dim) if N_B > 0 else 0.0,
    )


def derivative_schmidt(
    state: DiagonalSchmidtState,
    N_B: float,
    trunc: TruncationSpec | None = None,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> DerivativeAtZero:
    """Derivative for a diagonal Schmidt probe over ``("I", "R")``.

    With ``Y = sum_m c_m c_{m+1} sqrt(m + 1) |m><m + 1|`` on the idler, the
    derivative is ``Y (x) [b, rho_B] - Y^dag (x) [b^dag, rho_B]``: it only
    couples ``|m, mu>`` with ``|m + 1, mu + 1>``.

    Args:
        state (DiagonalSchmidtState): The probe.
        N_B (float): Mean thermal photon number.
        trunc (TruncationSpec | None): Explicit idler and bath cutoffs. When
            omitted the idler holds the state and the bath cutoff follows
            ``tail_tolerance``.
        tail_tolerance (float): Bound on the discarded thermal probability
            without ``trunc``.

    Raises:
        TruncationError: If a cutoff cannot hold the state or the bath tail is
            too large.

    Returns:
        DerivativeAtZero: The derivative on ``("I", "R")``.
    """
    if trunc is not None:
        dim_idler, dim_bath = trunc.dim_idler, trunc.dim_bath
        tail_tolerance = trunc.tail_tolerance
    else:
        dim_idler = max(2, state.m_max + 1)
        dim_bath = _bath_dim(N_B, None, tail_tolerance)
    if dim_idler <= state.m_max:
        raise TruncationError(
            f"Idler cutoff {dim_idler} cannot hold joint photon number "
            + f"{state.m_max}"
        )
    thermal = thermal_state(N_B, dim_bath, tail_tolerance=tail_tolerance)
    c = state.padded(dim_idler)
    m = np.arange(dim_idler - 1)
    mu = np.arange(dim_bath - 1)
    w = c[:-1] * c[1:] * np.sqrt(m + 1.0)
    s = _ladder_weights(thermal.probabilities)
    values = np.outer(w, s)
    rows = m[:, None] * dim_bath + mu[None, :]
    cols = (m + 1)[:, None] * dim_bath + (mu + 1)[None, :]
    keep = values != 0
    size = dim_idler * dim_bath
    upper = sparse.coo_matrix(
        (values[keep], (rows[keep], cols[keep])), shape=(size, size)
    )
    drho = (upper + upper.T).tocsr()
    bath_weighted = thermal_weighted_tail(N_B, dim_bath) if N_B > 0 else 0.0
    schmidt_weighted = 0.0
    if state.tail_mass > 0.0:
        schmidt_weighted = (
            (state.m_max + 2) * state.tail_mass / mean_photon(state)
        )
    logger.debug(
        "Schmidt derivative on %dx%d levels with %d nonzeros",
        dim_idler,
        dim_bath,
        drho.nnz,
    )
    return DerivativeAtZero(
        rho0_diag=np.kron(c**2, thermal.probabilities),
        drho=drho,
        mode_labels=(IDLER, REFLECTED),
        dims=(dim_idler, dim_bath),
        tail_mass=state.tail_mass + thermal.tail_mass,
        weighted_tail=bath_weighted + schmidt_weighted,
    )


def derivative_finite_difference(
    probe: DenseOperator,
    N_B: float,
    dim_bath: int,
    step: float = FINITE_DIFFERENCE_STEP,
) -> DenseOperator:
    """Central difference of the second-order evolved state, traced over the
    signal. Works on the full dense ``S (x) [I] (x) B`` space, independent of
    the closed-form matrix elements.

    Args:
        probe (DenseOperator): Probe density operator containing mode "S".
        N_B (float): Mean thermal photon number.
        dim_bath (int): Bath cutoff.
        step (float): Difference step in ``eta``.

    Raises:
        LabelNotFoundError: If the probe has no "S" mode.

    Returns:
        DenseOperator: The derivative, with the bath relabeled "R".
    """
    if "S" not in probe.mode_labels:
        raise LabelNotFoundError(f"Probe modes {probe.mode_labels} lack 'S'")
    bath = thermal_state(N_B, dim_bath).to_operator("B")
    rho = tensor_product(probe, bath)
    G = beamsplitter_generator(rho.mode_labels, rho.dims)
    forward = evolve_small_eta(rho, G, step, order=2)
    backward = evolve_small_eta(rho, G, -step, order=2)
    difference = (forward - backward) * (1.0 / (2.0 * step))
    return partial_trace(difference, "S").relabel({"B": REFLECTED})


def qfi_numeric(d: DerivativeAtZero) -> float:
    """``2 sum_ij |d_ij|^2 / (p_i + p_j)`` over the nonzero derivative entries.

    Args:
        d (DerivativeAtZero): The derivative and populations.

    Raises:
        SupportMismatchError: If the derivative has weight where both
            populations vanish.

    Returns:
        float: The quantum Fisher information.
    """
    coo = d.drho.tocoo()
    denominator = d.rho0_diag[coo.row] + d.rho0_diag[coo.col]
    magnitude = np.abs(coo.data)
    null = denominator < SLD_NULL_DENOMINATOR
    if np.any(magnitude[null] >= SLD_NULL_NUMERATOR):
        raise SupportMismatchError(
            "Derivative leaks outside the support of rho0; increase the cutoffs"
        )
    live = ~null
    return float(2.0 * np.sum(magnitude[live] ** 2 / denominator[live]))


def _classical_fisher(p: np.ndarray, dp: np.ndarray) -> float:
    null = p < SLD_NULL_DENOMINATOR
    if np.any(np.abs(dp[null]) >= SLD_NULL_NUMERATOR):
        raise SupportMismatchError(
            "Outcome with zero probability has a nonzero derivative"
        )
    live = ~null
    return float(np.sum(dp[live] ** 2 / p[live]))


def _check_basis(basis: np.ndarray, size: int) -> np.ndarray:
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (size, size):
        raise InvalidBasisError(
            f"Basis of shape {basis.shape} does not match dimension {size}"
        )
    deviation = np.max(np.abs(basis.conj().T @ basis - np.eye(size)))
    if deviation > BASIS_ORTHONORMAL_TOL:
        raise InvalidBasisError(
            f"Basis is not orthonormal (max deviation {deviation:.3g})"
        )
    return basis


def cfi_fock_counting(
    d: DerivativeAtZero, basis: np.ndarray | None = None
) -> float:
    """Classical Fisher information of a projective measurement.

    Without ``basis`` this is photon counting on every retained mode; the
    derivative has no diagonal, so the result is 0. A basis is given as a
    unitary whose columns are the measurement vectors.

    Args:
        d (DerivativeAtZero): The derivative and populations.
        basis (np.ndarray | None): Orthonormal measurement basis.

    Raises:
        InvalidBasisError: If the basis is not a unitary of the right size.

    Returns:
        float: The classical Fisher information.
    """
    if basis is None:
        return _classical_fisher(d.rho0_diag, d.drho.diagonal().real)
    U = _check_basis(basis, d.size)
    p = (np.abs(U) ** 2).T @ d.rho0_diag
    dp = np.real(np.sum(U.conj() * (d.drho @ U), axis=0))
    return _classical_fisher(p, dp)


def cfi_measurement(d: DerivativeAtZero, observable: sparse.spmatrix) -> float:
    """Classical Fisher information of measuring ``observable`` in its
    eigenbasis.

    The observable is diagonalized block by block over the connected
    components of the joint sparsity pattern of the observable and the
    derivative; blocks the derivative does not touch carry no information.

    Args:
        d (DerivativeAtZero): The derivative and populations.
        observable (sparse.spmatrix): Hermitian observable in the same basis.

    Returns:
        float: The classical Fisher information.
    """
    O = sparse.csr_matrix(observable)
    if O.shape != d.drho.shape:
        raise InvalidDimensionError(
            f"Observable of shape {O.shape} does not match {d.drho.shape}"
        )
    pattern = abs(O) + abs(d.drho)
    _, labels = connected_components(pattern, directed=False)
    touched = np.unique(labels[d.drho.tocoo().row])
    order = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(np.bincount(labels))])
    O = O[order][:, order].tocsr()
    drho = d.drho[order][:, order].tocsr()
    rho0 = d.rho0_diag[order]
    total = 0.0
    for component in touched:
        block = slice(bounds[component], bounds[component + 1])
        block_o = O[block, block].toarray()
        block_d = drho[block, block].toarray()
        _, vectors = np.linalg.eigh(block_o)
        p = (np.abs(vectors) ** 2).T @ rho0[block]
        dp = np.real(np.sum(vectors.conj() * (block_d @ vectors), axis=0))
        total += _classical_fisher(p, dp)
    logger.debug(
        "Measurement CFI over %d of %d blocks", touched.size, bounds.size - 1
    )
    return total


def quadrature_observable(dim: int, phi: float) -> sparse.csr_matrix:
    """``b e^(-i phi) + b^dag e^(i phi)`` on a single mode."""
    b = sparse.diags(np.sqrt(np.arange(1.0, dim)), offsets=1, format="csr")
    O = np.exp(-1j * phi) * b + np.exp(1j * phi) * b.conj().T
    return sparse.csr_matrix(O)


def joint_photon_observable(dim_idler: int, dim_bath: int) -> sparse.csr_matrix:
    """``a_R a_I + a_R^dag a_I^dag`` over ``("I", "R")``."""
    a_i = sparse.diags(np.sqrt(np.arange(1.0, dim_idler)), offsets=1)
    a_r = sparse.diags(np.sqrt(np.arange(1.0, dim_bath)), offsets=1)
    pair = sparse.kron(a_i, a_r, format="csr")
    return (pair + pair.T).tocsr()


def natural_observable(
    d: DerivativeAtZero, phi: float = 0.0
) -> sparse.csr_matrix:
    """Quadrature at ``phi`` for a single reflected mode, joint-photon
    observable for reflected and idler modes.
    """
    if d.mode_labels == (REFLECTED,):
        return quadrature_observable(d.dims[0], phi)
    if d.mode_labels == (IDLER, REFLECTED):
        return joint_photon_observable(*d.dims)
    raise LabelNotFoundError(f"No natural observable for {d.mode_labels}")


def moments_numeric(
    d: DerivativeAtZero,
    observable: sparse.spmatrix,
    eta: float = DEFAULT_ETA,
) -> MeasurementMoments:
    """First-order moments of ``observable`` computed on the truncated model.

    The outcome sign is chosen so that ``mu1 >= mu0``; relabeling outcomes
    leaves the SNR magnitude unchanged.
    """
    O = sparse.csr_matrix(observable)
    slope = float(np.real(O.multiply(d.drho.T).sum()))
    mean0 = float(np.real(O.diagonal() @ d.rho0_diag))
    second = float(np.real((O @ O).diagonal() @ d.rho0_diag))
    variance = max(second - mean0**2, 0.0)
    sign = 1.0 if slope >= 0.0 else -1.0
    mu0 = sign * mean0
    return MeasurementMoments(
        mu0=mu0,
        mu1=mu0 + eta * abs(slope),
        var0=variance,
        var1=variance,
        eta=eta,
    )


def check_selection_rule(d: DerivativeAtZero) -> bool:
    """True when every nonzero entry changes each retained mode by exactly
    one photon.
    """
    coo = d.drho.tocoo()
    rows = np.unravel_index(coo.row, d.dims)
    cols = np.unravel_index(coo.col, d.dims)
    return all(
        bool(np.all(np.abs(r - c) == 1)) for r, c in zip(rows, cols)
    )


def random_orthonormal_basis(dim: int, seed: int) -> np.ndarray:
    """Haar-like unitary from the QR decomposition of a seeded complex
    Gaussian matrix.
    """
    rng = np.random.default_rng(seed)
    gaussian = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(gaussian)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases

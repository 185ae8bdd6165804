import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qillum.exceptions import DomainError, TruncationError
from qillum.fock.core import TruncationSpec, partial_trace
from qillum.states.probes import (
    DiagonalSchmidtState,
    GeneralizedCoherent,
    coherent_a_expectation,
    mean_photon,
    mpa_coefficients,
    mps_coefficients,
    psi_toy,
    schmidt_for_mean_photon,
    schmidt_state,
    squeezing_for_mean_photon,
    squeezing_from_r,
    tmsv_coefficients,
)
from qillum.states.series import MINUS, PLUS, gauss_2f1_diagonal
from qillum.utils import binomial_recurrence


class TestTmsv:
    def test_vacuum(self) -> None:
        state = tmsv_coefficients(0.0)
        assert state.m_min == 0
        assert state.amplitudes[0] == 1.0
        assert np.all(state.amplitudes[1:] == 0.0)

    def test_mean_photon(self) -> None:
        state = tmsv_coefficients(squeezing_from_r(1.0))
        assert mean_photon(state) == pytest.approx(
            math.sinh(1.0) ** 2, rel=1e-9
        )
        assert mean_photon(state) == pytest.approx(1.3811, abs=1e-4)

    def test_half_squeezing(self) -> None:
        state = tmsv_coefficients(math.sqrt(0.5))
        m = state.joint_photons
        np.testing.assert_allclose(
            state.probabilities, 0.5 ** (m + 1), rtol=1e-10
        )

    def test_normalized(self, tmsv_half: DiagonalSchmidtState) -> None:
        assert tmsv_half.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert tmsv_half.tail_mass < 1e-12
        assert tmsv_half.variant == "tmsv"

    def test_cutoff_too_small(self) -> None:
        with pytest.raises(TruncationError) as info:
            tmsv_coefficients(0.999, TruncationSpec(20, 20, 20))
        assert info.value.tail_mass > 0.5

    def test_explicit_cutoff(self, small_trunc: TruncationSpec) -> None:
        trunc = TruncationSpec(6, 8, 4, tail_tolerance=1e-3)
        state = tmsv_coefficients(0.1, trunc)
        assert state.m_max == 5
        with pytest.raises(TruncationError):
            tmsv_coefficients(0.5, small_trunc)

    @pytest.mark.parametrize("z", [1.0, -0.1, 1.5], ids=str)
    def test_domain(self, z: float) -> None:
        with pytest.raises(DomainError):
            tmsv_coefficients(z)

    def test_squeezing_for_mean_photon(self) -> None:
        z = squeezing_for_mean_photon(2.0)
        assert mean_photon(tmsv_coefficients(z)) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            squeezing_for_mean_photon(-1.0)


class TestPhotonAddedSubtracted:
    def test_added_vacuum_becomes_fock(self) -> None:
        state = mpa_coefficients(0.0, 2)
        assert state.m_min == 2
        assert state.amplitudes[0] == 1.0
        assert mean_photon(state) == 2.0

    def test_subtracted_vacuum_survives(self) -> None:
        for kappa in (1, 2, 5):
            state = mps_coefficients(0.0, kappa)
            assert state.m_min == 0
            assert state.amplitudes[0] == 1.0
            assert mean_photon(state) == 0.0

    def test_normalized(self) -> None:
        state = mpa_coefficients(0.6, 3)
        assert np.sum(state.amplitudes**2) == pytest.approx(1.0, abs=1e-12)
        assert state.m_min == 3

    def test_normalizer(self, mpa_half: DiagonalSchmidtState) -> None:
        assert mpa_coefficients(math.sqrt(0.5), 1).normalizer == pytest.approx(
            12.0, rel=1e-12
        )
        assert mpa_half.normalizer == mps_coefficients(0.5, 1).normalizer

    @pytest.mark.parametrize("kappa", [1, 2, 3], ids=str)
    def test_matches_2f1(self, kappa: int) -> None:
        z = 0.55
        state = mpa_coefficients(z, kappa)
        n = np.arange(state.amplitudes.size)
        raw = z ** (2 * n) * binomial_recurrence(kappa, n.size) ** 2
        expected = raw / gauss_2f1_diagonal(kappa, z * z)
        np.testing.assert_allclose(state.probabilities, expected, atol=1e-10)

    def test_subtracted_shifts_added(self) -> None:
        added = mpa_coefficients(0.4, 1)
        subtracted = mps_coefficients(0.4, 1)
        assert added.m_min == 1 and subtracted.m_min == 0
        np.testing.assert_allclose(added.amplitudes, subtracted.amplitudes)
        m = subtracted.joint_photons
        expected = 0.4**m * (m + 1)
        np.testing.assert_allclose(
            subtracted.amplitudes, expected / np.linalg.norm(expected)
        )

    @pytest.mark.parametrize("build", [mpa_coefficients, mps_coefficients])
    def test_mean_photon_increasing(self, build) -> None:
        for kappa in (1, 2, 3):
            grid = np.linspace(0.0, 0.8, 9)
            means = [mean_photon(build(z, kappa)) for z in grid]
            assert np.all(np.diff(means) > 0.0)

    def test_kappa_domain(self) -> None:
        with pytest.raises(DomainError):
            mpa_coefficients(0.5, 0)
        with pytest.raises(DomainError):
            mps_coefficients(0.5, -1)

    def test_cutoff_cannot_hold_added_photons(self) -> None:
        with pytest.raises(TruncationError):
            mpa_coefficients(0.1, 2, TruncationSpec(2, 2, 2))

    def test_density(self, mps_half: DiagonalSchmidtState) -> None:
        dim = mps_half.m_max + 1
        rho = mps_half.density(dim, dim)
        rho.check_density()
        idler = partial_trace(rho, "S")
        np.testing.assert_allclose(
            idler.diagonal().real, mps_half.probabilities, atol=1e-14
        )

    def test_padded(self, mpa_half: DiagonalSchmidtState) -> None:
        padded = mpa_half.padded()
        assert padded[0] == 0.0
        np.testing.assert_array_equal(padded[1:], mpa_half.amplitudes)
        with pytest.raises(TruncationError):
            mpa_half.padded(mpa_half.m_max)


class TestSchmidtForMeanPhoton:
    @pytest.mark.parametrize(
        "variant, kappa, N_S",
        [
            ("tmsv", 0, 0.7),
            ("photon_added", 1, 2.5),
            ("photon_added", 2, 2.1),
            ("photon_subtracted", 2, 0.3),
            ("photon_subtracted", 1, 4.0),
        ],
        ids=["tmsv", "mpa1", "mpa2", "mps2", "mps1"],
    )
    def test_inverse(self, variant: str, kappa: int, N_S: float) -> None:
        z = schmidt_for_mean_photon(variant, kappa, N_S)
        state = schmidt_state(variant, z, kappa)
        assert mean_photon(state) == pytest.approx(N_S, rel=1e-9)

    def test_floor(self) -> None:
        assert schmidt_for_mean_photon("photon_added", 2, 2.0) == 0.0
        with pytest.raises(DomainError):
            schmidt_for_mean_photon("photon_added", 2, 1.5)

    def test_dispatch(self) -> None:
        assert schmidt_state("photon_added", 0.3, 0).variant == "tmsv"
        assert schmidt_state("photon_subtracted", 0.3, 2).m_min == 0
        with pytest.raises(DomainError):
            schmidt_state("custom", 0.3, 1)


class TestCustomState:
    def test_from_amplitudes(self) -> None:
        state = DiagonalSchmidtState.from_amplitudes([1.0, -1.0], m_min=3)
        np.testing.assert_allclose(state.amplitudes, [0.5**0.5, -(0.5**0.5)])
        assert state.variant == "custom"
        assert mean_photon(state) == pytest.approx(3.5)

    def test_zero_vector(self) -> None:
        with pytest.raises(DomainError):
            DiagonalSchmidtState.from_amplitudes([0.0, 0.0])

    def test_invalid(self) -> None:
        with pytest.raises(DomainError):
            DiagonalSchmidtState(0, np.array([0.6, 0.6]), 0.5, 0, "tmsv")
        with pytest.raises(DomainError):
            DiagonalSchmidtState(0, np.array([0.6, -0.8]), 0.5, 0, "tmsv")
        with pytest.raises(DomainError):
            DiagonalSchmidtState(0, np.array([1.0]), 0.5, 0, "squeezed")

    def test_from_dict(self, mpa_half: DiagonalSchmidtState) -> None:
        state = DiagonalSchmidtState.from_dict(mpa_half.to_dict())
        assert state.m_min == mpa_half.m_min
        np.testing.assert_array_equal(state.amplitudes, mpa_half.amplitudes)


class TestGeneralizedCoherent:
    def test_weights(self, kerr_state: GeneralizedCoherent) -> None:
        assert kerr_state.poisson_weights.sum() == pytest.approx(1.0)
        assert kerr_state.tail_mass < 1e-12
        kerr_state.density().check_density()

    def test_plain_coherent(self) -> None:
        state = GeneralizedCoherent(alpha=1.5 - 0.5j)
        assert coherent_a_expectation(state) == 1.5 - 0.5j

    @pytest.mark.parametrize("chi", [0.3, 1.0, math.pi], ids=str)
    def test_linear_phase_rotates(self, chi: float) -> None:
        state = GeneralizedCoherent(alpha=1.1, chi=chi, epsilon=1.0)
        expected = 1.1 * cmath.exp(-1j * chi)
        assert abs(coherent_a_expectation(state) - expected) < 1e-12

    def test_kerr_half_turn_flips_sign(self) -> None:
        state = GeneralizedCoherent(alpha=1.0, chi=math.pi, epsilon=2.0)
        assert abs(coherent_a_expectation(state) + 1.0) < 1e-12

    def test_kerr_dephases(self, kerr_state: GeneralizedCoherent) -> None:
        assert abs(coherent_a_expectation(kerr_state)) < 1.2 - 1e-3

    def test_expectation_matches_density(
        self, kerr_state: GeneralizedCoherent
    ) -> None:
        ket = kerr_state.ket()
        direct = np.vdot(ket[:-1], np.sqrt(np.arange(1, ket.size)) * ket[1:])
        assert abs(coherent_a_expectation(kerr_state) - direct) < 1e-10

    @given(
        modulus=st.floats(min_value=0.0, max_value=3.0),
        angle=st.floats(min_value=0.0, max_value=2 * math.pi),
        chi=st.floats(min_value=0.0, max_value=2 * math.pi),
        epsilon=st.floats(min_value=0.5, max_value=3.0),
    )
    def test_cauchy_schwarz(
        self, modulus: float, angle: float, chi: float, epsilon: float
    ) -> None:
        alpha = modulus * cmath.exp(1j * angle)
        state = GeneralizedCoherent(alpha=alpha, chi=chi, epsilon=epsilon)
        bound = abs(alpha) ** 2 + 1e-12
        assert abs(coherent_a_expectation(state)) ** 2 <= bound

    def test_invalid(self) -> None:
        with pytest.raises(DomainError):
            GeneralizedCoherent(alpha=1.0, epsilon=0.0)
        with pytest.raises(DomainError):
            GeneralizedCoherent(alpha=1.0, cutoff=1)
        with pytest.raises(TruncationError):
            GeneralizedCoherent(alpha=2.0, cutoff=3)


class TestPsiToy:
    def test_minus_vacuum(self) -> None:
        state = psi_toy(0.0, MINUS)
        assert state.mean_photon == 0.0
        np.testing.assert_array_equal(state.schmidt().padded(2), [1.0, 0.0])

    def test_plus_full(self) -> None:
        state = psi_toy(1.0, PLUS)
        assert state.mean_photon == 2.0
        np.testing.assert_array_equal(state.schmidt().padded(3), [0, 0, 1])

    def test_minus_half(self) -> None:
        schmidt = psi_toy(0.5, MINUS).schmidt()
        np.testing.assert_allclose(schmidt.amplitudes, [0.5**0.5, 0.5**0.5])
        assert mean_photon(schmidt) == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "p, sign",
        [(-0.1, PLUS), (1.1, MINUS), (0.5, "neutral")],
        ids=["negative", "above_one", "bad_sign"],
    )
    def test_invalid(self, p: float, sign: str) -> None:
        with pytest.raises(DomainError):
            psi_toy(p, sign)

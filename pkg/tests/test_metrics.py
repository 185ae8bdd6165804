import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qillum.analytics.metrics import (
    EnvironmentSpec,
    FisherReport,
    MeasurementMoments,
    averaged_qfi,
    averaged_qfi_psi,
    chernoff_bound,
    exponential_bound,
    is_optimal,
    moments_joint_photon,
    moments_quadrature,
    optimality_gap,
    perr_from_fisher,
    perr_from_snr,
    psi_plus_optimum,
    qfi_ci,
    qfi_coherent,
    qfi_psi,
    qfi_schmidt,
    qfi_tmsv,
    quantum_advantage,
    relative_optimality_gap,
    snr,
    snr_error_bounds,
)
from qillum.constants import EXPONENTIAL_BOUND_CROSSOVER
from qillum.exceptions import DegenerateMeasurementError, DomainError
from qillum.states.probes import (
    mean_photon,
    mpa_coefficients,
    mps_coefficients,
    psi_toy,
    schmidt_cutoff,
    squeezing_for_mean_photon,
    squeezing_from_r,
    tmsv_coefficients,
)
from qillum.states.series import MINUS, PLUS, gauss_2f1_diagonal
from qillum.utils import binomial_recurrence

ETA = 0.01
UNIT_PHASE = complex(math.cos(0.7), math.sin(0.7))
ERFC_REFERENCE = [
    (0.5, 0.479500122186953),
    (1.0, 0.157299207050285),
    (2.0, 0.004677734981047),
]


def branchwise_qfi(sign: str, kappa: int, z: float, N_B: float) -> float:
    """QFI summed over the photon-added or photon-subtracted index ``n``
    rather than the joint photon number.
    """
    t = N_B / (1.0 + N_B)
    count = schmidt_cutoff(z, kappa) + kappa + 1
    norm = math.sqrt(gauss_2f1_diagonal(kappa, z * z))
    binomials = binomial_recurrence(kappa, count)
    if sign == PLUS:
        n = np.arange(count)
        C = z**n * binomials / norm
        photons = n + kappa
    else:
        n = np.arange(kappa, kappa + count)
        C = z ** (n - kappa) * binomials / norm
        photons = n - kappa
    lower, upper = C[:-1] ** 2, C[1:] ** 2
    terms = lower * upper * photons[1:] / (lower + upper * t)
    return float(4.0 / (1.0 + N_B) * terms.sum())


class TestEnvironmentSpec:
    def test_defaults(self) -> None:
        env = EnvironmentSpec(10.0)
        assert env.eta == 0.01 and env.M == 1
        assert env.reflectivity == pytest.approx(0.01**2, rel=1e-4)

    @pytest.mark.parametrize(
        "N_B, eta, M",
        [(-1.0, 0.01, 1), (1.0, 0.2, 1), (1.0, -0.01, 1), (1.0, 0.01, 0)],
        ids=["negative_nb", "large_eta", "negative_eta", "zero_copies"],
    )
    def test_invalid(self, N_B: float, eta: float, M: int) -> None:
        with pytest.raises(DomainError):
            EnvironmentSpec(N_B, eta, M)


class TestMeasurementMoments:
    def test_properties(self) -> None:
        moments = MeasurementMoments(1.0, 3.0, 4.0, 9.0, ETA)
        assert moments.sigma0 == 2.0 and moments.sigma1 == 3.0
        assert moments.gap == 2.0
        assert MeasurementMoments.from_dict(moments.to_dict()) == moments

    def test_negative_variance(self) -> None:
        with pytest.raises(DomainError):
            MeasurementMoments(0.0, 1.0, -1.0, 1.0, ETA)


class TestFisherReport:
    def test_discrepancy(self) -> None:
        report = FisherReport(qfi_analytic=0.25, qfi_oracle=0.2500001)
        assert report.relative_discrepancy == pytest.approx(4e-7)
        assert FisherReport(0.25).relative_discrepancy is None
        assert FisherReport(0.0, qfi_oracle=1e-9).relative_discrepancy == 1e-9

    @pytest.mark.parametrize(
        "cfi, snr_over_eta, expected",
        [(0.2, 0.2, True), (0.3, 0.2, False), (0.1, 0.2, False)],
        ids=["ordered", "cfi_above_qfi", "snr_above_cfi"],
    )
    def test_hierarchy(
        self, cfi: float, snr_over_eta: float, expected: bool
    ) -> None:
        report = FisherReport(0.25, cfi=cfi, snr_over_eta=snr_over_eta)
        assert report.hierarchy_ok() is expected

    def test_hierarchy_prefers_oracle(self) -> None:
        report = FisherReport(0.25, qfi_oracle=0.2, cfi=0.22)
        assert not report.hierarchy_ok()

    def test_to_dict(self) -> None:
        report = FisherReport(0.25, 0.25, config={"family": "tmsv"})
        out = report.to_dict()
        assert out["relative_discrepancy"] == 0.0
        assert out["config"] == {"family": "tmsv"}


class TestClassicalIllumination:
    def test_useless_probe(self) -> None:
        assert qfi_ci(0j, 10.0) == 0.0

    def test_coherent(self) -> None:
        assert qfi_ci(1.0, 10.0) == pytest.approx(4.0 / 21.0)
        assert qfi_ci(UNIT_PHASE, 10.0) == pytest.approx(4.0 / 21.0)
        assert qfi_coherent(1.0, 10.0) == pytest.approx(0.190476, abs=1e-6)

    @pytest.mark.parametrize("N_S", [0.1, 1.0, 7.0], ids=str)
    def test_vacuum_environment(self, N_S: float) -> None:
        assert qfi_coherent(N_S, 0.0) == pytest.approx(4.0 * N_S)
        assert qfi_tmsv(N_S, 0.0) == pytest.approx(4.0 * N_S)

    def test_negative_nb(self) -> None:
        with pytest.raises(DomainError):
            qfi_ci(1.0, -0.5)


class TestQfiTmsv:
    def test_reference(self) -> None:
        assert qfi_tmsv(1.0, 10.0) == pytest.approx(0.25, rel=1e-15)

    def test_bright_limit(self) -> None:
        assert qfi_tmsv(1e6, 10.0) / qfi_coherent(1e6, 10.0) == pytest.approx(
            1.0, abs=1e-5
        )

    @pytest.mark.parametrize("z", [0.1, 0.5, 0.8], ids=str)
    def test_matches_schmidt(self, z: float) -> None:
        state = tmsv_coefficients(z)
        N_S = z * z / (1.0 - z * z)
        assert qfi_schmidt(state, 10.0) == pytest.approx(
            qfi_tmsv(N_S, 10.0), rel=1e-10
        )

    def test_negative(self) -> None:
        with pytest.raises(DomainError):
            qfi_tmsv(-1.0, 1.0)


class TestQfiSchmidt:
    def test_single_amplitude(self) -> None:
        assert qfi_schmidt(mpa_coefficients(0.0, 1), 10.0) == 0.0

    def test_psi_minus(self) -> None:
        state = psi_toy(0.5, MINUS).schmidt()
        assert qfi_schmidt(state, 10.0) == pytest.approx(
            qfi_psi(0.5, MINUS, 10.0), rel=1e-14
        )

    def test_psi_plus(self) -> None:
        state = psi_toy(0.3, PLUS).schmidt()
        assert qfi_schmidt(state, 2.0) == pytest.approx(
            qfi_psi(0.3, PLUS, 2.0), rel=1e-14
        )

    @pytest.mark.parametrize("kappa", [1, 2, 3], ids=str)
    @pytest.mark.parametrize("z", [0.2, 0.6, 0.9], ids=str)
    @pytest.mark.parametrize("sign", [PLUS, MINUS])
    def test_branch_equivalence(self, sign: str, kappa: int, z: float) -> None:
        build = mpa_coefficients if sign == PLUS else mps_coefficients
        assert qfi_schmidt(build(z, kappa), 10.0) == pytest.approx(
            branchwise_qfi(sign, kappa, z, 10.0), rel=1e-10
        )

    @pytest.mark.parametrize(
        "build", [tmsv_coefficients, mpa_coefficients, mps_coefficients]
    )
    def test_decreasing_in_background(self, build) -> None:
        state = build(0.5) if build is tmsv_coefficients else build(0.5, 2)
        backgrounds = (0.0, 0.5, 1.0, 5.0, 20.0)
        values = [qfi_schmidt(state, N_B) for N_B in backgrounds]
        assert np.all(np.diff(values) < 0.0)


class TestAveragedQfi:
    def test_subtracted_endpoint(self) -> None:
        for kappa in (1, 2, 3):
            state = mps_coefficients(squeezing_from_r(1e-3), kappa)
            qfi = qfi_schmidt(state, 10.0)
            averaged = averaged_qfi(qfi, mean_photon(state))
            assert averaged == pytest.approx(4.0 / 11.0, abs=1e-3)

    def test_added_endpoint(self) -> None:
        for kappa in (1, 2, 3):
            state = mpa_coefficients(squeezing_from_r(1e-4), kappa)
            qfi = qfi_schmidt(state, 10.0)
            averaged = averaged_qfi(qfi, mean_photon(state))
            assert abs(averaged) < 1e-6

    @staticmethod
    def averaged(state) -> float:
        return averaged_qfi(qfi_schmidt(state, 10.0), mean_photon(state))

    def relative_gap(self, build, kappa: int, r: float) -> float:
        z = squeezing_from_r(r)
        tmsv = self.averaged(tmsv_coefficients(z))
        return self.averaged(build(z, kappa)) / tmsv - 1.0

    @pytest.mark.parametrize("kappa", [1, 2, 3], ids=str)
    @pytest.mark.parametrize(
        "build", [mpa_coefficients, mps_coefficients], ids=["mpa", "mps"]
    )
    def test_merges_with_tmsv(self, build, kappa: int) -> None:
        gaps = [
            abs(self.relative_gap(build, kappa, r)) for r in (1.5, 2.25, 3.0)
        ]
        assert gaps[0] <= 0.10
        assert gaps[-1] <= 0.02
        assert gaps[0] > gaps[1] > gaps[2]

    def test_zero_photons(self) -> None:
        with pytest.raises(DomainError):
            averaged_qfi(0.0, 0.0)


class TestQfiPsi:
    @pytest.mark.parametrize("p", [0.0, 1.0], ids=str)
    @pytest.mark.parametrize("sign", [PLUS, MINUS])
    def test_endpoints(self, p: float, sign: str) -> None:
        assert qfi_psi(p, sign, 10.0) == 0.0

    def test_plus_is_twice_minus(self) -> None:
        assert qfi_psi(0.4, PLUS, 3.0) == pytest.approx(
            2.0 * qfi_psi(0.4, MINUS, 3.0)
        )

    def test_minus_averaged_at_vacuum(self) -> None:
        assert averaged_qfi_psi(0.0, MINUS, 10.0) == pytest.approx(4.0 / 11.0)
        assert averaged_qfi_psi(1e-9, MINUS, 10.0) == pytest.approx(
            4.0 / 11.0, rel=1e-8
        )

    def test_averaged_matches_ratio(self) -> None:
        for sign, N_S in ((PLUS, 1.3), (MINUS, 0.3)):
            assert averaged_qfi_psi(0.3, sign, 4.0) == pytest.approx(
                qfi_psi(0.3, sign, 4.0) / N_S
            )

    @pytest.mark.parametrize("N_B", [0.5, 1.0, 10.0], ids=str)
    def test_plus_optimum(self, N_B: float) -> None:
        p_star = psi_plus_optimum(N_B)
        grid = np.linspace(0.0, 1.0, 10001)
        values = [averaged_qfi_psi(p, PLUS, N_B) for p in grid]
        assert p_star == pytest.approx(grid[int(np.argmax(values))], abs=2e-4)
        assert averaged_qfi_psi(p_star, PLUS, N_B) >= max(values) - 1e-12

    def test_plus_optimum_reference(self) -> None:
        assert psi_plus_optimum(10.0) == pytest.approx(0.4258, abs=1e-4)

    @pytest.mark.parametrize("p", [-0.1, 1.1], ids=str)
    def test_invalid_p(self, p: float) -> None:
        with pytest.raises(DomainError):
            qfi_psi(p, PLUS, 1.0)

    def test_invalid_sign(self) -> None:
        with pytest.raises(DomainError):
            qfi_psi(0.5, "neutral", 1.0)


class TestMoments:
    def test_quadrature_matched(self) -> None:
        a = 1.2 * complex(math.cos(0.4), math.sin(0.4))
        moments = moments_quadrature(a, 0.4, 10.0, ETA)
        assert moments.gap == pytest.approx(2.0 * ETA * 1.2)
        assert moments.var0 == moments.var1 == 21.0

    def test_quadrature_orthogonal(self) -> None:
        moments = moments_quadrature(1.0, math.pi / 2, 10.0, ETA)
        assert abs(moments.gap) < 1e-17

    def test_quadrature_shot_noise(self) -> None:
        assert moments_quadrature(1.0, 0.0, 0.0, ETA).var0 == 1.0

    def test_joint_photon_tmsv(self) -> None:
        state = tmsv_coefficients(squeezing_for_mean_photon(1.0))
        moments = moments_joint_photon(state, 10.0, ETA)
        assert moments.gap == pytest.approx(2.0 * ETA * math.sqrt(2.0))
        assert moments.var0 == pytest.approx(32.0)

    def test_joint_photon_single_amplitude(self) -> None:
        moments = moments_joint_photon(mpa_coefficients(0.0, 2), 1.0, ETA)
        assert moments.gap == 0.0


class TestSnr:
    def test_no_signal(self) -> None:
        assert snr(MeasurementMoments(0.5, 0.5, 1.0, 1.0, ETA)) == 0.0

    def test_degenerate(self) -> None:
        with pytest.raises(DegenerateMeasurementError):
            snr(MeasurementMoments(0.0, 1.0, 0.0, 0.0, ETA))

    @pytest.mark.parametrize("N_S", [0.01, 1.0, 5.0], ids=str)
    def test_tmsv_optimal(self, N_S: float) -> None:
        state = tmsv_coefficients(squeezing_for_mean_photon(N_S))
        moments = moments_joint_photon(state, 10.0, ETA)
        qfi = qfi_tmsv(mean_photon(state), 10.0)
        expected = math.sqrt(qfi) / 2.0
        assert snr(moments) / ETA == pytest.approx(expected, rel=1e-10)
        assert abs(optimality_gap(moments, qfi)) < 1e-10
        assert is_optimal(moments, qfi)

    def test_coherent_optimal(self) -> None:
        a = 0.8 - 0.6j
        moments = moments_quadrature(a, math.atan2(-0.6, 0.8), 3.0, ETA)
        qfi = qfi_ci(a, 3.0)
        assert snr(moments) / ETA == pytest.approx(math.sqrt(qfi) / 2)

    def test_squared_gap_identity(self) -> None:
        state = mps_coefficients(0.4, 2)
        moments = moments_joint_photon(state, 2.0, ETA)
        expected = moments.gap**2 / (ETA**2 * 4.0 * moments.var0)
        assert (snr(moments) / ETA) ** 2 == pytest.approx(expected, rel=1e-14)


class TestOptimalityGap:
    @pytest.mark.parametrize("kappa", [1, 2, 3], ids=str)
    @pytest.mark.parametrize("r", [0.05, 0.5, 1.0, 1.5], ids=str)
    def test_subtracted_nearly_optimal(self, kappa: int, r: float) -> None:
        state = mps_coefficients(squeezing_from_r(r), kappa)
        moments = moments_joint_photon(state, 10.0, ETA)
        gap = relative_optimality_gap(moments, qfi_schmidt(state, 10.0))
        assert abs(gap) < 1e-2

    def test_added_suboptimal_at_small_squeezing(self) -> None:
        state = mpa_coefficients(squeezing_from_r(0.05), 1)
        moments = moments_joint_photon(state, 10.0, ETA)
        qfi = qfi_schmidt(state, 10.0)
        assert optimality_gap(moments, qfi) < 0.0
        assert relative_optimality_gap(moments, qfi) < -0.1
        assert not is_optimal(moments, qfi, rtol=1e-2)

    def test_needs_eta(self) -> None:
        with pytest.raises(DomainError):
            optimality_gap(MeasurementMoments(0, 0, 1, 1, 0.0), 1.0)

    def test_zero_qfi(self) -> None:
        with pytest.raises(DegenerateMeasurementError):
            relative_optimality_gap(MeasurementMoments(0, 0, 1, 1, ETA), 0.0)


class TestErrorProbabilities:
    def test_guessing(self) -> None:
        assert perr_from_snr(0.0, 7) == 0.5
        assert perr_from_fisher(0.0, ETA, 100) == 0.25

    @pytest.mark.parametrize(
        "x, erfc_x", ERFC_REFERENCE, ids=[str(x) for x, _ in ERFC_REFERENCE]
    )
    def test_erfc_reference(self, x: float, erfc_x: float) -> None:
        assert perr_from_snr(x, 2) == pytest.approx(0.5 * erfc_x, abs=1e-14)

    def test_many_copies(self) -> None:
        assert perr_from_snr(0.1, 100) == pytest.approx(
            0.5 * math.erfc(math.sqrt(50.0) * 0.1), rel=1e-14
        )

    @given(
        R=st.floats(min_value=1e-3, max_value=5.0),
        M=st.integers(min_value=1, max_value=10_000),
    )
    def test_bound_ordering(self, R: float, M: int) -> None:
        bounds = snr_error_bounds(R, M)
        assert bounds.erfc_form <= bounds.chernoff_form
        y = math.sqrt(M / 2.0) * R
        if EXPONENTIAL_BOUND_CROSSOVER + 1e-3 < y < 20.0:
            assert bounds.erfc_form < bounds.exponential_form

    def test_exponential_form_not_a_bound_near_zero(self) -> None:
        assert perr_from_snr(0.1, 1) > exponential_bound(0.1, 1)
        assert perr_from_snr(0.1, 1) < chernoff_bound(0.1, 1)

    def test_fisher_hierarchy(self) -> None:
        qfi, cfi, snr_over_eta = 0.25, 0.2, 0.2
        M = 50_000
        p_qfi = perr_from_fisher(qfi, ETA, M)
        p_cfi = perr_from_fisher(cfi, ETA, M)
        p_snr = exponential_bound(snr_over_eta * ETA, M)
        assert p_qfi <= p_cfi <= p_snr

    def test_snr_equals_fisher_when_optimal(self) -> None:
        F, M = 0.25, 1000
        R = ETA * math.sqrt(F) / 2.0
        assert exponential_bound(R, M) == pytest.approx(
            perr_from_fisher(F, ETA, M), rel=1e-14
        )

    def test_invalid(self) -> None:
        with pytest.raises(DomainError):
            perr_from_snr(-0.1, 1)
        with pytest.raises(DomainError):
            perr_from_fisher(-1.0, ETA, 1)


class TestQuantumAdvantage:
    @pytest.mark.parametrize("N_S", [1e-4, 1e-3], ids=str)
    @pytest.mark.parametrize("N_B", [10.0, 100.0], ids=str)
    def test_three_db_limit(self, N_B: float, N_S: float) -> None:
        limit = (1.0 + 2.0 * N_B) / (1.0 + N_B)
        ratio = quantum_advantage(qfi_tmsv(N_S, N_B), N_S, N_B)
        assert ratio < limit
        assert abs(ratio / limit - 1.0) <= N_S

    def test_dim_tmsv(self) -> None:
        N_S = 1e-4
        ratio = quantum_advantage(qfi_tmsv(N_S, 10.0), N_S, 10.0)
        assert ratio == pytest.approx(21.0 / 11.0, abs=1e-3)

    def test_bright_tmsv(self) -> None:
        N_S = 1e6
        ratio = quantum_advantage(qfi_tmsv(N_S, 10.0), N_S, 10.0)
        assert ratio == pytest.approx(1.0, abs=1e-4)

    def test_coherent(self) -> None:
        assert quantum_advantage(qfi_coherent(2.0, 3.0), 2.0, 3.0) == 1.0

    def test_zero_photons(self) -> None:
        with pytest.raises(DomainError):
            quantum_advantage(0.0, 0.0, 1.0)

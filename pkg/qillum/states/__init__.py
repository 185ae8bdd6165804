from qillum.states.probes import (
    DiagonalSchmidtState,
    GeneralizedCoherent,
    PsiToyState,
    coherent_a_expectation,
    mean_photon,
    mpa_coefficients,
    mps_coefficients,
    psi_toy,
    schmidt_cutoff,
    schmidt_for_mean_photon,
    schmidt_state,
    squeezing_for_mean_photon,
    squeezing_from_r,
    tmsv_coefficients,
)
from qillum.states.series import gauss_2f1_diagonal, normalization_factor

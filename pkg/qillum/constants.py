from typing import Any

# Fock-space truncation
DEFAULT_TAIL_TOLERANCE = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
COMMUTATOR_TOL = 1e-10

# Infinite series (2F1, normalization factors, mean photon inversion)
SERIES_RTOL = 1e-15
SERIES_MAX_TERMS = 10**6

# Small-reflectivity regime
DEFAULT_ETA = 0.01
MAX_SMALL_ETA = 0.1

# Optimality certification, relative to sqrt(qfi) / 2
OPTIMALITY_RTOL_ANALYTIC = 1e-6
OPTIMALITY_RTOL_NUMERIC = 1e-2

# Oracle
VERIFY_RTOL = 1e-6
HIERARCHY_TOL = 1e-9
SLD_NULL_DENOMINATOR = 1e-300
SLD_NULL_NUMERATOR = 1e-14
BASIS_ORTHONORMAL_TOL = 1e-10
FINITE_DIFFERENCE_STEP = 1e-3
FINITE_DIFFERENCE_RTOL = 1e-4

# Detection
HIERARCHY_SLACK = 1e-12
DEFAULT_CHUNK = 10_000
# ½erfc(x) < ¼exp(-x²) only holds above the root of erfcx(x) = ½.
EXPONENTIAL_BOUND_CROSSOVER = 0.7689

# Output
CSV_FLOAT_FORMAT = "%.12g"
PRESET_POINTS = 151
PRESET_N_B = 10.0

FAMILIES = (
    "coherent",
    "generalized_coherent",
    "tmsv",
    "mpa",
    "mps",
    "psi_plus",
    "psi_minus",
)
SCHMIDT_FAMILIES = ("tmsv", "mpa", "mps")
CI_FAMILIES = ("coherent", "generalized_coherent")
PSI_FAMILIES = ("psi_plus", "psi_minus")

SWEEP_AXES = ("r", "N_S", "p")
SWEEP_OUTPUTS = (
    "qfi",
    "averaged_qfi",
    "snr_over_eta",
    "advantage",
    "g2",
    "mean_photon",
)


def _preset(
    family: str, axis: str, bounds: tuple[float, float], outputs: list[str]
) -> dict[str, Any]:
    return {
        "family": family,
        "kappa_list": [0, 1, 2, 3],
        "axis": axis,
        "axis_min": bounds[0],
        "axis_max": bounds[1],
        "axis_points": PRESET_POINTS,
        "N_B": PRESET_N_B,
        "eta": DEFAULT_ETA,
        "outputs": outputs,
    }


# κ = 0 columns hold the TMSV baseline.
PRESETS: dict[str, dict[str, Any]] = {
    "fig2a": _preset("mpa", "r", (0.0, 1.5), ["mean_photon"]),
    "fig2b": _preset("mps", "r", (0.0, 1.5), ["mean_photon"]),
    "fig2c": _preset("mpa", "r", (0.0, 1.5), ["snr_over_eta", "qfi"]),
    "fig2d": _preset("mps", "r", (0.0, 1.5), ["snr_over_eta", "qfi"]),
    "fig3a": _preset("mpa", "r", (0.01, 1.5), ["averaged_qfi"]),
    "fig3b": _preset("mps", "r", (0.01, 1.5), ["averaged_qfi"]),
    "fig3c": _preset("mpa", "N_S", (0.05, 10.0), ["advantage"]),
    "fig3d": _preset("mps", "N_S", (0.05, 10.0), ["advantage"]),
    "fig3e": _preset("mpa", "N_S", (0.05, 10.0), ["g2"]),
    "fig3f": _preset("mps", "N_S", (0.05, 10.0), ["g2"]),
}

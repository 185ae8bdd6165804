from qillum.oracle.sld import (
    DerivativeAtZero,
    cfi_fock_counting,
    cfi_measurement,
    check_selection_rule,
    derivative_ci,
    derivative_finite_difference,
    derivative_schmidt,
    joint_photon_observable,
    moments_numeric,
    natural_observable,
    qfi_numeric,
    quadrature_observable,
    random_orthonormal_basis,
)
from qillum.oracle.verify import (
    ConfigurationFailure,
    OracleConfig,
    default_grid,
    run_configuration,
    verify_closed_forms,
)

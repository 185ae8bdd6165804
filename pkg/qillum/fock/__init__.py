from qillum.fock.core import (
    DenseOperator,
    ThermalSpectrum,
    TruncationSpec,
    annihilation_matrix,
    beamsplitter_generator,
    commutator,
    embed,
    evolve_small_eta,
    expectation,
    identity,
    number_operator,
    partial_trace,
    tensor_product,
    thermal_cutoff,
    thermal_state,
)

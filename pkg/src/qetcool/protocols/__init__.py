from ..qcore import expected_energy
from .compression import compress_with_correlations, compress_without_correlations, target_purity
from .hbac import (
    BATH_MODELS,
    CoolingTrace,
    PpaConfig,
    bath_polarization,
    bath_qubit,
    ppa_compression_sort,
    ppa_reset,
    run_ppa,
    run_srg2,
    srg2_round,
    srg2_weights,
    target_basis_order,
)
from .qet import (
    EXAMPLE_J,
    EXAMPLE_K,
    PROJECTIVE_X,
    BobRotation,
    PovmX,
    ProtocolOutcome,
    bob_unitary,
    coupling_unitary,
    hotta_bob_rotation,
    povm_operators,
    projective_x_povm,
    qet2_closed_forms,
    qet2_final_state,
    qet2a_closed_form_purity,
    qet2a_initial_state,
    run_qet2,
    run_qet2a,
    single_entry_coupling,
    trivial_povm,
)

__all__ = [
    "compress_with_correlations",
    "compress_without_correlations",
    "target_purity",
    "BATH_MODELS",
    "BobRotation",
    "CoolingTrace",
    "EXAMPLE_J",
    "EXAMPLE_K",
    "PROJECTIVE_X",
    "PovmX",
    "PpaConfig",
    "ProtocolOutcome",
    "bath_polarization",
    "bath_qubit",
    "bob_unitary",
    "coupling_unitary",
    "expected_energy",
    "hotta_bob_rotation",
    "povm_operators",
    "ppa_compression_sort",
    "ppa_reset",
    "projective_x_povm",
    "qet2_closed_forms",
    "qet2_final_state",
    "qet2a_closed_form_purity",
    "qet2a_initial_state",
    "run_ppa",
    "run_qet2",
    "run_qet2a",
    "run_srg2",
    "single_entry_coupling",
    "srg2_round",
    "srg2_weights",
    "target_basis_order",
    "trivial_povm",
]

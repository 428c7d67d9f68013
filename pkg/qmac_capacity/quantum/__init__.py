"""
Finite-dimensional quantum information kernel for multiple-access channels
"""

from .linalg import (
    SubsystemLayout,
    dagger,
    partial_trace,
    permute_subsystems,
    psd_sqrt,
    tensor,
    tensor_all,
)

from .states import (
    CqEnsemble,
    CqqState,
    DensityMatrix,
    PureState,
    assemble_cqq,
    basis_state,
    classical_state,
    density_from_matrix,
    maximally_entangled,
    maximally_mixed,
    pure_state,
    purify,
    random_cqq,
    random_density,
    random_pure,
    random_unitary,
    split_cqq,
    weyl_unitaries,
)

from .channels import (
    QuantumChannel,
    QuantumInstrument,
    align_input,
    apply,
    channel_from_kraus,
    check_degrading,
    collective_phase_flip,
    complementary,
    dephasing,
    erasure_mac,
    isometric_extension,
    tensor_power,
)

from .information import (
    binary_entropy,
    channel_coherent_information,
    coherent_information,
    conditional_coherent_information,
    entropy,
    fidelity,
    instrument_coherent_information,
    mutual_information,
    trace_distance,
)

from .properties import (
    PropertyReport,
    run_property_suite
)

__all__ = [
    'SubsystemLayout',
    'dagger',
    'partial_trace',
    'permute_subsystems',
    'psd_sqrt',
    'tensor',
    'tensor_all',
    'CqEnsemble',
    'CqqState',
    'DensityMatrix',
    'PureState',
    'assemble_cqq',
    'basis_state',
    'classical_state',
    'density_from_matrix',
    'maximally_entangled',
    'maximally_mixed',
    'pure_state',
    'purify',
    'random_cqq',
    'random_density',
    'random_pure',
    'random_unitary',
    'split_cqq',
    'weyl_unitaries',
    'QuantumChannel',
    'QuantumInstrument',
    'align_input',
    'apply',
    'channel_from_kraus',
    'check_degrading',
    'collective_phase_flip',
    'complementary',
    'dephasing',
    'erasure_mac',
    'isometric_extension',
    'tensor_power',
    'binary_entropy',
    'channel_coherent_information',
    'coherent_information',
    'conditional_coherent_information',
    'entropy',
    'fidelity',
    'instrument_coherent_information',
    'mutual_information',
    'trace_distance',
    'PropertyReport',
    'run_property_suite'
]

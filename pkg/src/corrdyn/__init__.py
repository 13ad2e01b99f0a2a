"""corrdyn: spatial correlations in quantum dynamics.

Exact Choi-state correlation measure, measurement-based lower bounds,
engineered dephasing/decay noise models, simulated tomography with
maximum-likelihood reconstruction, and scenario runners that reproduce the
trapped-ion result sets end to end.
"""

from .linalg import (
    DensityMatrix,
    Observable,
    fidelity,
    kron,
    kron_all,
    mutual_information,
    partial_trace,
    random_density_matrix,
    random_observable,
    random_pure_state,
    random_unitary,
    relative_entropy,
    support_contained,
    trace_distance,
    trace_norm,
    vn_entropy,
)
from .channels import (
    PAULI,
    PauliOpBasis,
    QuantumChannel,
    apply_channel,
    chi_to_kraus,
    choi_state,
    compose_channels,
    depolarizing_channel,
    full_dephasing_channel,
    identity_channel,
    kraus_to_chi,
    random_channel,
    swap_channel,
    tensor_channels,
    unitary_channel,
)
from .measure import (
    CorrelationReport,
    FundamentalLawResult,
    PartyStructure,
    check_fundamental_law,
    measure_ibar,
)
from .bounds import (
    CorrelatorResult,
    best_pauli_pair_bound,
    connected_correlator,
    lower_bound_from_counts,
    lower_bound_from_state,
)
from .noise import (
    AlphaCoefficients,
    DecayModel,
    PhaseNoiseModel,
    amplitude_damping_kraus,
    analytic_dephasing_channel,
    chi_matrix_closed_form,
    chi_matrix_quadrature,
    decay_channel,
    dephasing_decay_mask,
    long_time_state,
    sample_decay_trajectories,
    sample_dephasing_trajectories,
    sampled_dephasing_channel,
    sigma_b_for_time,
)
from .records import (
    MeasurementRecord,
    MeasurementSetting,
    load_record,
    marginalize_record,
    save_record,
)
from .tomography import (
    mle_process_tomography,
    mle_state_tomography,
    process_fidelity,
    process_tomography_settings,
    simulate_record,
    state_tomography_settings,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

from .fockspace import (
    CompositeBasis,
    DensityMatrix,
    DimensionError,
    OperatorMatrix,
    StateVector,
    apply_unitary,
    basis_index,
    basis_state,
    leakage_probability,
    partial_trace_motion,
    state_fidelity,
)
from .pulsegen import (
    NoiseConfig,
    NonHermitianError,
    PhysicalParams,
    PulseKind,
    PulseSpec,
    propagator,
    pulse_duration,
    pulse_hamiltonian,
    pulse_unitary,
    pulse_unitary_analytic,
)
from .sequences import (
    GateUnitary,
    PulseSequence,
    SequenceParseError,
    builtin_toffoli,
    load_sequence,
    parse_sequence,
    reference_toffoli_unitary,
    restrict_to_qubits,
    sequence_duration,
    sequence_unitary,
    serialize_sequence,
    toffoli_sequence,
)

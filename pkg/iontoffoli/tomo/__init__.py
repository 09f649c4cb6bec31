from .chi import (
    ProcessMatrix,
    chi_from_process,
    chi_from_unitary,
    pauli_basis,
    process_fidelity,
)
from .fidelity import FidelityReport, haar_state, mean_gate_fidelity_mc
from .process import QubitProcess, simulate_process
from .truth_table import TruthTable, simulate_truth_table

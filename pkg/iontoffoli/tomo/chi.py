"""
Process (chi) matrices in the Pauli operator basis.

The operators A_m = P_m / sqrt(d) are orthonormal under the trace inner
product. The chi matrix is normalized so that trace-preserving maps have
unit trace:

    E(rho) = sum_mn chi_mn P_m rho P_n^+
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
import pandas as pd
from bidict import bidict

from ..sim.sequences import GateUnitary
from .process import QubitProcess, product_input_states

logger = logging.getLogger(__name__)

PAULI_SYMBOLS = "IXYZ"
PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
UNITARY_INPUT_TOL = 1e-8


@lru_cache(maxsize=None)
def pauli_labels(num_qubits: int) -> bidict:
    """'IIX' <-> 1, lexicographic in (I, X, Y, Z) with the first qubit leading."""
    return bidict(
        ("".join(p), m)
        for m, p in enumerate(itertools.product(PAULI_SYMBOLS, repeat=num_qubits))
    )


@lru_cache(maxsize=None)
def pauli_basis(num_qubits: int) -> np.ndarray:
    """Stack of the 4^N orthonormal operators A_m = P_m / sqrt(2^N)."""
    if num_qubits < 1:
        raise ValueError(f"Need at least one qubit (got {num_qubits})")
    ops = []
    for label in pauli_labels(num_qubits):
        op = np.ones((1, 1), dtype=complex)
        for symbol in label:
            op = np.kron(op, PAULIS[symbol])
        ops.append(op)
    basis = np.array(ops) / np.sqrt(2 ** num_qubits)
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class ProcessMatrix:
    chi: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        chi = np.array(self.chi, dtype=complex)
        size = chi.shape[0]
        num_qubits = int(round(np.log(size) / np.log(4))) if size > 0 else 0
        if chi.shape != (size, size) or 4 ** num_qubits != size or num_qubits < 1:
            raise ValueError(f"chi must be a 4^N x 4^N matrix, got {chi.shape}")
        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    @property
    def num_qubits(self) -> int:
        return int(round(np.log(self.chi.shape[0]) / np.log(4)))

    @property
    def labels(self) -> list[str]:
        return list(pauli_labels(self.num_qubits).keys())

    @property
    def trace(self) -> float:
        return float(np.trace(self.chi).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.chi - self.chi.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.chi + self.chi.conj().T) / 2).min())

    def is_completely_positive(self, tol: float = 1e-9) -> bool:
        return self.min_eigenvalue() >= -tol

    def element(self, row: str, col: str) -> complex:
        labels = pauli_labels(self.num_qubits)
        return complex(self.chi[labels[row], labels[col]])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """sum_mn chi_mn P_m rho P_n^+."""
        d = 2 ** self.num_qubits
        P = pauli_basis(self.num_qubits) * np.sqrt(d)
        return np.einsum("mn,mij,jk,nlk->il", self.chi, P, rho, P.conj())

    def to_frame(self, absolute: bool = True) -> pd.DataFrame:
        values = np.abs(self.chi) if absolute else self.chi
        return pd.DataFrame(values, index=self.labels, columns=self.labels)


def _as_matrix(U: Union[GateUnitary, np.ndarray]) -> np.ndarray:
    return U.matrix if isinstance(U, GateUnitary) else np.asarray(U, dtype=complex)


def chi_from_unitary(U: Union[GateUnitary, np.ndarray]) -> ProcessMatrix:
    """Rank-one chi = u u^+ with u_m = Tr(A_m^+ U) / sqrt(d)."""
    matrix = _as_matrix(U)
    d = matrix.shape[0]
    error = np.max(np.abs(matrix.conj().T @ matrix - np.eye(d)))
    if error > UNITARY_INPUT_TOL:
        raise ValueError(f"Input is not unitary (max |U^+U - 1| = {error:.2e})")
    A = pauli_basis(d.bit_length() - 1)
    u = np.einsum("mij,ij->m", A.conj(), matrix) / np.sqrt(d)
    return ProcessMatrix(np.outer(u, u.conj()))


def chi_from_units(units: np.ndarray) -> ProcessMatrix:
    """Linear inversion from the images E(|j><l|) of the matrix units."""
    d = units.shape[0]
    A = pauli_basis(d.bit_length() - 1)
    # R[(i, j), (k, l)] = E(|j><l|)[i, k] = (V chi V^+) / d, V columns vec(A_m)
    R = units.transpose(2, 0, 3, 1).reshape(d * d, d * d)
    V = A.reshape(A.shape[0], d * d).T
    chi = V.conj().T @ R @ V / d
    return ProcessMatrix((chi + chi.conj().T) / 2)


def chi_from_process(process: QubitProcess) -> ProcessMatrix:
    """Tomography by exact linear inversion.

    The process is evaluated on the 4^N product inputs (|0>, |1>, |+>, |+i>
    per qubit); the matrix-unit images are recombined from those outputs.
    """
    states, coeffs = product_input_states(process.num_qubits)
    outputs = np.array([process.apply(rho) for rho in states])
    units = np.einsum("jls,sik->jlik", coeffs, outputs)
    chi = chi_from_units(units)
    logger.debug(
        f"Reconstructed chi of {process.name}: trace {chi.trace:.6f}, "
        f"min eigenvalue {chi.min_eigenvalue():.2e}"
    )
    return chi


def process_fidelity(chi_exp: ProcessMatrix, chi_ideal: ProcessMatrix) -> float:
    """Tr(chi_ideal chi_exp)."""
    if chi_exp.chi.shape != chi_ideal.chi.shape:
        raise ValueError(
            f"Basis mismatch: {chi_exp.chi.shape} vs {chi_ideal.chi.shape}"
        )
    return float(np.einsum("mn,nm->", chi_ideal.chi, chi_exp.chi).real)

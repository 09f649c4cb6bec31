"""
Composite Hilbert space of the ion register: num_qubits two-level ions times
one harmonic-oscillator mode truncated at n_max.

Qubit convention: |S> is the bit 1 and |D> the bit 0. The first control ion is
the most significant bit, so the words sorted ascending read |DDD> ... |SSS>.
The Fock level varies fastest in the flat index:

    index = word * (n_max + 1) + n
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from bidict import bidict

from .types import FlatIndex, FockLevel, QubitWord

NORM_TOL = 1e-9
UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12

SYMBOLS = bidict({"D": 0, "S": 1})


class DimensionError(ValueError):
    pass


@lru_cache(maxsize=None)
def word_labels(num_qubits: int) -> bidict:
    """Two-way map between labels such as 'SSD' and qubit words."""
    labels = bidict()
    for word in range(2 ** num_qubits):
        bits = format(word, f"0{num_qubits}b")
        labels["".join(SYMBOLS.inverse[int(b)] for b in bits)] = word
    return labels


@dataclass(frozen=True)
class CompositeBasis:
    num_qubits: int = 3
    n_max: int = 4

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError(f"Need at least one qubit (got {self.num_qubits})")
        if self.n_max < 2:
            raise ValueError(f"n_max must be at least 2 (got {self.n_max})")

    @property
    def num_levels(self) -> int:
        return self.n_max + 1

    @property
    def qubit_dimension(self) -> int:
        return 2 ** self.num_qubits

    @property
    def dimension(self) -> int:
        return self.qubit_dimension * self.num_levels

    @property
    def labels(self) -> bidict:
        return word_labels(self.num_qubits)

    def parse_word(self, word: QubitWord) -> int:
        if isinstance(word, str):
            key = word.strip().strip("|>").upper()
            if key not in self.labels:
                raise IndexError(
                    f"Invalid qubit word '{word}' for {self.num_qubits} qubits"
                )
            return int(self.labels[key])
        if not 0 <= word < self.qubit_dimension:
            raise IndexError(
                f"Qubit word {word} out of range for {self.num_qubits} qubits"
            )
        return int(word)

    def word_label(self, word: QubitWord) -> str:
        return str(self.labels.inverse[self.parse_word(word)])

    def bit(self, word: int, ion: int) -> int:
        """State of ion `ion` (1-based, ion 1 most significant) in `word`."""
        return (word >> (self.num_qubits - ion)) & 1

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(num_qubits={self.num_qubits}, "
            f"n_max={self.n_max}, dimension={self.dimension})"
        )


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    basis: CompositeBasis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.shape != (self.basis.dimension,):
            raise DimensionError(
                f"Expected {self.basis.dimension} amplitudes, got {amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        """Populations as a (qubit word, Fock level) table."""
        probs = np.abs(self.amplitudes) ** 2
        return probs.reshape(self.basis.qubit_dimension, self.basis.num_levels)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(
            np.outer(self.amplitudes, self.amplitudes.conj()), basis=self.basis
        )


@dataclass(frozen=True)
class OperatorMatrix:
    basis: CompositeBasis
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        dim = self.basis.dimension
        if entries.shape != (dim, dim):
            raise DimensionError(
                f"Expected a {dim}x{dim} operator, got {entries.shape}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, basis: CompositeBasis) -> "OperatorMatrix":
        return cls(basis, np.eye(basis.dimension))

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.basis != other.basis:
            raise DimensionError(f"Basis mismatch: {self.basis} vs {other.basis}")
        return OperatorMatrix(self.basis, self.entries @ other.entries)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def unitarity_error(self) -> float:
        eye = np.eye(self.basis.dimension)
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - eye)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over the composite space, or over the qubit space when
    `basis` is None."""

    entries: np.ndarray = field(repr=False)
    basis: Optional[CompositeBasis] = None

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"Density matrix must be square, got {entries.shape}")
        if self.basis is not None and entries.shape[0] != self.basis.dimension:
            raise DimensionError(
                f"Expected dimension {self.basis.dimension}, got {entries.shape[0]}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return int(self.entries.shape[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def is_valid(self, tol: float = 1e-9) -> bool:
        hermitian = np.max(np.abs(self.entries - self.entries.conj().T)) <= 1e-10
        return bool(
            hermitian and abs(self.trace - 1) <= tol and self.min_eigenvalue() >= -tol
        )


def basis_index(basis: CompositeBasis, word: QubitWord, n: FockLevel) -> FlatIndex:
    parsed = basis.parse_word(word)
    if not 0 <= n <= basis.n_max:
        raise IndexError(f"Fock level {n} out of range [0, {basis.n_max}]")
    return FlatIndex(parsed * basis.num_levels + n)


def basis_unindex(basis: CompositeBasis, index: int) -> tuple[int, FockLevel]:
    if not 0 <= index < basis.dimension:
        raise IndexError(f"Index {index} out of range [0, {basis.dimension})")
    word, n = divmod(index, basis.num_levels)
    return word, n


def basis_state(basis: CompositeBasis, word: QubitWord, n: FockLevel) -> StateVector:
    amplitudes = np.zeros(basis.dimension, dtype=complex)
    amplitudes[basis_index(basis, word, n)] = 1
    return StateVector(basis, amplitudes)


def apply_unitary(U: OperatorMatrix, psi: StateVector) -> StateVector:
    if U.basis != psi.basis:
        raise DimensionError(f"Basis mismatch: {U.basis} vs {psi.basis}")
    return StateVector(psi.basis, U.entries @ psi.amplitudes)


def partial_trace_motion(
    rho: Union[DensityMatrix, np.ndarray], basis: Optional[CompositeBasis] = None
) -> DensityMatrix:
    """Trace out the motional mode: (rho_q)_ab = sum_n rho_(a,n),(b,n)."""
    if isinstance(rho, DensityMatrix):
        basis = rho.basis if basis is None else basis
        entries = rho.entries
    else:
        entries = np.asarray(rho)
    if basis is None:
        raise DimensionError("A composite basis is needed to trace out the motion")
    dim = basis.dimension
    if entries.shape != (dim, dim):
        raise DimensionError(f"Expected a {dim}x{dim} matrix, got {entries.shape}")
    q, m = basis.qubit_dimension, basis.num_levels
    return DensityMatrix(np.einsum("anbn->ab", entries.reshape(q, m, q, m)))


StateLike = Union[StateVector, DensityMatrix, np.ndarray]


def _as_array(state: StateLike) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amplitudes
    if isinstance(state, DensityMatrix):
        return state.entries
    return np.asarray(state, dtype=complex)


def state_fidelity(psi: StateLike, phi: StateLike) -> float:
    """|<psi|phi>|^2 for two pure states, <psi|rho|psi> for pure vs mixed."""
    a, b = _as_array(psi), _as_array(phi)
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    if a.ndim == 1 and b.ndim == 1:
        value = abs(np.vdot(a, b)) ** 2
    elif a.ndim == 1:
        value = np.vdot(a, b @ a).real
    elif b.ndim == 1:
        value = np.vdot(b, a @ b).real
    else:
        raise DimensionError("At least one of the two states must be pure")
    return float(min(max(value, 0.0), 1.0))


def leakage_probability(psi: StateVector) -> float:
    """Population on the truncation rung n = n_max."""
    return float(psi.populations()[:, -1].sum())


def number_operator(basis: CompositeBasis) -> OperatorMatrix:
    """Phonon number N acting on the composite space."""
    levels = np.tile(np.arange(basis.num_levels), basis.qubit_dimension)
    return OperatorMatrix(basis, np.diag(levels.astype(complex)))


def excitation_operator(basis: CompositeBasis) -> OperatorMatrix:
    """(number of ions in |D>) - n, conserved by blue-sideband pulses."""
    words = np.arange(basis.qubit_dimension)
    n_dark = np.array(
        [
            sum(1 - basis.bit(int(w), ion) for ion in range(1, basis.num_qubits + 1))
            for w in words
        ]
    )
    levels = np.arange(basis.num_levels)
    values = (n_dark[:, None] - levels[None, :]).ravel()
    return OperatorMatrix(basis, np.diag(values.astype(complex)))

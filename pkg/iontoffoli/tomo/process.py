"""
Qubit-level process of a pulse sequence.

The map is stored through its images on the matrix units,
units[j, l] = E(|j><l|), so it can be applied to any input exactly.
"""
import itertools
import logging
from typing import Optional, Union

import numpy as np

from ..sim.fockspace import CompositeBasis, DensityMatrix, DimensionError
from ..sim.pulsegen import NoiseConfig, PhysicalParams
from ..sim.sequences import GateUnitary, PulseSequence, sequence_unitary

logger = logging.getLogger(__name__)


class QubitProcess:
    def __init__(self, units: np.ndarray, name: str = "process") -> None:
        units = np.array(units, dtype=complex)
        d = units.shape[0]
        if units.shape != (d, d, d, d) or d & (d - 1):
            raise DimensionError(
                f"Matrix-unit images must be (d, d, d, d), got {units.shape}"
            )
        units.setflags(write=False)
        self._units = units
        self.name = name

    @classmethod
    def from_unitary(
        cls, gate: Union[GateUnitary, np.ndarray], name: str = "unitary"
    ) -> "QubitProcess":
        """Conjugation map rho -> U rho U^+."""
        U = gate.matrix if isinstance(gate, GateUnitary) else np.asarray(gate)
        return cls(np.einsum("ij,kl->jlik", U, U.conj()), name)

    @classmethod
    def identity(cls, num_qubits: int) -> "QubitProcess":
        return cls.from_unitary(np.eye(2 ** num_qubits), "identity")

    @property
    def dimension(self) -> int:
        return int(self._units.shape[0])

    @property
    def num_qubits(self) -> int:
        return self.dimension.bit_length() - 1

    @property
    def units(self) -> np.ndarray:
        return self._units

    @property
    def superoperator(self) -> np.ndarray:
        """S with vec(E(rho)) = S vec(rho), row-major vectorization."""
        d = self.dimension
        return self._units.transpose(2, 3, 0, 1).reshape(d * d, d * d)

    def apply(self, rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
        entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
        if entries.shape != (self.dimension, self.dimension):
            raise DimensionError(
                f"Expected a {self.dimension}x{self.dimension} input, "
                f"got {entries.shape}"
            )
        return np.einsum("jl,jlik->ik", entries, self._units)

    def output_trace_of_identity(self) -> float:
        """Tr E(1), equal to the dimension for trace-preserving maps."""
        return float(np.einsum("jjii->", self._units).real)

    @property
    def leakage(self) -> float:
        """Average population lost by the map."""
        return max(0.0, 1 - self.output_trace_of_identity() / self.dimension)

    def distance(self, other: "QubitProcess") -> float:
        """Frobenius distance between superoperators."""
        return float(np.linalg.norm(self.superoperator - other.superoperator))

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(name={self.name}, "
            f"num_qubits={self.num_qubits}, leakage={self.leakage:.2e})"
        )


def _flip_weights(num_qubits: int, p: float) -> list[tuple[int, float]]:
    """(flip mask, probability) of independent per-ion bit flips."""
    weights = []
    for mask in range(2 ** num_qubits):
        flips = bin(mask).count("1")
        weight = p ** flips * (1 - p) ** (num_qubits - flips)
        if weight > 0:
            weights.append((mask, weight))
    return weights


def motional_weights(noise: NoiseConfig) -> dict[int, float]:
    q = noise.motional_prep_error
    return {n: w for n, w in ((0, 1 - q), (1, q)) if w > 0}


def simulate_process(
    seq: PulseSequence,
    params: Optional[PhysicalParams] = None,
    noise: Optional[NoiseConfig] = None,
    basis: Optional[CompositeBasis] = None,
) -> QubitProcess:
    """Prepare each qubit input with the mode in its initial (mixed) state,
    run the sequence and trace the motion over the retained rungs.

    Population reaching the truncation rung n_max is dropped and counts as
    leakage. Preparation errors are classical mixtures weighted exactly.
    """
    params = PhysicalParams() if params is None else params
    noise = NoiseConfig() if noise is None else noise
    basis = CompositeBasis() if basis is None else basis
    U = sequence_unitary(seq, params, noise, basis).entries
    d, L = basis.qubit_dimension, basis.num_levels

    units = np.zeros((d, d, d, d), dtype=complex)
    for n0, weight in motional_weights(noise).items():
        # columns |j, n0> reshaped to (out word, out level, in word)
        V = U[:, n0::L].reshape(d, L, d)[:, : basis.n_max, :]
        units += weight * np.einsum("imj,kml->jlik", V, V.conj())

    if noise.qubit_prep_error > 0:
        words = np.arange(d)
        flipped = np.zeros_like(units)
        for mask, weight in _flip_weights(basis.num_qubits, noise.qubit_prep_error):
            perm = words ^ mask
            flipped += weight * units[np.ix_(perm, perm)]
        units = flipped

    process = QubitProcess(units, name=seq.name)
    logger.debug(f"Simulated {process!r} with {noise}")
    return process


def product_input_states(num_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """The 4^N product inputs built from |0>, |1>, |+>, |+i> per qubit, and the
    coefficients c[j, l, s] with |j><l| = sum_s c[j, l, s] rho_s."""
    plus = np.array([1, 1]) / np.sqrt(2)
    plus_i = np.array([1, 1j]) / np.sqrt(2)
    singles = np.array(
        [
            np.diag([1, 0]),
            np.diag([0, 1]),
            np.outer(plus, plus.conj()),
            np.outer(plus_i, plus_i.conj()),
        ],
        dtype=complex,
    )
    coeffs = np.zeros((2, 2, 4), dtype=complex)
    coeffs[0, 0, 0] = coeffs[1, 1, 1] = 1
    coeffs[0, 1] = [-(1 + 1j) / 2, -(1 + 1j) / 2, 1, 1j]
    coeffs[1, 0] = [-(1 - 1j) / 2, -(1 - 1j) / 2, 1, -1j]

    states, table = singles, coeffs
    for _ in range(num_qubits - 1):
        states = np.array(
            [np.kron(a, b) for a, b in itertools.product(states, singles)]
        )
        dim = table.shape[0] * 2
        table = np.einsum("jls,abt->jalbst", table, coeffs).reshape(
            dim, dim, states.shape[0]
        )
    return states, table

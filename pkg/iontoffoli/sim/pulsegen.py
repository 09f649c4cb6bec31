"""
Hamiltonians and propagators of carrier and blue-sideband laser pulses.

On every two-level manifold {|D,n+1>, |S,n>} (sideband) or {|D,n>, |S,n>}
(carrier) the raising element of the addressed ion reads

    <D,n+1|H|S,n> = DRIVE_SIGN * (Omega/2) * exp(i * PHASE_SIGN * phi) * sqrt(n+1)

so that a pulse of area theta acts, in the (D, S) ordering, as

    [[cos(T/2),                i exp(-i phi) sin(T/2)],
     [i exp(i phi) sin(T/2),   cos(T/2)              ]]

with T = theta * sqrt(n+1) for the sideband and T = theta for the carrier.
"""
import enum
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from .fockspace import CompositeBasis, OperatorMatrix
from .types import Radians, Seconds

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
DRIVE_SIGN = -1
PHASE_SIGN = -1
NON_HERMITIAN_TOL = 1e-10

# Single-ion raising operator |D><S| with |D> = 0, |S> = 1
SIGMA_RAISE = np.array([[0, 1], [0, 0]], dtype=complex)


class NonHermitianError(ValueError):
    pass


class PulseKind(enum.Enum):
    CARRIER = "carrier"
    BLUE_SIDEBAND = "sb"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PulseSpec:
    kind: PulseKind
    ion: int
    theta: Radians
    phi: Radians = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.kind, PulseKind):
            object.__setattr__(self, "kind", PulseKind(self.kind))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(self.phi))
        if self.theta < 0:
            raise ValueError(f"Pulse area must be non-negative (got {self.theta})")
        if self.ion < 1:
            raise IndexError(f"Ion indices start at 1 (got {self.ion})")

    @property
    def is_sideband(self) -> bool:
        return self.kind is PulseKind.BLUE_SIDEBAND

    def __str__(self) -> str:
        sup = "+" if self.is_sideband else ""
        return (
            f"R{self.ion}{sup}({self.theta / np.pi:.4g}pi, {self.phi / np.pi:.4g}pi)"
        )


@dataclass(frozen=True)
class PhysicalParams:
    omega_sb: float = TWO_PI * 3300
    omega_carrier: float = TWO_PI * 50_000

    def __post_init__(self) -> None:
        if self.omega_sb <= 0 or self.omega_carrier <= 0:
            raise ValueError(
                "Rabi frequencies must be strictly positive "
                f"(got omega_sb={self.omega_sb}, omega_carrier={self.omega_carrier})"
            )

    @classmethod
    def from_hz(cls, omega_sb_hz: float, omega_carrier_hz: float) -> "PhysicalParams":
        return cls(TWO_PI * omega_sb_hz, TWO_PI * omega_carrier_hz)

    def rabi_frequency(self, kind: PulseKind) -> float:
        if kind is PulseKind.BLUE_SIDEBAND:
            return self.omega_sb
        return self.omega_carrier


@dataclass(frozen=True)
class NoiseConfig:
    addressing_ratio: float = 0.0
    detuning: float = 0.0
    qubit_prep_error: float = 0.0
    motional_prep_error: float = 0.0
    next_neighbor_ratio: float = 0.0

    def __post_init__(self) -> None:
        for name in (
            "addressing_ratio",
            "qubit_prep_error",
            "motional_prep_error",
            "next_neighbor_ratio",
        ):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1] (got {value})")

    @property
    def is_coherent_ideal(self) -> bool:
        return (
            self.addressing_ratio == 0
            and self.next_neighbor_ratio == 0
            and self.detuning == 0
        )

    @property
    def is_ideal(self) -> bool:
        return (
            self.is_coherent_ideal
            and self.qubit_prep_error == 0
            and self.motional_prep_error == 0
        )

    def coupling_ratio(self, distance: int) -> float:
        if distance == 0:
            return 1.0
        if distance == 1:
            return self.addressing_ratio
        if distance == 2:
            return self.next_neighbor_ratio
        return 0.0


def check_ion(ion: int, basis: CompositeBasis) -> None:
    if not 1 <= ion <= basis.num_qubits:
        raise IndexError(f"Ion {ion} out of range [1, {basis.num_qubits}]")


def creation_operator(n_max: int) -> np.ndarray:
    """Truncated a^dagger: the coupling out of n_max is dropped."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=-1).astype(complex)


def _single_ion(op: np.ndarray, ion: int, num_qubits: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for j in range(1, num_qubits + 1):
        out = np.kron(out, op if j == ion else np.eye(2))
    return out


def raising_term(kind: PulseKind, ion: int, basis: CompositeBasis) -> np.ndarray:
    """sigma+_ion (x) a^dagger for the sideband, sigma+_ion (x) 1 for the carrier."""
    qubit_op = _single_ion(SIGMA_RAISE, ion, basis.num_qubits)
    if kind is PulseKind.BLUE_SIDEBAND:
        mode_op = creation_operator(basis.n_max)
    else:
        mode_op = np.eye(basis.num_levels, dtype=complex)
    return np.kron(qubit_op, mode_op)


def pulse_hamiltonian(
    spec: PulseSpec,
    params: PhysicalParams,
    noise: NoiseConfig,
    basis: CompositeBasis,
) -> OperatorMatrix:
    check_ion(spec.ion, basis)
    omega = params.rabi_frequency(spec.kind)
    phase = np.exp(1j * PHASE_SIGN * spec.phi)
    H = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    for ion in range(1, basis.num_qubits + 1):
        ratio = noise.coupling_ratio(abs(ion - spec.ion))
        if ratio == 0:
            continue
        g = DRIVE_SIGN * ratio * omega / 2 * phase
        term = g * raising_term(spec.kind, ion, basis)
        H += term + term.conj().T
    if noise.detuning:
        levels = np.tile(np.arange(basis.num_levels), basis.qubit_dimension)
        H += noise.detuning * np.diag(levels)
    return OperatorMatrix(basis, H)


def propagator(H: OperatorMatrix, t: Seconds) -> OperatorMatrix:
    """exp(-iHt) through the Hermitian eigendecomposition of H."""
    error = H.hermiticity_error()
    if error > NON_HERMITIAN_TOL:
        raise NonHermitianError(
            f"Hamiltonian is not Hermitian (max |H - H^+| = {error:.2e})"
        )
    if t == 0:
        return OperatorMatrix.identity(H.basis)
    hermitian = (H.entries + H.entries.conj().T) / 2
    energies, vectors = linalg.eigh(hermitian)
    U = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
    return OperatorMatrix(H.basis, U)


def pulse_duration(spec: PulseSpec, params: PhysicalParams) -> Seconds:
    return float(spec.theta / params.rabi_frequency(spec.kind))


@lru_cache(maxsize=4096)
def pulse_unitary(
    spec: PulseSpec,
    params: PhysicalParams,
    noise: NoiseConfig,
    basis: CompositeBasis,
) -> OperatorMatrix:
    if noise.is_coherent_ideal:
        check_ion(spec.ion, basis)
        return pulse_unitary_analytic(spec, basis)
    H = pulse_hamiltonian(spec, params, noise, basis)
    U = propagator(H, pulse_duration(spec, params))
    logger.debug(f"Built {spec} (unitarity error {U.unitarity_error():.2e})")
    return U


def pulse_unitary_analytic(spec: PulseSpec, basis: CompositeBasis) -> OperatorMatrix:
    """Block-diagonal rotation, one 2x2 block per coupled manifold."""
    check_ion(spec.ion, basis)
    U = np.eye(basis.dimension, dtype=complex)
    shift = 1 if spec.is_sideband else 0
    mask = 1 << (basis.num_qubits - spec.ion)
    coupling = DRIVE_SIGN * np.exp(1j * PHASE_SIGN * spec.phi)
    for word in range(basis.qubit_dimension):
        if not word & mask:
            continue
        dark = word & ~mask
        for n in range(basis.num_levels - shift):
            angle = spec.theta * (np.sqrt(n + 1) if spec.is_sideband else 1.0)
            c, s = np.cos(angle / 2), np.sin(angle / 2)
            lower = word * basis.num_levels + n
            upper = dark * basis.num_levels + n + shift
            U[upper, upper] = U[lower, lower] = c
            U[upper, lower] = -1j * coupling * s
            U[lower, upper] = -1j * coupling.conjugate() * s
    return OperatorMatrix(basis, U)


def commutator_norm(A: OperatorMatrix, B: OperatorMatrix) -> float:
    return float(np.max(np.abs(A.entries @ B.entries - B.entries @ A.entries)))

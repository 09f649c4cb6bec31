import os

import numpy as np
from scipy.stats import unitary_group

from iontoffoli.sim.fockspace import CompositeBasis, StateVector, basis_state
from iontoffoli.sim.pulsegen import NoiseConfig, PhysicalParams, PulseKind, PulseSpec

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TOFFOLI_FILE = os.path.join(ROOT, "data", "toffoli.seq")

TWO_PI = 2 * np.pi
LAB_NOISE = NoiseConfig(addressing_ratio=0.07, detuning=TWO_PI * 100)


def random_unitary(dim: int, seed: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=seed)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + G.conj().T) / 2


def random_spec(rng: np.random.Generator, num_ions: int = 3) -> PulseSpec:
    kind = PulseKind.CARRIER if rng.random() < 0.5 else PulseKind.BLUE_SIDEBAND
    return PulseSpec(
        kind,
        int(rng.integers(1, num_ions + 1)),
        float(rng.uniform(0, 4 * np.pi)),
        float(rng.uniform(0, 2 * np.pi)),
    )


def population(psi: StateVector, word, n=None) -> float:
    """Population of a qubit word, on one Fock level or summed over all."""
    table = psi.populations()
    index = psi.basis.parse_word(word)
    return float(table[index].sum() if n is None else table[index, n])


def target_population(psi: StateVector, bit: int) -> float:
    """Total population with the last ion in state `bit` (0 = D, 1 = S)."""
    table = psi.populations()
    words = [w for w in range(table.shape[0]) if w & 1 == bit]
    return float(table[words].sum())


def ground(word, basis: CompositeBasis = CompositeBasis()) -> StateVector:
    return basis_state(basis, word, 0)


def ideal() -> tuple[PhysicalParams, NoiseConfig, CompositeBasis]:
    return PhysicalParams(), NoiseConfig(), CompositeBasis()

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..sim.fockspace import word_labels
from ..sim.sequences import GateUnitary
from .process import QubitProcess

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruthTable:
    """Output probabilities, rows = input words, columns = output words."""

    probabilities: np.ndarray = field(repr=False)
    shots: int = 0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        probabilities = np.array(self.probabilities, dtype=float)
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def num_qubits(self) -> int:
        return int(self.probabilities.shape[0]).bit_length() - 1

    @property
    def labels(self) -> list[str]:
        return list(word_labels(self.num_qubits).keys())

    def correct_populations(self, gate: Union[GateUnitary, np.ndarray]) -> np.ndarray:
        """Probability of the ideal output word, input by input."""
        expected = correct_outputs(gate)
        return self.probabilities[np.arange(len(expected)), expected]

    def mean_correct(self, gate: Union[GateUnitary, np.ndarray]) -> float:
        return float(self.correct_populations(gate).mean())

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.probabilities, index=self.labels, columns=self.labels)
        frame.index.name = "input"
        return frame


def correct_outputs(gate: Union[GateUnitary, np.ndarray]) -> np.ndarray:
    """Most likely output word of the ideal gate for each input word."""
    U = gate.matrix if isinstance(gate, GateUnitary) else np.asarray(gate)
    return np.argmax(np.abs(U) ** 2, axis=0)


def simulate_truth_table(
    process: QubitProcess, shots: int = 0, seed: Optional[int] = None
) -> TruthTable:
    """Row i holds the diagonal of E(|i><i|). Leaked population is not
    redistributed, so rows of a leaky process sum to less than one. With
    shots > 0 each row is renormalized and replaced by the frequencies of one
    multinomial draw seeded by (seed, i)."""
    if shots < 0:
        raise ValueError(f"Shot count must be non-negative (got {shots})")
    d = process.dimension
    rows = np.zeros((d, d))
    for i in range(d):
        rho = np.zeros((d, d), dtype=complex)
        rho[i, i] = 1
        rows[i] = np.clip(np.diag(process.apply(rho)).real, 0, None)
    if shots > 0:
        seed = 0 if seed is None else seed
        for i in range(d):
            total = rows[i].sum()
            if total <= 0:
                raise ValueError(f"Input {i} leaks out of the qubit space entirely")
            rng = np.random.default_rng([seed, i])
            rows[i] = rng.multinomial(shots, rows[i] / total) / shots
    logger.debug(f"Truth table of {process.name} ({shots or 'exact'} shots)")
    return TruthTable(rows, shots, seed)

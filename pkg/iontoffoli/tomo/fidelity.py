"""
Mean gate fidelity over Haar-random pure input states.

Sample i always draws from np.random.default_rng([seed, i]), and samples are
processed in chunks of fixed size whose results are concatenated in index
order, so a report only depends on (seed, samples).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np
from tqdm import tqdm

from ..sim.sequences import GateUnitary
from .chi import chi_from_process, chi_from_unitary, process_fidelity
from .process import QubitProcess

logger = logging.getLogger(__name__)

CHUNK_SIZE = 256


@dataclass(frozen=True)
class FidelityReport:
    estimate: float
    std_error: float
    samples: int
    seed: int
    analytic_crosscheck: float

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ValueError(f"Negative standard error ({self.std_error})")

    def within(self, sigmas: float = 3.0) -> bool:
        """Whether the estimate agrees with the analytic value."""
        return abs(self.estimate - self.analytic_crosscheck) <= sigmas * max(
            self.std_error, 1e-12
        )

    def to_dict(self) -> dict[str, Union[int, float]]:
        return asdict(self)


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized vector of i.i.d. standard complex Gaussians."""
    if dim < 1:
        raise ValueError(f"Dimension must be positive (got {dim})")
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def sample_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _chunk_fidelities(
    superop: np.ndarray, U: np.ndarray, seed: int, start: int, stop: int
) -> np.ndarray:
    d = U.shape[0]
    psi = np.array([haar_state(d, sample_stream(seed, i)) for i in range(start, stop)])
    rho = np.einsum("ci,ck->cik", psi, psi.conj()).reshape(len(psi), d * d)
    out = (rho @ superop.T).reshape(len(psi), d, d)
    target = psi @ U.T
    return np.einsum("ci,cik,ck->c", target.conj(), out, target).real


def average_fidelity(process: QubitProcess, U: np.ndarray) -> float:
    """Closed-form Haar average (d F_pro + Tr E(1) / d) / (d + 1)."""
    d = process.dimension
    f_pro = process_fidelity(chi_from_process(process), chi_from_unitary(U))
    return (d * f_pro + process.output_trace_of_identity() / d) / (d + 1)


def mean_gate_fidelity_mc(
    process: QubitProcess,
    U_ideal: Union[GateUnitary, np.ndarray],
    samples: int,
    seed: int,
    workers: int = 1,
    progress: bool = False,
    chunk_size: int = CHUNK_SIZE,
) -> FidelityReport:
    if samples < 1:
        raise ValueError(f"At least one sample is needed (got {samples})")
    U = U_ideal.matrix if isinstance(U_ideal, GateUnitary) else np.asarray(U_ideal)
    if U.shape != (process.dimension, process.dimension):
        raise ValueError(
            f"Ideal gate of shape {U.shape} does not match a "
            f"{process.dimension}-dimensional process"
        )
    superop = process.superoperator
    bounds = [
        (start, min(start + chunk_size, samples))
        for start in range(0, samples, chunk_size)
    ]

    def run(bound: tuple[int, int]) -> np.ndarray:
        return _chunk_fidelities(superop, U, seed, *bound)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        chunks = list(
            tqdm(
                executor.map(run, bounds),
                total=len(bounds),
                desc=f"F_mean {process.name}",
                disable=not progress,
            )
        )
    values = np.concatenate(chunks)
    std_error = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    report = FidelityReport(
        estimate=float(np.clip(values.mean(), 0.0, 1.0)),
        std_error=std_error,
        samples=samples,
        seed=seed,
        analytic_crosscheck=float(average_fidelity(process, U)),
    )
    logger.debug(f"Mean gate fidelity of {process.name}: {report}")
    return report


def cnot_cascade_fidelity(cnot_fidelity: float = 0.926, count: int = 6) -> float:
    return float(cnot_fidelity ** count)
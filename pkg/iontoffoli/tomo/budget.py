"""
Noise sweeps and the error budget of a sequence: each noise mechanism alone,
all of them combined, and the comparison with a cascade of CNOT gates.
"""
import dataclasses
import logging
from typing import Iterable, Optional

from tqdm import tqdm

from ..sim.fockspace import CompositeBasis
from ..sim.pulsegen import NoiseConfig, PhysicalParams
from ..sim.sequences import (
    PulseSequence,
    reference_toffoli_unitary,
    sequence_duration,
)
from .chi import chi_from_process, chi_from_unitary, process_fidelity
from .fidelity import cnot_cascade_fidelity, mean_gate_fidelity_mc
from .process import simulate_process
from .types import BudgetRow, CascadeEstimate, SweepAxis, SweepRow

logger = logging.getLogger(__name__)

SWEEP_FIELDS: dict[str, str] = {
    "epsilon": "addressing_ratio",
    "detuning": "detuning",
}
MECHANISMS: dict[str, tuple[str, ...]] = {
    "addressing": ("addressing_ratio", "next_neighbor_ratio"),
    "detuning": ("detuning",),
    "qubit_preparation": ("qubit_prep_error",),
    "motional_preparation": ("motional_prep_error",),
}
CNOT_FIDELITY = 0.926
CNOT_COUNT = 6
CNOT_DURATION = 700e-6


def evaluate(
    seq: PulseSequence,
    params: PhysicalParams,
    noise: NoiseConfig,
    basis: CompositeBasis,
    samples: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float, float, float]:
    """(F_mean, std_error, F_pro, leakage) of a sequence against the Toffoli gate."""
    process = simulate_process(seq, params, noise, basis)
    reference = reference_toffoli_unitary()
    f_pro = process_fidelity(chi_from_process(process), chi_from_unitary(reference))
    report = mean_gate_fidelity_mc(process, reference, samples, seed, workers)
    return report.estimate, report.std_error, f_pro, process.leakage


def noise_sweep(
    seq: PulseSequence,
    axis: SweepAxis,
    values: Iterable[float],
    params: PhysicalParams,
    noise: NoiseConfig,
    basis: CompositeBasis,
    samples: int,
    seed: int,
    workers: int = 1,
    progress: bool = False,
) -> list[SweepRow]:
    """Vary one noise parameter (epsilon, or detuning in rad/s), holding the
    others at `noise`."""
    if axis not in SWEEP_FIELDS:
        raise ValueError(
            f"Unknown sweep axis '{axis}' (expected one of {', '.join(SWEEP_FIELDS)})"
        )
    values = list(values)
    if not values:
        raise ValueError("Sweep needs at least one value")
    duration = sequence_duration(seq, params)
    rows: list[SweepRow] = []
    for value in tqdm(values, desc=f"sweep {axis}", disable=not progress):
        point = dataclasses.replace(noise, **{SWEEP_FIELDS[axis]: value})
        f_mean, std_error, f_pro, leakage = evaluate(
            seq, params, point, basis, samples, seed, workers
        )
        logger.info(f"{axis}={value:.6g}: F_mean={f_mean:.4f}, F_pro={f_pro:.4f}")
        rows.append(
            {
                "value": float(value),
                "F_mean": f_mean,
                "std_error": std_error,
                "F_pro": f_pro,
                "duration": duration,
                "leakage": leakage,
            }
        )
    return rows


def error_budget(
    seq: PulseSequence,
    params: PhysicalParams,
    noise: NoiseConfig,
    basis: CompositeBasis,
    samples: int,
    seed: int,
    workers: int = 1,
    progress: bool = False,
) -> list[BudgetRow]:
    """Infidelity of each mechanism of `noise` alone, then of all combined."""
    cases: list[tuple[str, Optional[float], NoiseConfig]] = []
    for mechanism, fields in MECHANISMS.items():
        kept = {name: getattr(noise, name) for name in fields}
        if any(kept.values()):
            parameter = float(getattr(noise, fields[0]))
            cases.append((mechanism, parameter, NoiseConfig(**kept)))
    cases.append(("combined", None, noise))

    rows: list[BudgetRow] = []
    for mechanism, parameter, config in tqdm(
        cases, desc="error budget", disable=not progress
    ):
        f_mean, std_error, f_pro, _ = evaluate(
            seq, params, config, basis, samples, seed, workers
        )
        logger.info(f"{mechanism}: infidelity {1 - f_mean:.4f} (+/- {std_error:.4f})")
        rows.append(
            {
                "mechanism": mechanism,
                "parameter": parameter,
                "F_mean": f_mean,
                "std_error": std_error,
                "infidelity": 1 - f_mean,
                "F_pro": f_pro,
            }
        )
    return rows


def cnot_cascade(
    seq: PulseSequence,
    params: Optional[PhysicalParams] = None,
    cnot_fidelity: float = CNOT_FIDELITY,
    cnot_count: int = CNOT_COUNT,
    cnot_duration: float = CNOT_DURATION,
) -> CascadeEstimate:
    """Toffoli built from `cnot_count` CNOT gates, compared with `seq`."""
    params = PhysicalParams() if params is None else params
    own = sequence_duration(seq, params)
    cascade = cnot_count * cnot_duration
    return {
        "cnot_fidelity": cnot_fidelity,
        "cnot_count": cnot_count,
        "fidelity": cnot_cascade_fidelity(cnot_fidelity, cnot_count),
        "cnot_duration": cnot_duration,
        "duration": cascade,
        "sequence_duration": own,
        "speedup": cascade / own if own > 0 else float("inf"),
    }

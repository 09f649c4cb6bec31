from typing import Literal, Optional, TypedDict

import numpy as np

RealArray = np.ndarray
SweepAxis = Literal["epsilon", "detuning"]


class SweepRow(TypedDict):
    value: float
    F_mean: float
    std_error: float
    F_pro: float
    duration: float
    leakage: float


class BudgetRow(TypedDict):
    mechanism: str
    parameter: Optional[float]
    F_mean: float
    std_error: float
    infidelity: float
    F_pro: float


class CascadeEstimate(TypedDict):
    cnot_fidelity: float
    cnot_count: int
    fidelity: float
    cnot_duration: float
    duration: float
    sequence_duration: float
    speedup: float

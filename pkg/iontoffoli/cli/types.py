from typing import Any, Literal, Optional, TypedDict

import pandas as pd

OutputFormat = Literal["json", "csv"]
Result = dict[str, Any]


class RunConfig(TypedDict):
    omega_sb_hz: float
    omega_carrier_hz: float
    epsilon: float
    next_neighbor_ratio: float
    detuning_hz: float
    qubit_prep_error: float
    motional_prep_error: float
    nmax: int
    shots: int
    samples: int
    seed: int
    format: OutputFormat
    sequence: str
    workers: int
    complex: bool
    out: Optional[str]
    verbose: bool


class CommandOutput(TypedDict):
    result: Result
    table: Optional[pd.DataFrame]
    status: int

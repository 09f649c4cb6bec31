import json
import logging
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

from .config import config_echo
from .types import CommandOutput, RunConfig

logger = logging.getLogger(__name__)


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; complex numbers become {"re": ..., "im": ...}."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return None if math.isnan(value) or math.isinf(value) else value
    return obj


def complex_frame(
    matrix: np.ndarray, labels: Sequence[str], prefix: str = ""
) -> pd.DataFrame:
    """Long table (row, col, re, im) of a complex matrix."""
    size = np.arange(len(labels))
    rows, cols = np.meshgrid(size, size, indexing="ij")
    return pd.DataFrame(
        {
            "row": np.asarray(labels)[rows.ravel()],
            "col": np.asarray(labels)[cols.ravel()],
            f"{prefix}re": matrix.real.ravel(),
            f"{prefix}im": matrix.imag.ravel(),
        }
    )


def render(config: RunConfig, output: CommandOutput) -> str:
    if config["format"] == "csv":
        table = output["table"]
        if table is None:
            table = pd.json_normalize(to_jsonable(output["result"]))
        return str(table.to_csv(index=table.index.name is not None))
    document = {"config": config_echo(config), "result": output["result"]}
    return json.dumps(to_jsonable(document), indent=2) + "\n"


def emit(config: RunConfig, output: CommandOutput, out: Optional[str] = None) -> None:
    text = render(config, output)
    out = config["out"] if out is None else out
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf8", newline="") as f:
        f.write(text)
    logger.info(f"Results written to {out}")

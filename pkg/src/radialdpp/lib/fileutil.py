"""
Report serialization.

JSON floats use Python's shortest round-trip representation and CSV floats carry
17 significant digits, so every double survives a write/read cycle unchanged.
"""

import json
import math
import os
from pathlib import Path
from typing import Any
from typing import Optional

import numpy as np
import pandas as pd


CSV_FLOAT_FORMAT = "%.17g"
LOG_SUFFIX = ".log"


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars and arrays, tuples and non-finite floats to JSON values."""

    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        # JSON has no inf or nan
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def dumps_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_text(text: str, filepath: str):
    """Write text to a file, creating parent directories."""

    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)


def sidecar_path(filepath: str, suffix: str) -> str:
    """`out.json` with suffix `.replicates.csv` gives `out.replicates.csv`."""

    root, _ = os.path.splitext(filepath)
    return root + suffix


def log_path(output: Optional[str]) -> Optional[str]:
    return output + LOG_SUFFIX if output else None

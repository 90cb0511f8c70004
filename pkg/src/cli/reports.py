"""Machine outputs: versioned JSON reports and CSV tables."""
import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"


def to_builtin(value):
    """numpy/pandas values -> plain JSON types; NaN becomes null."""
    if isinstance(value, pd.DataFrame):
        return [to_builtin(r) for r in value.to_dict("records")]
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def report_document(command: str, payload: dict, checks: pd.DataFrame | None, provenance: dict) -> dict:
    document = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "result": payload,
        "provenance": provenance,
    }
    if checks is not None:
        document["checks"] = checks
        document["passed"] = bool(checks["passed"].all()) if len(checks) else True
    return to_builtin(document)


def write_json(path: Path | str, document: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_builtin(document), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}.")
    return path


def write_table(table: pd.DataFrame, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(table)} rows to {path}.")
    return path


def table_path(out: Path | str, name: str) -> Path:
    """Sibling CSV for a named table: run.json -> run.<name>.csv."""
    out = Path(out)
    return out.with_name(f"{out.stem}.{name}.csv")

"""JSON and CSV rendering of verification reports and tables."""

from __future__ import annotations

import json
import logging
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl

from config import OutputFormat

logger = logging.getLogger(__name__)


def json_safe(value: Any) -> Any:
    """Converts a report tree into plain JSON values.

    Non-finite floats become the strings "inf", "-inf" and "nan" so the
    output stays valid JSON.
    """
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isfinite(x):
            return x
        if math.isnan(x):
            return "nan"
        return "inf" if x > 0 else "-inf"
    return value


def render_json(data: dict[str, Any]) -> str:
    """Sorted keys, shortest round-trip floats, no timestamps."""
    return json.dumps(json_safe(data), sort_keys=True, indent=2) + "\n"


def render_csv(df: pl.DataFrame) -> str:
    return df.write_csv()


def verdict_table(report: dict[str, Any]) -> pl.DataFrame:
    """One row per check of a serialized AxiomReport."""
    verdicts = report.get("verdict", {})
    names = sorted(verdicts)
    return pl.DataFrame(
        {
            "check": names,
            "passed": [bool(verdicts[n]["passed"]) for n in names],
            "threshold": [float(verdicts[n]["threshold"]) for n in names],
            "worst": [
                None if verdicts[n]["worst"] is None
                else float(verdicts[n]["worst"])
                for n in names
            ],
            "count": [int(verdicts[n]["count"]) for n in names],
        },
        schema={
            "check": pl.String,
            "passed": pl.Boolean,
            "threshold": pl.Float64,
            "worst": pl.Float64,
            "count": pl.Int64,
        },
    )


def render_report(report: dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.csv:
        return render_csv(verdict_table(report))
    return render_json(report)


def render_table(
    df: pl.DataFrame, fmt: OutputFormat, meta: dict[str, Any] | None = None
) -> str:
    """CSV as is; JSON wraps the rows with optional metadata."""
    if fmt is OutputFormat.csv:
        return render_csv(df)
    payload = dict(meta or {})
    payload["rows"] = df.to_dicts()
    return render_json(payload)


def write_output(text: str, out: Path | None) -> None:
    """Writes text to out, or to stdout when out is None."""
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"wrote {out}")

"""Deterministic report emission: JSON, CSV tables and DOT graphs."""

import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..free_group.words import ConjClass, Word
from .errors import InputError

logger = logging.getLogger(__name__)

SCHEMA = 1
SIGNIFICANT_DIGITS = 12


@dataclasses.dataclass
class Report:
    command: str
    config: dict[str, Any]
    results: dict[str, Any]
    assertions: dict[str, bool] = dataclasses.field(default_factory=dict)
    warnings: list[str] = dataclasses.field(default_factory=list)
    truncation: dict[str, Any] = dataclasses.field(default_factory=dict)
    timing: float | None = None
    tables: dict[str, pd.DataFrame] = dataclasses.field(default_factory=dict)
    dot: str | None = None

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def to_dict(self) -> dict[str, Any]:
        payload = {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "assertions": self.assertions,
            "warnings": self.warnings,
            "truncation": self.truncation,
        }
        if self.timing is not None:
            payload["timing"] = self.timing
        return normalize(payload)


def _round(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def normalize(obj: Any) -> Any:
    """Plain JSON types with floats rounded to a fixed number of significant digits."""
    if isinstance(obj, bool | None | str):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, int | np.integer):
        return int(obj)
    if isinstance(obj, float | np.floating):
        return _round(float(obj))
    if isinstance(obj, ConjClass | Word):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, pd.DataFrame):
        return normalize(obj.to_dict(orient="records"))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return normalize({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, dict):
        return {str(normalize(k)): normalize(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple | set | frozenset):
        items = sorted(obj, key=str) if isinstance(obj, set | frozenset) else obj
        return [normalize(v) for v in items]
    return str(obj)


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g")


def write_report(report: Report, out_dir: Path, stem: str) -> list[Path]:
    """Write the JSON report plus any tables and DOT graph, returning the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / f"{stem}.json"]
    written[0].write_text(to_json(report), encoding="utf-8")
    for name, frame in sorted(report.tables.items()):
        path = out_dir / f"{stem}.{name}.csv"
        write_csv(frame, path)
        written.append(path)
    if report.dot is not None:
        path = out_dir / f"{stem}.dot"
        path.write_text(report.dot, encoding="utf-8")
        written.append(path)
    logger.info(f"Wrote {len(written)} files to {out_dir}")
    return written


def read_report(path: Path) -> dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Cannot read report {path}: {e}") from e
    if payload.get("schema") != SCHEMA:
        raise InputError(f"Unsupported report schema {payload.get('schema')!r} in {path}")
    return payload

"""CSV and JSON serialization of run results.

Both formats carry the same three parts: a configuration block, a table of
rows and a provenance string.  CSV files start with comment lines::

    # qmz-sim v0.1.0
    # key = value
    scan_value,p_a_analytic,p_b_analytic
    ...

and write floats in shortest round-trip form.  JSON uses a fixed key order
and 17 significant digits, so re-parsing and re-serializing reproduces the
exact bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from . import __version__

__all__ = ["PROVENANCE", "Report", "canonical_json", "format_float"]

PROVENANCE = f"qmz-sim v{__version__}"


def format_float(x: float) -> str:
    return repr(float(x))


def _json_value(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "__float__") and not isinstance(value, str):
        x = float(value)
        if not math.isfinite(x):
            return "null"
        return "%.17g" % x
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, Iterable):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _json_value(obj) + "\n"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class Report:
    """Configuration, result rows and optional extra tables of one command."""

    def __init__(
        self,
        config: Dict[str, Any],
        columns: Sequence[str],
        rows: List[Dict[str, Any]],
        summary: Optional[Dict[str, Any]] = None,
        trajectory: Optional[Dict[str, Sequence[float]]] = None,
    ):
        self.config = config
        self.columns = list(columns)
        self.rows = rows
        self.summary = summary or {}
        self.trajectory = trajectory

    def to_json(self) -> str:
        doc: Dict[str, Any] = {
            "config": self.config,
            "rows": [{c: row.get(c) for c in self.columns} for row in self.rows],
        }
        if self.summary:
            doc["summary"] = self.summary
        if self.trajectory is not None:
            doc["trajectory"] = self.trajectory
        doc["provenance"] = PROVENANCE
        return canonical_json(doc)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {PROVENANCE}\n")
        for key, value in self.config.items():
            buf.write(f"# {key} = {_csv_cell(value)}\n")
        for key, value in self.summary.items():
            buf.write(f"# summary.{key} = {_csv_cell(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_csv_cell(row.get(c)) for c in self.columns])
        if self.trajectory is not None:
            buf.write("# trajectory\n")
            keys = list(self.trajectory)
            writer.writerow(keys)
            for values in zip(*(self.trajectory[k] for k in keys)):
                writer.writerow([format_float(v) for v in values])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()

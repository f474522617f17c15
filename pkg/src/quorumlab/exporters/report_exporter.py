"""
Report Exporter

Writes verdicts, search reports and feasibility tables as JSON, text or CSV.
Register values appear as ``[ts, wid]`` pairs in JSON bodies, as ``(ts,wid)``
strings in JSON keys and in table cells.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..core.values import Value
from ..settings import get_settings


def to_jsonable(obj: Any) -> Any:
    """Convert report data into plain JSON types, recursively."""
    if isinstance(obj, Value):
        return obj.to_wire()
    if isinstance(obj, dict):
        return {str(k) if isinstance(k, Value) else k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return obj.as_posix()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


class ReportExporter:
    """Exports run summaries, check verdicts and search reports."""

    def __init__(self, output_dir: Optional[Path] = None):
        self.output_dir = Path(output_dir) if output_dir else get_settings().out_dir
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path_for(self, filename: str, suffix: str) -> Path:
        return self.output_dir / f"{filename}.{suffix}"

    def export_dict_json(self, data: Dict[str, Any], filename: str) -> Path:
        """
        Export a report as JSON with sorted keys.

        Args:
            data: Report data; may hold values, sets and numpy scalars
            filename: Output filename (without extension)

        Returns:
            Path to saved JSON file
        """
        output_path = self.path_for(filename, "json")
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(to_jsonable(data), f, indent=2, sort_keys=True, default=str)
            f.write("\n")
        return output_path

    def export_text(self, lines: List[str], filename: str) -> Path:
        output_path = self.path_for(filename, "txt")
        with open(output_path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        return output_path

    def export_table_csv(self, table: pd.DataFrame, filename: str) -> Path:
        """Export a table as CSV; value cells are written in ``(ts,wid)`` form."""
        output_path = self.path_for(filename, "csv")
        rendered = table.copy()
        for column in rendered.select_dtypes(include="object").columns:
            rendered[column] = rendered[column].map(lambda v: str(v) if isinstance(v, Value) else v)
        rendered.to_csv(output_path, index=False)
        return output_path

    def export_report(self, data: Dict[str, Any], lines: List[str], filename: str, fmt: str = "text") -> Path:
        """Write ``data`` as JSON for ``machine`` format, ``lines`` as text otherwise."""
        if fmt == "machine":
            return self.export_dict_json(data, filename)
        return self.export_text(lines, filename)

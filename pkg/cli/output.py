"""Serialization of results with 12 significant digits, and output bookkeeping."""

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

SIGNIFICANT_DIGITS = 12


def round_sig(value: Any) -> Any:
    """Recursively round floats to 12 significant digits; NaN/inf become None."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Mapping):
        return {str(k): round_sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v) for v in value]
    return value


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "" if not math.isfinite(value) else f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def to_json(data: Any) -> str:
    return json.dumps(round_sig(data), indent=2) + "\n"


def to_csv(
    rows: Iterable[Mapping[str, Any]], columns: Optional[List[str]] = None
) -> str:
    rows = list(rows)
    columns = columns or (list(rows[0].keys()) if rows else [])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class OutputDir:
    """Writes artifacts under one directory and remembers their digests."""

    def __init__(self, root: Path):
        self.root = root
        self.digests: Dict[str, str] = {}

    def _write(self, name: str, text: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / name
        path.write_text(text)
        self.digests[str(path)] = sha256_of(path)
        return path

    def json(self, name: str, data: Any) -> Path:
        return self._write(name, to_json(data))

    def jsonl(self, name: str, records: Iterable[Any]) -> Path:
        lines = [json.dumps(round_sig(r)) for r in records]
        return self._write(name, "\n".join(lines) + "\n")

    def csv(
        self,
        name: str,
        rows: Iterable[Mapping[str, Any]],
        columns: Optional[List[str]] = None,
    ) -> Path:
        return self._write(name, to_csv(rows, columns))

"""
Deterministic CSV / JSON rendering of command results
"""

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Sequence, TextIO

import numpy as np

from ..core.utils import format_float
from ..models.reports import SuitabilityReport


@dataclass
class CommandResult:
    """
    Output of one CLI command.

    ``rows`` feed the CSV table (fixed ``columns`` order); ``payload`` is
    the full JSON document. ``reports`` collects suitability verdicts for
    ``--require-suitable``.
    """
    command: str
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    payload: Dict[str, Any] = field(default_factory=dict)
    reports: List[SuitabilityReport] = field(default_factory=list)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return format_float(float(value))
    return str(value)


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars and fractions for ``json.dumps``"""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Fraction):
        return str(value)
    return value


def write_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]], stream: TextIO) -> None:
    """Header plus one line per row; floats with 17 significant digits"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])


def write_json(payload: Dict[str, Any], stream: TextIO) -> None:
    """Indented JSON with keys in insertion order"""
    # repr-based float output round-trips every double exactly
    stream.write(json.dumps(_jsonable(payload), indent=2, allow_nan=True))
    stream.write("\n")


def render(result: CommandResult, stream: TextIO, as_json: bool = False) -> None:
    if as_json:
        write_json(result.payload, stream)
    else:
        write_csv(result.columns, result.rows, stream)

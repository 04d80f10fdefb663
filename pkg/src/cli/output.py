"""Output records and their text, JSON and CSV renderings."""

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from src.cli.complex_literal import format_complex
from src.models.casimir_config import PFA_COEFFICIENT, BoundaryCondition, EnergyCurve, EnergyRecord
from src.models.errors import DomainError, FitError

SCHEMA_VERSION = 1
CURVE_COLUMNS = ("H", "energy_per_length", "ratio_pfa", "est_error", "r_max_used")


@dataclass
class OutputRecord:
    """Everything one command prints.

    Attributes:
        command: Subcommand name
        inputs: Echo of the parsed parameters
        payload: Command-specific results
        diagnostics: Truncations, tolerances and error estimates behind the payload
        columns: Column names for the CSV rendering
        rows: Rows for the CSV rendering
        text: Preformatted text rendering; defaults to key = value lines
        csv_text: Preformatted CSV rendering, used instead of columns and rows
    """

    command: str
    inputs: Dict[str, Any]
    payload: Dict[str, Any]
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    columns: Optional[List[str]] = None
    rows: Optional[List[List[Any]]] = None
    text: Optional[str] = None
    csv_text: Optional[str] = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        """Envelope as plain JSON-ready types."""
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "inputs": to_jsonable(self.inputs),
            "payload": to_jsonable(self.payload),
            "diagnostics": to_jsonable(self.diagnostics),
        }


def to_jsonable(value: Any) -> Any:
    """Convert complex numbers to {"re": .., "im": ..} objects and numpy/enum values to plain Python."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render(record: OutputRecord, fmt: str) -> str:
    """Render a record as json, csv or text."""
    if fmt == "json":
        return json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return render_csv(record)
    if fmt == "text":
        return render_text(record)
    raise DomainError(f"unknown output format '{fmt}'")


def render_text(record: OutputRecord) -> str:
    if record.text is not None:
        return record.text if record.text.endswith("\n") else record.text + "\n"
    lines = [f"{key} = {_text_value(value)}" for key, value in sorted(record.payload.items())]
    return "\n".join(lines) + "\n"


def render_csv(record: OutputRecord) -> str:
    if record.csv_text is not None:
        return record.csv_text
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if record.columns is not None and record.rows is not None:
        writer.writerow(record.columns)
        for row in record.rows:
            writer.writerow([_csv_value(item) for item in row])
    else:
        keys = sorted(record.payload)
        writer.writerow(keys)
        writer.writerow([_csv_value(record.payload[key]) for key in keys])
    return buffer.getvalue()


def write_curve_csv(curve: EnergyCurve, stream: TextIO) -> None:
    """Write a curve with ``# key=value`` metadata lines ahead of the header."""
    stream.write(f"# d={float(curve.d)!r}\n")
    stream.write(f"# bc={curve.bc.value}\n")
    stream.write(f"# mu0={float(curve.mu0)!r}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for record in curve.records:
        writer.writerow(
            [
                repr(float(record.H)),
                repr(float(record.energy_per_length)),
                repr(float(record.ratio_pfa)),
                repr(float(record.est_error)),
                record.r_max_used,
            ]
        )


def read_curve_csv(stream: TextIO) -> EnergyCurve:
    """Read a curve written by write_curve_csv.

    Without a ``d`` metadata line the half-width is recovered from
    E / ratio = -(pi^2/720) 2d / H^3 (electromagnetic normalization).

    Raises:
        FitError: If the file has no usable rows or lacks a required column
    """
    metadata: Dict[str, str] = {}
    body: List[str] = []
    for line in stream:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition("=")
            metadata[key.strip()] = value.strip()
        else:
            body.append(stripped)

    reader = csv.DictReader(body)
    missing = [column for column in CURVE_COLUMNS[:4] if column not in (reader.fieldnames or [])]
    if missing:
        raise FitError(f"curve file lacks columns: {', '.join(missing)}")
    try:
        records = [
            EnergyRecord(
                H=float(row["H"]),
                energy_per_length=float(row["energy_per_length"]),
                ratio_pfa=float(row["ratio_pfa"]),
                est_error=float(row["est_error"]),
                r_max_used=int(row.get("r_max_used") or 0),
            )
            for row in reader
        ]
    except ValueError as e:
        raise FitError(f"malformed curve row: {e}") from None
    if not records:
        raise FitError("curve file has no data rows")

    bc = BoundaryCondition.parse(metadata.get("bc", "em"))
    if "d" in metadata:
        d = float(metadata["d"])
    else:
        d = _recover_half_width(records, bc)
    curve = EnergyCurve(d=d, bc=bc, mu0=float(metadata.get("mu0", 0.0)))
    for record in records:
        curve.add(record)
    return curve


def _recover_half_width(records: List[EnergyRecord], bc: BoundaryCondition) -> float:
    scale = 1.0 if bc is BoundaryCondition.ELECTROMAGNETIC else 0.5
    estimates = [
        -record.energy_per_length / record.ratio_pfa * record.H**3 / (2.0 * PFA_COEFFICIENT * scale)
        for record in records
        if record.ratio_pfa != 0
    ]
    if not estimates:
        raise FitError("cannot recover d: every ratio is zero")
    return float(np.median(estimates))


def _text_value(value: Any) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        return format_complex(complex(value))
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, str):
        return value
    return json.dumps(to_jsonable(value), sort_keys=True)


def _csv_value(value: Any) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        return format_complex(complex(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(to_jsonable(value))

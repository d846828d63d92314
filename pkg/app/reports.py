from __future__ import annotations

import csv
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from services.spectral_types import BoundReport, Graph, Spectrum, TransmissionProfile

SCHEMA_PATH = Path(__file__).with_name("report_schema.json")

BOUND_COLUMNS = (
    "name",
    "kind",
    "bound_lo",
    "bound_hi",
    "observed",
    "slack",
    "holds",
    "equality",
    "skip_reason",
)
SWEEP_COLUMNS = ("alpha", "bound_name", "bound_lo", "bound_hi", "observed", "slack", "holds")


@dataclass
class CommandResult:
    """What a command produced: a JSON payload, flat rows for CSV/table, and an exit code."""

    payload: dict[str, Any]
    columns: tuple[str, ...]
    rows: list[dict[str, Any]] = field(default_factory=list)
    exit_code: int = 0


def load_schema() -> dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


# =========
# Payload builders
# =========


def graph_payload(graph: Graph, fmt: str) -> dict[str, Any]:
    return {"n": graph.n, "edges": [list(edge) for edge in graph.edge_list()], "format": fmt}


def spectrum_payload(
    graph: Graph, fmt: str, alpha: float, spectrum: Spectrum, profile: TransmissionProfile
) -> dict[str, Any]:
    return {
        "graph": graph_payload(graph, fmt),
        "alpha": alpha,
        "spectrum": list(spectrum.values),
        "spread": spectrum.spread,
        "harary": profile.harary,
        "transmissions": list(profile.rtr),
        "transmission_regular": profile.is_regular,
        "distinct_eigenvalues": len(spectrum.distinct()),
    }


def bound_payload(report: BoundReport) -> dict[str, Any]:
    return {
        "name": report.name,
        "kind": report.kind.value,
        "observed": report.observed,
        "bound_lo": report.bound_lo,
        "bound_hi": report.bound_hi,
        "holds": report.holds,
        "slack": report.slack,
        "equality": report.equality,
        "context": report.context,
        "skip_reason": report.skip_reason,
    }


# =========
# Rendering
# =========


def _round(value: Any, digits: int) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        rounded = float(f"{value:.{digits}g}")
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {key: _round(item, digits) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_round(item, digits) for item in value]
    return value


def _cell(value: Any, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        text = f"{value:.{digits}g}"
        return "0" if text == "-0" else text
    return str(value)


def render_json(result: CommandResult, digits: int) -> str:
    return json.dumps(_round(result.payload, digits), indent=2) + "\n"


def render_csv(result: CommandResult, digits: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(row.get(column), digits) for column in result.columns])
    return buffer.getvalue()


def render_table(result: CommandResult, digits: int) -> str:
    cells = [list(result.columns)]
    cells += [[_cell(row.get(column), digits) for column in result.columns] for row in result.rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(result.columns))]
    lines = [
        "  ".join(text.ljust(width) for text, width in zip(line, widths, strict=True))
        for line in cells
    ]
    return "\n".join(line.rstrip() for line in lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}
FORMATS: Sequence[str] = tuple(RENDERERS)


def render(result: CommandResult, fmt: str, *, digits: int = 12) -> str:
    return RENDERERS[fmt](result, digits)

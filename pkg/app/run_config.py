from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from app.config import Settings, settings
from services import graph_core
from services.bounds import BoundOptions
from services.spectral_types import (
    AlphaParam,
    DomainError,
    Graph,
    GraphFamily,
    GraphFormat,
    ParseError,
)

FAMILY_PARAMS = ("n", "a", "b", "m", "p", "seed")


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph6: str | None = None
    edgelist: Path | None = None
    family: GraphFamily | None = None
    params: dict[str, Any] = field(default_factory=dict)
    alphas: tuple[float, ...] | None = None
    fmt: str = "json"
    tol: float | None = None
    max_order: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        for alpha in self.alphas or ():
            AlphaParam(alpha)

    def sources(self) -> list[str]:
        present = [
            ("--graph6", self.graph6 is not None),
            ("--edgelist", self.edgelist is not None),
            ("--family", self.family is not None),
        ]
        return [flag for flag, given in present if given]

    def require_single_source(self) -> None:
        found = self.sources()
        if len(found) != 1:
            listed = ", ".join(found) if found else "none"
            raise DomainError(
                f"exactly one input source is required (--graph6, --edgelist or --family), "
                f"got {listed}"
            )

    def bound_options(self, config: Settings = settings) -> BoundOptions:
        tol = self.tol
        return BoundOptions(
            tol=config.bound_tol if tol is None else tol,
            equality_tol=config.equality_tol if tol is None else tol,
            regular_tol=config.regular_tol,
            eig_tol=config.eig_tol,
            eig_method=config.eig_method,
            eig_max_sweeps=config.eig_max_sweeps,
            group_tol=config.group_tol,
            clique_limit=config.clique_limit,
        )

    def oracle_tol(self, config: Settings = settings) -> float:
        return config.oracle_tol if self.tol is None else self.tol


def parse_alphas(text: str) -> tuple[float, ...]:
    """
    "start:stop:step" is a half-open grid (stop excluded), values rounded to 12 decimals;
    anything else is a comma-separated list.
    Returns: tuple of alphas in the given order (possibly empty for a grid like 0.5:0.5:0.1).
    """
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"alpha grid must look like start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(part) for part in parts)
        except ValueError as exc:
            raise DomainError(f"alpha grid has a non-numeric part: {text!r}") from exc
        if step <= 0:
            raise DomainError(f"alpha grid step must be positive, got {step}")
        count = max(0, math.ceil((stop - start) / step - 1e-9))
        values = tuple(round(start + i * step, 12) for i in range(count))
    else:
        try:
            values = tuple(float(part) for part in text.split(",") if part.strip())
        except ValueError as exc:
            raise DomainError(f"alpha list has a non-numeric entry: {text!r}") from exc
    for value in values:
        AlphaParam(value)
    return values


def load_graph(config: RunConfig, settings_: Settings = settings) -> tuple[Graph, str]:
    """Resolve the single input source. Returns: (graph, format label for reports)."""
    config.require_single_source()
    if config.graph6 is not None:
        return graph_core.parse_graph(config.graph6, GraphFormat.GRAPH6), GraphFormat.GRAPH6.value
    if config.edgelist is not None:
        try:
            text = config.edgelist.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"edge list {config.edgelist} is not UTF-8", offset=exc.start) from exc
        graph = graph_core.parse_graph(text, GraphFormat.EDGELIST, n=config.params.get("n"))
        return graph, GraphFormat.EDGELIST.value
    assert config.family is not None
    graph = graph_core.generate(
        config.family, max_attempts=settings_.connect_attempts, **config.params
    )
    return graph, config.family.value

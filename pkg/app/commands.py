from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from app.config import Settings, settings
from app.reports import (
    BOUND_COLUMNS,
    SWEEP_COLUMNS,
    CommandResult,
    bound_payload,
    graph_payload,
    spectrum_payload,
)
from app.run_config import RunConfig, load_graph
from services import bounds, closed_forms, graph_core, rd_matrices
from services.linalg import eig_sym, max_abs_deviation
from services.spectral_types import BoundReport, DomainError, Graph, GraphFamily, Spectrum

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.0
VERIFY_ALPHAS = (0.0, 0.25, 0.5, 0.75)
VERIFY_MAX_ORDER = {
    GraphFamily.COMPLETE: 12,
    GraphFamily.COMPLETE_BIPARTITE: 12,
    GraphFamily.DOUBLE_STAR: 10,
}
VERIFY_COLUMNS = (
    "family",
    "params",
    "alpha",
    "max_deviation",
    "ok",
    "printed_pairing_dev",
    "reconciling_corner",
)


def _single_alpha(config: RunConfig) -> float:
    if not config.alphas:
        return DEFAULT_ALPHA
    if len(config.alphas) != 1:
        raise DomainError(f"{config.command} takes one alpha, got {len(config.alphas)}; use sweep")
    return config.alphas[0]


def _spectral_payload(
    config: RunConfig, config_settings: Settings
) -> tuple[Graph, float, dict[str, Any], bounds.SpectralContext]:
    graph, fmt = load_graph(config, config_settings)
    alpha = _single_alpha(config)
    ctx = bounds.SpectralContext(graph, alpha, config.bound_options(config_settings))
    payload = spectrum_payload(graph, fmt, alpha, ctx.spectrum, ctx.profile)
    payload["two_valued_non_complete"] = closed_forms.two_valued_non_complete(graph, ctx.spectrum)
    return graph, alpha, payload, ctx


def cmd_spectrum(config: RunConfig, config_settings: Settings = settings) -> CommandResult:
    """Eigenvalues (descending), spread, Harary index, transmissions and regularity."""
    graph, alpha, payload, ctx = _spectral_payload(config, config_settings)
    rows = [{"index": k, "eigenvalue": value} for k, value in enumerate(ctx.spectrum.values, 1)]
    logger.info(
        "spectrum n=%s m=%s alpha=%s spread=%.12g", graph.n, graph.m, alpha, ctx.spectrum.spread
    )
    return CommandResult(payload=payload, columns=("index", "eigenvalue"), rows=rows)


def _bound_row(report: BoundReport) -> dict[str, Any]:
    row = bound_payload(report)
    row.pop("context")
    return row


def cmd_bounds(config: RunConfig, config_settings: Settings = settings) -> CommandResult:
    """One row per bound; exit 1 when any evaluated bound fails to hold."""
    graph, alpha, payload, _ = _spectral_payload(config, config_settings)
    reports = bounds.check_all(graph, alpha, options=config.bound_options(config_settings))
    payload["bounds"] = [bound_payload(report) for report in reports]
    violated = [report.name for report in reports if not report.holds]
    logger.info(
        "bounds n=%s alpha=%s evaluated=%s skipped=%s violated=%s",
        graph.n,
        alpha,
        sum(not report.skipped for report in reports),
        sum(report.skipped for report in reports),
        violated,
    )
    return CommandResult(
        payload=payload,
        columns=BOUND_COLUMNS,
        rows=[_bound_row(report) for report in reports],
        exit_code=1 if violated else 0,
    )


def cmd_sweep(config: RunConfig, config_settings: Settings = settings) -> CommandResult:
    """
    check_all over an alpha grid; rows ordered alpha-outer, bound-inner regardless of
    which worker finishes first. Skipped bounds are left out of the rows.
    """
    if not config.alphas:
        raise DomainError("sweep needs a non-empty alpha grid (--alphas start:stop:step)")
    graph, fmt = load_graph(config, config_settings)
    options = config.bound_options(config_settings)

    def cell(alpha: float) -> list[BoundReport]:
        return bounds.check_all(graph, alpha, options=options)

    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        per_alpha = list(pool.map(cell, config.alphas))

    rows = [
        {
            "alpha": alpha,
            "bound_name": report.name,
            "bound_lo": report.bound_lo,
            "bound_hi": report.bound_hi,
            "observed": report.observed,
            "slack": report.slack,
            "holds": report.holds,
        }
        for alpha, reports in zip(config.alphas, per_alpha, strict=True)
        for report in reports
        if not report.skipped
    ]
    violations = sum(not row["holds"] for row in rows)
    logger.info(
        "sweep n=%s alphas=%s rows=%s violations=%s",
        graph.n,
        len(config.alphas),
        len(rows),
        violations,
    )
    return CommandResult(
        payload={"graph": graph_payload(graph, fmt), "sweep": rows},
        columns=SWEEP_COLUMNS,
        rows=rows,
        exit_code=1 if violations else 0,
    )


# =========
# Closed-form oracle
# =========


def _paired(params: dict[str, int], first: str, second: str) -> dict[str, int] | None:
    given = [key for key in (first, second) if key in params]
    if len(given) == 1:
        raise DomainError(f"pass both --{first} and --{second}, or neither, got only --{given[0]}")
    return {first: params[first], second: params[second]} if given else None


def _family_cases(config: RunConfig) -> list[dict[str, int]]:
    family = config.family
    assert family is not None
    params = {key: value for key, value in config.params.items() if value is not None}
    limit = VERIFY_MAX_ORDER[family] if config.max_order is None else config.max_order

    if family is GraphFamily.COMPLETE:
        if "n" in params:
            return [{"n": params["n"]}]
        cases = [{"n": n} for n in range(2, limit + 1)]
    elif family is GraphFamily.COMPLETE_BIPARTITE:
        single = _paired(params, "a", "b")
        if single:
            return [single]
        cases = [{"a": a, "b": b} for a in range(1, limit) for b in range(1, limit - a + 1)]
    else:
        single = _paired(params, "m", "n")
        if single:
            return [single]
        cases = [{"m": m, "n": n} for m in range(1, limit) for n in range(1, limit - m + 1)]
    if not cases:
        raise DomainError(f"--max-order {limit} leaves no {family.value} cases to verify")
    return cases


def _closed_form(
    family: GraphFamily, case: dict[str, int], alpha: float, method: str
) -> Spectrum:
    if family is GraphFamily.COMPLETE:
        return closed_forms.spectrum_complete(case["n"], alpha)
    if family is GraphFamily.COMPLETE_BIPARTITE:
        return closed_forms.spectrum_complete_bipartite(case["a"], case["b"], alpha)
    return closed_forms.spectrum_double_star(case["m"], case["n"], alpha, method=method)


def cmd_verify_family(config: RunConfig, config_settings: Settings = settings) -> CommandResult:
    """Closed-form spectra against the eigensolver; exit 0 iff every deviation is within tol."""
    family = config.family
    if family not in VERIFY_MAX_ORDER:
        name = family.value if family is not None else None
        raise DomainError(
            f"verify-family supports complete, complete_bipartite and double_star, got {name!r}"
        )
    assert family is not None
    tol = config.oracle_tol(config_settings)
    alphas = config.alphas or VERIFY_ALPHAS
    method = config_settings.eig_method

    rows: list[dict[str, Any]] = []
    for case in _family_cases(config):
        dist = graph_core.apsp(graph_core.generate(family, **case))
        for alpha in alphas:
            numeric = eig_sym(
                rd_matrices.rd_alpha_matrix(dist, alpha),
                tol=config_settings.eig_tol,
                max_sweeps=config_settings.eig_max_sweeps,
                method=method,
            )
            deviation = max_abs_deviation(_closed_form(family, case, alpha, method), numeric)
            row: dict[str, Any] = {
                "family": family.value,
                "params": ",".join(f"{key}={value}" for key, value in case.items()),
                "alpha": alpha,
                "max_deviation": deviation,
                "ok": deviation <= tol,
            }
            if family is GraphFamily.DOUBLE_STAR and config_settings.include_diagnostics:
                diagnostic = closed_forms.diagnose_double_star(
                    case["m"], case["n"], alpha, numeric, tol=tol, method=method
                )
                row["printed_pairing_dev"] = diagnostic.printed_pairing_dev
                row["reconciling_corner"] = diagnostic.reconciling_corner
                if not row["ok"]:
                    logger.warning(
                        "S_%s,%s alpha=%s mismatch %.3e; reconciling corner entry: %s",
                        case["m"],
                        case["n"],
                        alpha,
                        deviation,
                        diagnostic.reconciling_corner,
                    )
            rows.append(row)

    worst = max((row["max_deviation"] for row in rows), default=0.0)
    logger.info("verify-family %s cases=%s max_deviation=%.3e", family.value, len(rows), worst)
    return CommandResult(
        payload={"family": family.value, "tol": tol, "max_deviation": worst, "cases": rows},
        columns=VERIFY_COLUMNS,
        rows=rows,
        exit_code=0 if worst <= tol else 1,
    )


COMMANDS = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "verify-family": cmd_verify_family,
}

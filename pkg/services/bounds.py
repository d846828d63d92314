from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from services import graph_core, rd_matrices
from services.linalg import eig_sym, quotient_matrix
from services.spectral_types import (
    AlphaParam,
    BoundKind,
    BoundReport,
    DistanceMatrix,
    DomainError,
    Graph,
    Spectrum,
    SymmetricMatrix,
    TransmissionProfile,
    as_alpha,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundOptions:
    tol: float = 1e-8
    equality_tol: float = 1e-8
    regular_tol: float = 1e-9
    eig_tol: float = 1e-10
    eig_method: str = "jacobi"
    eig_max_sweeps: int = 100
    group_tol: float = 1e-8
    clique_limit: int = 64


class SpectralContext:
    """Lazily computed quantities shared by every bound evaluated on one (graph, alpha)."""

    def __init__(
        self, graph: Graph, alpha: float | AlphaParam, options: BoundOptions | None = None
    ) -> None:
        self.graph = graph
        self.alpha = float(as_alpha(alpha))
        self.options = options or BoundOptions()

    @property
    def n(self) -> int:
        return self.graph.n

    def eig(self, matrix: SymmetricMatrix) -> Spectrum:
        opts = self.options
        return eig_sym(
            matrix,
            tol=opts.eig_tol,
            max_sweeps=opts.eig_max_sweeps,
            method=opts.eig_method,
            group_tol=opts.group_tol,
        )

    @cached_property
    def dist(self) -> DistanceMatrix:
        return graph_core.apsp(self.graph)

    @cached_property
    def diameter(self) -> int:
        return graph_core.diameter(self.dist)

    @cached_property
    def profile(self) -> TransmissionProfile:
        return rd_matrices.transmission_profile(self.dist, regular_tol=self.options.regular_tol)

    @cached_property
    def rd_alpha(self) -> SymmetricMatrix:
        return rd_matrices.rd_alpha_matrix(self.dist, self.alpha)

    @cached_property
    def spectrum(self) -> Spectrum:
        return self.eig(self.rd_alpha)

    @cached_property
    def rd_spectrum(self) -> Spectrum:
        return self.eig(rd_matrices.rd_alpha_matrix(self.dist, 0.0))

    @cached_property
    def frobenius_sq(self) -> float:
        return rd_matrices.rd_alpha_frobenius_sq(self.dist, self.alpha)

    def require_pair(self) -> None:
        if self.n < 2:
            raise DomainError(f"bound needs n >= 2, got n={self.n}")


# =========
# Report assembly
# =========


def _report(
    ctx: SpectralContext,
    name: str,
    kind: BoundKind,
    observed: float,
    *,
    lo: float | None = None,
    hi: float | None = None,
    stated_condition: bool | None = None,
    **context: Any,
) -> BoundReport:
    """
    holds: lo - tol <= observed <= hi + tol, tol scaled by max(1, |values|).
    equality: observed within equality_tol (same scaling) of some present side.
    """
    sides = [side for side in (lo, hi) if side is not None]
    scale = max(1.0, abs(observed), *(abs(side) for side in sides))
    slack_tol = ctx.options.tol * scale
    holds = (lo is None or lo - slack_tol <= observed) and (
        hi is None or observed <= hi + slack_tol
    )
    gaps = []
    if lo is not None:
        gaps.append(observed - lo)
    if hi is not None:
        gaps.append(hi - observed)
    equality = any(abs(gap) <= ctx.options.equality_tol * scale for gap in gaps)

    details: dict[str, Any] = {"alpha": ctx.alpha, "n": ctx.n}
    if stated_condition is not None:
        details["stated_condition"] = stated_condition
    details.update(context)

    if not holds:
        logger.warning(
            "bound %s violated: observed=%.12g lo=%s hi=%s alpha=%s n=%s",
            name,
            observed,
            lo,
            hi,
            ctx.alpha,
            ctx.n,
        )
    return BoundReport(
        name=name,
        kind=kind,
        observed=observed,
        bound_lo=lo,
        bound_hi=hi,
        holds=holds,
        slack=min(gaps),
        equality=equality,
        context=details,
    )


def _root_difference(entries: tuple[float, float, float, float]) -> float:
    """Spread of a 2x2 matrix [[b11, b12], [b21, b22]]: sqrt((b11+b22)^2 - 4(b11 b22 - b12 b21))."""
    b11, b12, b21, b22 = entries
    return math.sqrt(max((b11 + b22) ** 2 - 4.0 * (b11 * b22 - b12 * b21), 0.0))


def _quotient_discrepancy(
    ctx: SpectralContext, cell: tuple[int, ...], entries: tuple[float, float, float, float]
) -> float:
    rest = tuple(v for v in range(ctx.n) if v not in cell)
    computed = quotient_matrix(
        ctx.rd_alpha, [cell, rest], tol=ctx.options.eig_tol, method=ctx.options.eig_method
    )
    return float(np.max(np.abs(computed.b - np.array(entries).reshape(2, 2))))


# =========
# Bounds on the spread and on lambda_1
# =========


def _mirsky_upper(ctx: SpectralContext) -> BoundReport:
    if ctx.n < 3:
        raise DomainError(f"mirsky-upper needs n >= 3, got n={ctx.n}")
    a, h, n = ctx.alpha, ctx.profile.harary, ctx.n
    radicand = 2.0 * ctx.frobenius_sq - 8.0 / n * a * a * h * h
    values = ctx.spectrum.values
    midpoint = 0.5 * (values[0] + values[-1])
    eq_tol = ctx.options.equality_tol * max(1.0, abs(values[0]), abs(values[-1]))
    middle_at_midpoint = all(abs(v - midpoint) <= eq_tol for v in values[1:-1])
    return _report(
        ctx,
        "mirsky-upper",
        BoundKind.UPPER,
        ctx.spectrum.spread,
        hi=math.sqrt(max(radicand, 0.0)),
        stated_condition=middle_at_midpoint,
        equality_interpretation="evaluated on RD_alpha",
    )


def _lambda1_bounds(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    a = ctx.alpha
    rtr = np.array(ctx.profile.rtr)
    recip = rd_matrices.reciprocal_matrix(ctx.dist)
    lower = math.sqrt(math.fsum(rtr * rtr) / ctx.n)
    weighted = recip @ np.sqrt(rtr) / np.sqrt(rtr)
    upper = float(np.max(a * rtr + (1.0 - a) * weighted))
    return _report(
        ctx,
        "lambda1-bounds",
        BoundKind.SANDWICH,
        ctx.spectrum.largest,
        lo=lower,
        hi=upper,
        stated_condition=ctx.profile.is_regular,
    )


def _lambda1_harary_lower(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    return _report(
        ctx,
        "lambda1-harary-lower",
        BoundKind.LOWER,
        ctx.spectrum.largest,
        lo=2.0 * ctx.profile.harary / ctx.n,
        stated_condition=ctx.profile.is_regular,
    )


def _require_alpha_below_one(ctx: SpectralContext, name: str) -> None:
    if ctx.alpha >= 1.0:
        raise DomainError(f"{name} needs alpha in [0, 1), got {ctx.alpha}")


def _spread_lower_harary(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    _require_alpha_below_one(ctx, "spread-lower-harary")
    return _report(
        ctx,
        "spread-lower-harary",
        BoundKind.LOWER,
        ctx.spectrum.spread,
        lo=2.0 * (1.0 - ctx.alpha) * ctx.profile.harary / (ctx.n - 1),
        stated_condition=ctx.graph.is_complete(),
    )


def _spread_lower_frobenius(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    if not 0.5 <= ctx.alpha < 1.0:
        raise DomainError(f"spread-lower-frobenius needs alpha in [0.5, 1), got {ctx.alpha}")
    n, fro = ctx.n, ctx.frobenius_sq
    candidates = {
        "rms_transmission": math.sqrt(math.fsum(r * r for r in ctx.profile.rtr) / n),
        "harary_mean": 2.0 * ctx.profile.harary / n,
    }

    def f(x: float) -> float:
        return x - math.sqrt(max(fro - x * x, 0.0) / (n - 1))

    chosen = max(candidates, key=lambda key: f(candidates[key]))
    return _report(
        ctx,
        "spread-lower-frobenius",
        BoundKind.LOWER,
        ctx.spectrum.spread,
        lo=f(candidates[chosen]),
        stated_condition=ctx.graph.is_complete(),
        x_choice=chosen,
        x_value=candidates[chosen],
        frobenius_sq=fro,
    )


def _spread_upper_lambda1(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    if ctx.alpha < 0.5:
        raise DomainError(f"spread-upper-lambda1 needs alpha in [0.5, 1], got {ctx.alpha}")
    smallest = ctx.spectrum.smallest
    return _report(
        ctx,
        "spread-upper-lambda1",
        BoundKind.UPPER,
        ctx.spectrum.spread,
        hi=ctx.spectrum.largest,
        stated_condition=abs(smallest) <= ctx.options.equality_tol * max(1.0, ctx.spectrum.largest),
        smallest_eigenvalue=smallest,
    )


def _eigen_shift_bounds(ctx: SpectralContext, k: int) -> BoundReport:
    ctx.require_pair()
    if not 1 <= k <= ctx.n:
        raise DomainError(f"eigenvalue index k must lie in [1, {ctx.n}], got {k}")
    a = ctx.alpha
    base = (1.0 - a) * ctx.rd_spectrum.values[k - 1]
    return _report(
        ctx,
        f"eigen-shift-k{k}",
        BoundKind.SANDWICH,
        ctx.spectrum.values[k - 1],
        lo=a * ctx.profile.rtr_min + base,
        hi=a * ctx.profile.rtr_max + base,
        stated_condition=ctx.profile.is_regular,
        k=k,
    )


def _spread_sandwich_transmission(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    a = ctx.alpha
    gap = ctx.profile.rtr_max - ctx.profile.rtr_min
    base = (1.0 - a) * ctx.rd_spectrum.spread
    return _report(
        ctx,
        "spread-sandwich",
        BoundKind.SANDWICH,
        ctx.spectrum.spread,
        lo=base - a * gap,
        hi=base + a * gap,
        stated_condition=ctx.profile.is_regular,
        rd_spread=ctx.rd_spectrum.spread,
    )


def _regular_spread_identity(ctx: SpectralContext) -> BoundReport:
    ctx.require_pair()
    if not ctx.profile.is_regular:
        raise DomainError(
            "regular-spread-identity needs a transmission regular graph "
            f"(RTr ranges over [{ctx.profile.rtr_min:.6g}, {ctx.profile.rtr_max:.6g}])"
        )
    target = (1.0 - ctx.alpha) * ctx.rd_spectrum.spread
    return _report(
        ctx,
        "regular-spread-identity",
        BoundKind.SANDWICH,
        ctx.spectrum.spread,
        lo=target,
        hi=target,
        stated_condition=True,
        transmission=ctx.profile.rtr_max,
    )


def _spread_upper_diam2(ctx: SpectralContext) -> BoundReport:
    if ctx.diameter != 2:
        raise DomainError(f"spread-upper-diam2 needs diameter 2, graph has diameter {ctx.diameter}")
    complement = graph_core.complement(ctx.graph)
    a_spread = ctx.eig(rd_matrices.a_alpha_matrix(complement, ctx.alpha)).spread
    return _report(
        ctx,
        "spread-upper-diam2",
        BoundKind.UPPER,
        ctx.spectrum.spread,
        hi=(1.0 - ctx.alpha) * ctx.n + 0.5 * a_spread,
        stated_condition=ctx.profile.is_regular,
        complement_a_alpha_spread=a_spread,
    )


def _spread_upper_diam3(ctx: SpectralContext) -> BoundReport:
    if ctx.diameter < 3:
        raise DomainError(
            f"spread-upper-diam3 needs diameter >= 3, graph has diameter {ctx.diameter}"
        )
    a_spread = ctx.eig(rd_matrices.a_alpha_matrix(ctx.graph, ctx.alpha)).spread
    mstar_spread = ctx.eig(rd_matrices.mstar_matrix(ctx.graph, ctx.dist, ctx.alpha)).spread
    return _report(
        ctx,
        "spread-upper-diam3",
        BoundKind.UPPER,
        ctx.spectrum.spread,
        hi=0.5 * (1.0 - ctx.alpha) * ctx.n + 0.5 * a_spread + mstar_spread,
        a_alpha_spread=a_spread,
        mstar_spread=mstar_spread,
    )


# =========
# Quotient bounds over a two-cell partition
# =========


def _spread_lower_bipartite(ctx: SpectralContext) -> BoundReport:
    n, a, h = ctx.n, ctx.alpha, ctx.profile.harary
    if n < 3:
        raise DomainError(f"spread-lower-bipartite needs n >= 3, got n={n}")
    if graph_core.bipartition(ctx.graph) is None:
        raise DomainError("spread-lower-bipartite needs a bipartite graph (odd cycle found)")
    delta, centres = graph_core.max_degree_vertices(ctx.graph)
    if delta > n - 2:
        raise DomainError(
            f"spread-lower-bipartite needs max degree <= n-2, got {delta} (star: use closed form)"
        )

    best: tuple[float, int, tuple[float, float, float, float]] | None = None
    for v in centres:
        t_v = rd_matrices.neighbor_mean_transmission(ctx.graph, ctx.dist, v)
        closed = delta * t_v + ctx.profile.rtr[v]
        inner = 0.5 * delta * (delta + 3)
        cross = closed - inner
        entries = (
            (0.5 * (1 - a) * delta * (delta + 3) + a * closed) / (delta + 1),
            (1 - a) * cross / (delta + 1),
            (1 - a) * cross / (n - delta - 1),
            (a * (2 * h - closed) + (1 - a) * (2 * h - 2 * closed + inner)) / (n - delta - 1),
        )
        value = _root_difference(entries)
        if best is None or value > best[0]:
            best = (value, v, entries)

    assert best is not None
    value, vertex, entries = best
    cell = (vertex, *ctx.graph.neighbors(vertex))
    return _report(
        ctx,
        "spread-lower-bipartite",
        BoundKind.LOWER,
        ctx.spectrum.spread,
        lo=value,
        vertex=vertex,
        max_degree=delta,
        quotient_entries=list(entries),
        quotient_discrepancy=_quotient_discrepancy(ctx, tuple(sorted(cell)), entries),
        harary_reading="H(G)",
    )


def _spread_lower_clique(ctx: SpectralContext) -> BoundReport:
    n, a, h = ctx.n, ctx.alpha, ctx.profile.harary
    if n < 3:
        raise DomainError(f"spread-lower-clique needs n >= 3, got n={n}")
    omega, cliques = graph_core.maximum_cliques(ctx.graph, limit=ctx.options.clique_limit)
    if omega >= n:
        raise DomainError("spread-lower-clique needs omega <= n-1; K_n spread is n(1-alpha)")

    best: tuple[float, tuple[int, ...], tuple[float, float, float, float]] | None = None
    inner = omega * (omega - 1)
    for clique in cliques:
        s_i = math.fsum(ctx.profile.rtr[v] for v in clique)
        entries = (
            (a * s_i + (1 - a) * inner) / omega,
            (1 - a) * (s_i - inner) / omega,
            (1 - a) * (s_i - inner) / (n - omega),
            (a * (2 * h - s_i) + (1 - a) * (2 * h - 2 * s_i + inner)) / (n - omega),
        )
        value = _root_difference(entries)
        if best is None or value > best[0]:
            best = (value, clique, entries)

    assert best is not None
    value, clique, entries = best
    return _report(
        ctx,
        "spread-lower-clique",
        BoundKind.LOWER,
        ctx.spectrum.spread,
        lo=value,
        clique=list(clique),
        clique_number=omega,
        quotient_entries=list(entries),
        quotient_discrepancy=_quotient_discrepancy(ctx, clique, entries),
    )


# =========
# Public entry points
# =========


def _public(bound: Callable[[SpectralContext], BoundReport]) -> Callable[..., BoundReport]:
    def run(
        graph: Graph, alpha: float | AlphaParam, *, options: BoundOptions | None = None
    ) -> BoundReport:
        return bound(SpectralContext(graph, alpha, options))

    run.__name__ = bound.__name__.lstrip("_")
    run.__doc__ = bound.__doc__
    return run


mirsky_upper = _public(_mirsky_upper)
lambda1_bounds = _public(_lambda1_bounds)
lambda1_harary_lower = _public(_lambda1_harary_lower)
spread_lower_harary = _public(_spread_lower_harary)
spread_lower_frobenius = _public(_spread_lower_frobenius)
spread_upper_lambda1 = _public(_spread_upper_lambda1)
spread_sandwich_transmission = _public(_spread_sandwich_transmission)
regular_spread_identity = _public(_regular_spread_identity)
spread_upper_diam2 = _public(_spread_upper_diam2)
spread_upper_diam3 = _public(_spread_upper_diam3)
spread_lower_bipartite = _public(_spread_lower_bipartite)
spread_lower_clique = _public(_spread_lower_clique)


def eigen_shift_bounds(
    graph: Graph, alpha: float | AlphaParam, k: int, *, options: BoundOptions | None = None
) -> BoundReport:
    return _eigen_shift_bounds(SpectralContext(graph, alpha, options), k)


_LEADING: tuple[tuple[str, BoundKind, Callable[[SpectralContext], BoundReport]], ...] = (
    ("mirsky-upper", BoundKind.UPPER, _mirsky_upper),
    ("lambda1-bounds", BoundKind.SANDWICH, _lambda1_bounds),
    ("lambda1-harary-lower", BoundKind.LOWER, _lambda1_harary_lower),
    ("spread-lower-harary", BoundKind.LOWER, _spread_lower_harary),
    ("spread-lower-frobenius", BoundKind.LOWER, _spread_lower_frobenius),
    ("spread-upper-lambda1", BoundKind.UPPER, _spread_upper_lambda1),
)

_TRAILING: tuple[tuple[str, BoundKind, Callable[[SpectralContext], BoundReport]], ...] = (
    ("spread-sandwich", BoundKind.SANDWICH, _spread_sandwich_transmission),
    ("regular-spread-identity", BoundKind.SANDWICH, _regular_spread_identity),
    ("spread-upper-diam2", BoundKind.UPPER, _spread_upper_diam2),
    ("spread-upper-diam3", BoundKind.UPPER, _spread_upper_diam3),
    ("spread-lower-bipartite", BoundKind.LOWER, _spread_lower_bipartite),
    ("spread-lower-clique", BoundKind.LOWER, _spread_lower_clique),
)


def _attempt(
    ctx: SpectralContext,
    name: str,
    kind: BoundKind,
    bound: Callable[[SpectralContext], BoundReport],
) -> BoundReport:
    try:
        return bound(ctx)
    except DomainError as exc:
        logger.debug("bound %s skipped: %s", name, exc)
        return BoundReport(name=name, kind=kind, observed=None, holds=True, skip_reason=str(exc))


def check_all(
    graph: Graph, alpha: float | AlphaParam, *, options: BoundOptions | None = None
) -> list[BoundReport]:
    """
    Every bound in a fixed order; bounds whose preconditions fail come back as skip records.
    Raises ConnectivityError for disconnected input.
    """
    ctx = SpectralContext(graph, alpha, options)
    _ = ctx.dist  # disconnected input raises here instead of producing skip records

    reports = [_attempt(ctx, name, kind, bound) for name, kind, bound in _LEADING]
    for k in range(1, max(graph.n, 1) + 1):
        reports.append(
            _attempt(
                ctx,
                f"eigen-shift-k{k}",
                BoundKind.SANDWICH,
                lambda c, k=k: _eigen_shift_bounds(c, k),
            )
        )
    reports += [_attempt(ctx, name, kind, bound) for name, kind, bound in _TRAILING]
    return reports

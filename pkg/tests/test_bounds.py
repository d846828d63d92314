import math

import pytest

from services import bounds, graph_core
from services.linalg import interlaces
from services.spectral_types import (
    BoundKind,
    ConnectivityError,
    DomainError,
    Graph,
    Spectrum,
)

P4_SPREAD = (8 + math.sqrt(85) + math.sqrt(13)) / 6
SOUNDNESS_ALPHAS = (0.0, 0.25, 0.5, 0.75, 0.9)


def _by_name(reports):
    return {report.name: report for report in reports}


def _quotient_pair(entries) -> Spectrum:
    b11, b12, b21, b22 = entries
    trace, det = b11 + b22, b11 * b22 - b12 * b21
    root = math.sqrt(max(trace * trace - 4 * det, 0.0))
    return Spectrum.from_values([(trace + root) / 2, (trace - root) / 2])


# =========
# Spread and lambda_1 bounds
# =========


def test_mirsky_upper_path(p3):
    report = bounds.mirsky_upper(p3, 0.0)
    assert report.kind is BoundKind.UPPER
    assert report.bound_hi == pytest.approx(3.0)
    assert report.observed == pytest.approx(math.sqrt(8.25))
    assert report.holds
    assert not report.equality
    assert report.context["equality_interpretation"] == "evaluated on RD_alpha"


@pytest.mark.parametrize("n", range(3, 8))
@pytest.mark.parametrize("alpha", [0.0, 0.4, 0.8])
def test_mirsky_upper_complete(n, alpha):
    report = bounds.mirsky_upper(graph_core.complete(n), alpha)
    assert report.bound_hi == pytest.approx((1 - alpha) * math.sqrt(2 * n * (n - 1)))
    assert report.observed == pytest.approx(n * (1 - alpha))
    assert report.holds


def test_mirsky_upper_needs_three_vertices():
    with pytest.raises(DomainError):
        bounds.mirsky_upper(graph_core.complete(2), 0.0)


def test_mirsky_upper_at_zero_ignores_transmissions():
    for graph in graph_core.connected_corpus(6):
        if graph.n < 3:
            continue
        ctx = bounds.SpectralContext(graph, 0.0)
        report = bounds.mirsky_upper(graph, 0.0)
        assert report.bound_hi == pytest.approx(math.sqrt(2 * ctx.frobenius_sq))


def test_lambda1_bounds_path(p3):
    report = bounds.lambda1_bounds(p3, 0.0)
    assert report.bound_lo == pytest.approx(1.6833, abs=1e-4)
    assert report.observed == pytest.approx(1.68614, abs=1e-5)
    assert report.bound_hi == pytest.approx(math.sqrt(3), abs=1e-9)
    assert report.holds
    assert report.context["stated_condition"] is False


def test_lambda1_bounds_cycle(c4):
    report = bounds.lambda1_bounds(c4, 0.0)
    assert report.bound_lo == pytest.approx(2.5)
    assert report.bound_hi == pytest.approx(2.5)
    assert report.equality
    assert report.context["stated_condition"] is True


def test_lambda1_harary_lower(p3, c4):
    path_report = bounds.lambda1_harary_lower(p3, 0.0)
    assert path_report.bound_lo == pytest.approx(5 / 3)
    assert path_report.holds
    assert not path_report.equality
    cycle_report = bounds.lambda1_harary_lower(c4, 0.6)
    assert cycle_report.bound_lo == pytest.approx(2.5)
    assert cycle_report.equality


def test_spread_lower_harary(p3):
    k4 = bounds.spread_lower_harary(graph_core.complete(4), 0.5)
    assert k4.bound_lo == pytest.approx(2.0)
    assert k4.observed == pytest.approx(2.0)
    assert k4.equality
    path_report = bounds.spread_lower_harary(p3, 0.0)
    assert path_report.bound_lo == pytest.approx(2.5)
    assert path_report.holds
    with pytest.raises(DomainError):
        bounds.spread_lower_harary(p3, 1.0)


def test_spread_lower_frobenius_complete_three():
    report = bounds.spread_lower_frobenius(graph_core.complete(3), 0.5)
    assert report.context["frobenius_sq"] == pytest.approx(4.5)
    assert report.bound_lo == pytest.approx(1.5)
    assert report.observed == pytest.approx(1.5)
    assert report.equality


def test_spread_lower_frobenius_path(p3):
    report = bounds.spread_lower_frobenius(p3, 0.5)
    assert report.context["frobenius_sq"] == pytest.approx(3.25)
    assert report.context["x_choice"] == "rms_transmission"
    assert report.context["x_value"] == pytest.approx(1.6833, abs=1e-4)
    assert report.bound_lo == pytest.approx(1.2269, abs=1e-4)
    assert report.observed == pytest.approx(math.sqrt(2))
    assert report.holds


@pytest.mark.parametrize("alpha", [0.4, 1.0])
def test_spread_lower_frobenius_alpha_range(p3, alpha):
    with pytest.raises(DomainError):
        bounds.spread_lower_frobenius(p3, alpha)


def test_spread_upper_lambda1(p3):
    report = bounds.spread_upper_lambda1(p3, 0.5)
    assert report.bound_hi == pytest.approx(1 + math.sqrt(0.5))
    assert report.observed == pytest.approx(math.sqrt(2))
    assert report.holds
    with pytest.raises(DomainError):
        bounds.spread_upper_lambda1(p3, 0.4)


def test_eigen_shift_bounds_star():
    star = graph_core.complete_bipartite(1, 3)
    report = bounds.eigen_shift_bounds(star, 0.5, 1)
    rd_top = bounds.SpectralContext(star, 0.0).spectrum.largest
    assert report.bound_lo == pytest.approx(1.0 + 0.5 * rd_top)
    assert report.bound_hi == pytest.approx(1.5 + 0.5 * rd_top)
    assert report.holds
    assert report.context["k"] == 1


def test_eigen_shift_bounds_alpha_zero(p4):
    for k in range(1, 5):
        assert bounds.eigen_shift_bounds(p4, 0.0, k).equality


@pytest.mark.parametrize("k", [0, 5])
def test_eigen_shift_bounds_index_range(p4, k):
    with pytest.raises(DomainError):
        bounds.eigen_shift_bounds(p4, 0.5, k)


def test_spread_sandwich(p3, c4):
    report = bounds.spread_sandwich_transmission(p3, 0.5)
    assert report.bound_lo == pytest.approx(1.18614, abs=1e-5)
    assert report.bound_hi == pytest.approx(1.68614, abs=1e-5)
    assert report.observed == pytest.approx(math.sqrt(2))
    assert report.holds
    for alpha in (0.0, 0.3, 0.9):
        cycle_report = bounds.spread_sandwich_transmission(c4, alpha)
        assert cycle_report.bound_lo == pytest.approx(4 * (1 - alpha))
        assert cycle_report.observed == pytest.approx(4 * (1 - alpha))
        assert cycle_report.equality


def test_regular_spread_identity(p3, c4):
    report = bounds.regular_spread_identity(c4, 0.25)
    assert report.bound_lo == report.bound_hi == pytest.approx(3.0)
    assert report.equality
    with pytest.raises(DomainError):
        bounds.regular_spread_identity(p3, 0.25)


def test_spread_upper_diam2(c4):
    at_zero = bounds.spread_upper_diam2(c4, 0.0)
    assert at_zero.bound_hi == pytest.approx(5.0)
    assert at_zero.observed == pytest.approx(4.0)
    at_half = bounds.spread_upper_diam2(c4, 0.5)
    assert at_half.bound_hi == pytest.approx(2.5)
    assert at_half.observed == pytest.approx(2.0)
    assert at_half.holds
    assert not at_half.equality
    assert at_half.context["stated_condition"] is True


def test_spread_upper_diam2_star():
    assert bounds.spread_upper_diam2(graph_core.complete_bipartite(1, 3), 0.0).holds


@pytest.mark.parametrize("graph", [graph_core.complete(4), graph_core.path(4)])
def test_spread_upper_diam2_needs_diameter_two(graph):
    with pytest.raises(DomainError):
        bounds.spread_upper_diam2(graph, 0.0)


def test_spread_upper_diam3(p4, c4):
    at_zero = bounds.spread_upper_diam3(p4, 0.0)
    assert at_zero.bound_hi == pytest.approx(2 + (1 + math.sqrt(5)) / 2 + 1 / 3)
    assert at_zero.bound_hi == pytest.approx(3.9514, abs=1e-4)
    assert at_zero.observed == pytest.approx(P4_SPREAD)
    assert at_zero.context["mstar_spread"] == pytest.approx(1 / 3)

    at_one = bounds.spread_upper_diam3(p4, 1.0)
    assert at_one.observed == pytest.approx(2 / 3)
    assert at_one.bound_hi == pytest.approx(2 / 3)
    assert at_one.holds
    assert at_one.equality

    assert bounds.spread_upper_diam3(graph_core.path(5), 0.0).holds
    with pytest.raises(DomainError):
        bounds.spread_upper_diam3(c4, 0.0)


# =========
# Quotient bounds
# =========


def test_spread_lower_bipartite_path(p4):
    report = bounds.spread_lower_bipartite(p4, 0.0)
    assert report.context["quotient_entries"] == pytest.approx([5 / 3, 11 / 18, 11 / 6, 0.0])
    assert report.bound_lo == pytest.approx(math.sqrt(196 / 27))
    assert report.observed == pytest.approx(P4_SPREAD)
    assert report.holds
    assert report.context["vertex"] == 1
    assert report.context["max_degree"] == 2
    assert report.context["quotient_discrepancy"] <= 1e-9
    assert report.context["harary_reading"] == "H(G)"


def test_spread_lower_bipartite_other_cases(p4, c4):
    assert bounds.spread_lower_bipartite(p4, 1.0).holds
    assert bounds.spread_lower_bipartite(c4, 0.0).holds


@pytest.mark.parametrize(
    "graph",
    [graph_core.cycle(5), graph_core.complete_bipartite(1, 3), graph_core.complete(2)],
)
def test_spread_lower_bipartite_preconditions(graph):
    with pytest.raises(DomainError):
        bounds.spread_lower_bipartite(graph, 0.0)


def test_spread_lower_clique_path(p3):
    report = bounds.spread_lower_clique(p3, 0.0)
    assert report.context["quotient_entries"] == pytest.approx([1.0, 0.75, 1.5, 0.0])
    assert report.bound_lo == pytest.approx(math.sqrt(5.5))
    assert report.observed == pytest.approx(math.sqrt(8.25))
    assert report.context["clique_number"] == 2
    assert report.context["quotient_discrepancy"] <= 1e-9


def test_spread_lower_clique_relabelling(p3):
    centred_at_zero = Graph.from_edges(3, [(0, 1), (0, 2)])
    for alpha in (0.0, 0.3, 0.9):
        first = bounds.spread_lower_clique(p3, alpha)
        second = bounds.spread_lower_clique(centred_at_zero, alpha)
        assert first.bound_lo == pytest.approx(second.bound_lo)


def test_spread_lower_clique_diamond():
    diamond = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    report = bounds.spread_lower_clique(diamond, 0.0)
    assert report.context["clique_number"] == 3
    assert report.holds


def test_spread_lower_clique_complete_graph():
    with pytest.raises(DomainError):
        bounds.spread_lower_clique(graph_core.complete(4), 0.0)


# =========
# check_all
# =========


def _expected_names(n):
    return [
        "mirsky-upper",
        "lambda1-bounds",
        "lambda1-harary-lower",
        "spread-lower-harary",
        "spread-lower-frobenius",
        "spread-upper-lambda1",
        *(f"eigen-shift-k{k}" for k in range(1, n + 1)),
        "spread-sandwich",
        "regular-spread-identity",
        "spread-upper-diam2",
        "spread-upper-diam3",
        "spread-lower-bipartite",
        "spread-lower-clique",
    ]


def test_check_all_complete_five():
    reports = bounds.check_all(graph_core.complete(5), 0.5)
    assert [report.name for report in reports] == _expected_names(5)
    skipped = {report.name for report in reports if report.skipped}
    assert skipped == {
        "spread-upper-diam2",
        "spread-upper-diam3",
        "spread-lower-bipartite",
        "spread-lower-clique",
    }
    assert all(report.holds for report in reports)
    assert _by_name(reports)["spread-lower-harary"].equality


def test_check_all_path(p4):
    reports = bounds.check_all(p4, 0.0)
    assert [report.name for report in reports] == _expected_names(4)
    skipped = {report.name for report in reports if report.skipped}
    assert skipped == {
        "spread-lower-frobenius",
        "spread-upper-lambda1",
        "regular-spread-identity",
        "spread-upper-diam2",
    }
    assert all(report.holds for report in reports)
    assert _by_name(reports)["spread-upper-diam2"].skip_reason.endswith("diameter 3")


def test_check_all_cycle(c4):
    reports = _by_name(bounds.check_all(c4, 0.9))
    evaluated = {name: report for name, report in reports.items() if name != "spread-upper-diam3"}
    assert not any(report.skipped for report in evaluated.values())
    assert reports["spread-upper-diam3"].skipped
    assert all(report.holds for report in reports.values())
    for name in ("lambda1-bounds", "lambda1-harary-lower", "spread-sandwich"):
        assert reports[name].equality
    assert reports["regular-spread-identity"].equality


def test_check_all_disconnected():
    with pytest.raises(ConnectivityError):
        bounds.check_all(Graph.from_edges(4, [(0, 1), (2, 3)]), 0.0)


# =========
# Properties
# =========


@pytest.mark.parametrize("seed", range(200))
def test_bounds_hold_on_random_graphs(seed):
    graph = graph_core.random_connected(3 + seed % 10, (0.3, 0.5, 0.8)[seed % 3], seed)
    for alpha in SOUNDNESS_ALPHAS:
        for report in bounds.check_all(graph, alpha):
            assert report.holds, (report.name, alpha, report)
            if not report.skipped:
                assert report.slack >= -1e-8 * max(1.0, abs(report.observed))


@pytest.mark.parametrize("n", range(3, 9))
def test_complete_graphs_attain_spread_lower_bounds(n):
    graph = graph_core.complete(n)
    for alpha in (0.0, 0.5, 0.8):
        assert bounds.spread_lower_harary(graph, alpha).equality
    for alpha in (0.5, 0.75):
        assert bounds.spread_lower_frobenius(graph, alpha).equality


def test_non_complete_graphs_are_strictly_inside():
    for graph in graph_core.connected_corpus(7):
        if graph.n < 2 or graph.is_complete():
            continue
        for alpha in (0.0, 0.5):
            assert not bounds.spread_lower_harary(graph, alpha).equality
        assert not bounds.spread_lower_frobenius(graph, 0.5).equality


@pytest.mark.parametrize(
    "graph",
    [graph_core.cycle(n) for n in range(3, 13)]
    + [graph_core.complete_bipartite(a, a) for a in range(1, 7)],
)
def test_transmission_regular_graphs_certify_equality(graph):
    for alpha in (0.3, 0.7):
        assert bounds.lambda1_bounds(graph, alpha).equality
        assert bounds.lambda1_harary_lower(graph, alpha).equality
        assert bounds.spread_sandwich_transmission(graph, alpha).equality
        for k in range(1, graph.n + 1):
            assert bounds.eigen_shift_bounds(graph, alpha, k).equality


@pytest.mark.parametrize("seed", range(30))
def test_quotient_pairs_interlace(seed):
    graph = graph_core.random_connected(4 + seed % 8, 0.5, seed)
    alpha = (0.0, 0.25, 0.5, 0.75, 0.9)[seed % 5]
    ctx = bounds.SpectralContext(graph, alpha)
    for report in bounds.check_all(graph, alpha):
        if report.skipped or "quotient_entries" not in report.context:
            continue
        assert interlaces(_quotient_pair(report.context["quotient_entries"]), ctx.spectrum)
        assert report.context["quotient_discrepancy"] <= 1e-9

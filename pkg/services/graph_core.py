from __future__ import annotations

import logging
import random
from collections.abc import Callable
from functools import lru_cache
from typing import Any

import networkx as nx
import numpy as np

from services.spectral_types import (
    ConnectivityError,
    DistanceMatrix,
    DomainError,
    Graph,
    GraphFamily,
    GraphFormat,
    ParseError,
    ValidationError,
)

logger = logging.getLogger(__name__)

GRAPH6_PREFIX = b">>graph6<<"
# Largest order the 4-byte graph6 header can carry.
GRAPH6_MAX_N = 258047
# Largest order in the networkx graph atlas.
ATLAS_MAX_N = 7

DEFAULT_CLIQUE_LIMIT = 64
DEFAULT_CONNECT_ATTEMPTS = 1000


# =========
# Ingestion
# =========


def _graph6_order(body: bytes, base: int) -> tuple[int, int]:
    """Return (n, header length) from a graph6 body without the optional prefix."""
    if not body:
        raise ParseError("empty graph6 input", offset=base)
    if body[0] != 126:
        return body[0] - 63, 1
    if len(body) < 4:
        raise ParseError("truncated graph6 extended header", offset=base + len(body))
    if body[1] == 126:
        raise ParseError(f"graph6 orders above {GRAPH6_MAX_N} are not supported", offset=base + 1)
    n = ((body[1] - 63) << 12) | ((body[2] - 63) << 6) | (body[3] - 63)
    return n, 4


def _parse_graph6(text: str) -> Graph:
    stripped = text.strip()
    try:
        data = stripped.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ParseError(f"non-ASCII character {stripped[exc.start]!r}", offset=exc.start) from exc

    base = len(GRAPH6_PREFIX) if data.startswith(GRAPH6_PREFIX) else 0
    body = data[base:]
    for offset, byte in enumerate(body):
        if not 63 <= byte <= 126:
            raise ParseError(f"invalid graph6 byte {chr(byte)!r}", offset=base + offset)

    n, header = _graph6_order(body, base)
    if n < 1:
        raise ValidationError("graph6 input encodes an empty graph (n=0)")
    expected = (n * (n - 1) // 2 + 5) // 6
    found = len(body) - header
    if found != expected:
        raise ParseError(
            f"graph6 header announces n={n} needing {expected} data bytes, found {found}",
            offset=base + header + min(found, expected),
        )

    g = nx.from_graph6_bytes(body)
    return Graph.from_edges(n, g.edges())


def _parse_edgelist(text: str, n: int | None) -> Graph:
    edges: list[tuple[int, int]] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        line_offset = offset
        offset += len(line.encode("utf-8"))
        content = line.split("#", 1)[0]
        tokens = content.split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise ParseError(
                f"edge line must hold exactly two vertices, got {len(tokens)} tokens",
                offset=line_offset,
            )
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise ParseError(
                f"non-integer vertex in {content.strip()!r}", offset=line_offset
            ) from exc
        if u < 0 or v < 0:
            raise ValidationError(
                f"negative vertex in edge ({u}, {v}) at byte offset {line_offset}"
            )
        if n is not None and (u >= n or v >= n):
            raise ValidationError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        edges.append((u, v))

    if n is None:
        if not edges:
            raise ValidationError("edge list defines no vertices; pass n explicitly")
        n = 1 + max(max(u, v) for u, v in edges)
    return Graph.from_edges(n, edges)


def parse_graph(text: str, fmt: GraphFormat | str, *, n: int | None = None) -> Graph:
    """
    Parse graph6 or edge-list text.
    Edge lists are "u v" lines with 0-based vertices; blank lines and "#" comments are ignored.
    Returns: Graph with exactly the encoded vertices and edges.
    """
    try:
        fmt = GraphFormat(fmt)
    except ValueError as exc:
        raise DomainError(f"unknown graph format {fmt!r}") from exc
    if fmt is GraphFormat.GRAPH6:
        return _parse_graph6(text)
    return _parse_edgelist(text, n)


# =========
# Generators
# =========


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def complete(n: int) -> Graph:
    _require(n >= 1, f"complete graph needs n >= 1, got {n}")
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite(a: int, b: int) -> Graph:
    _require(a >= 1 and b >= 1, f"complete bipartite graph needs a, b >= 1, got ({a}, {b})")
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def path(n: int) -> Graph:
    _require(n >= 1, f"path needs n >= 1, got {n}")
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    _require(n >= 3, f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def double_star(m: int, n: int) -> Graph:
    """Roots u=0 and v=1; u's leaves are 2..m+1, v's leaves are m+2..m+n+1."""
    _require(m >= 1 and n >= 1, f"double star needs m, n >= 1, got ({m}, {n})")
    edges = [(0, 1)]
    edges += [(0, 2 + i) for i in range(m)]
    edges += [(1, 2 + m + j) for j in range(n)]
    return Graph.from_edges(m + n + 2, edges)


def random_connected(
    n: int, p: float, seed: int, *, max_attempts: int = DEFAULT_CONNECT_ATTEMPTS
) -> Graph:
    """
    Seeded Erdos-Renyi G(n, p) draws, rejected until connected.
    The stream is random.Random(seed) (MT19937); each attempt draws one uniform per
    vertex pair in lexicographic order, continuing the same stream across attempts.
    """
    _require(n >= 1, f"random graph needs n >= 1, got {n}")
    _require(0.0 < p <= 1.0, f"edge probability must lie in (0, 1], got {p}")
    _require(seed >= 0, f"seed must be non-negative, got {seed}")
    rng = random.Random(seed)
    for attempt in range(1, max_attempts + 1):
        g = nx.gnp_random_graph(n, p, seed=rng)
        if nx.is_connected(g):
            logger.debug(
                "random_connected n=%s p=%s seed=%s accepted on attempt %s", n, p, seed, attempt
            )
            return Graph.from_edges(n, g.edges())
    raise DomainError(
        f"no connected G({n}, {p}) draw within {max_attempts} attempts for seed {seed}"
    )


_GENERATORS: dict[GraphFamily, tuple[Callable[..., Graph], tuple[str, ...]]] = {
    GraphFamily.COMPLETE: (complete, ("n",)),
    GraphFamily.COMPLETE_BIPARTITE: (complete_bipartite, ("a", "b")),
    GraphFamily.PATH: (path, ("n",)),
    GraphFamily.CYCLE: (cycle, ("n",)),
    GraphFamily.DOUBLE_STAR: (double_star, ("m", "n")),
    GraphFamily.RANDOM_CONNECTED: (random_connected, ("n", "p", "seed")),
}


def generate(
    family: GraphFamily | str, *, max_attempts: int = DEFAULT_CONNECT_ATTEMPTS, **params: Any
) -> Graph:
    """Build a named family member, e.g. generate("double_star", m=2, n=3)."""
    try:
        family = GraphFamily(family)
    except ValueError as exc:
        raise DomainError(f"unknown graph family {family!r}") from exc
    builder, names = _GENERATORS[family]
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise DomainError(f"family {family.value} requires parameters {', '.join(missing)}")
    args = [params[name] for name in names]
    if family is GraphFamily.RANDOM_CONNECTED:
        return random_connected(*args, max_attempts=max_attempts)
    return builder(*args)


@lru_cache(maxsize=None)
def connected_corpus(max_n: int = ATLAS_MAX_N) -> tuple[Graph, ...]:
    """Every connected graph with 1 <= n <= max_n, one per isomorphism class, atlas order."""
    _require(1 <= max_n <= ATLAS_MAX_N, f"corpus order must lie in [1, {ATLAS_MAX_N}], got {max_n}")
    corpus = []
    for g in nx.graph_atlas_g():
        order = g.number_of_nodes()
        if 1 <= order <= max_n and nx.is_connected(g):
            corpus.append(Graph.from_edges(order, g.edges()))
    return tuple(corpus)


# =========
# Queries
# =========


def complement(graph: Graph) -> Graph:
    n = graph.n
    pairs = {(u, v) for u in range(n) for v in range(u + 1, n)}
    return Graph(n=n, edges=frozenset(pairs - graph.edges))


def is_connected(graph: Graph) -> bool:
    return nx.is_connected(graph.to_networkx())


def apsp(graph: Graph) -> DistanceMatrix:
    """BFS from every vertex. Raises ConnectivityError naming two unreachable vertices."""
    n = graph.n
    d = np.full((n, n), -1, dtype=int)
    for source, lengths in nx.all_pairs_shortest_path_length(graph.to_networkx()):
        for target, length in lengths.items():
            d[source, target] = length
    unreachable = np.argwhere(d < 0)
    if unreachable.size:
        u, v = (int(x) for x in unreachable[0])
        raise ConnectivityError(f"graph is disconnected: no path between {u} and {v}", u=u, v=v)
    return DistanceMatrix(n=n, d=d)


def diameter(dist: DistanceMatrix) -> int:
    return int(dist.d.max(initial=0))


def bipartition(graph: Graph) -> tuple[frozenset[int], frozenset[int]] | None:
    """BFS 2-colouring; the class holding vertex 0 comes first. None when an odd cycle exists."""
    try:
        colors = nx.bipartite.color(graph.to_networkx())
    except nx.NetworkXError:
        return None
    first = frozenset(v for v, c in colors.items() if c == colors[0])
    return first, frozenset(range(graph.n)) - first


def maximum_cliques(
    graph: Graph, *, limit: int = DEFAULT_CLIQUE_LIMIT
) -> tuple[int, list[tuple[int, ...]]]:
    """
    All cliques of maximum size omega via Bron-Kerbosch with pivoting.
    Worst case is exponential in n, so graphs above `limit` vertices are refused.
    Returns: (omega, sorted list of sorted vertex tuples).
    """
    if graph.n > limit:
        raise DomainError(f"clique enumeration is capped at {limit} vertices, graph has {graph.n}")
    maximal = [tuple(sorted(c)) for c in nx.find_cliques(graph.to_networkx())]
    omega = max(len(c) for c in maximal)
    return omega, sorted(c for c in maximal if len(c) == omega)


def max_degree_vertices(graph: Graph) -> tuple[int, tuple[int, ...]]:
    degrees = graph.degrees()
    top = max(degrees)
    return top, tuple(v for v, deg in enumerate(degrees) if deg == top)

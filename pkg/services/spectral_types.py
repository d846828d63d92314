from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import networkx as nx
import numpy as np

# =========
# Domain Types
# =========


class GraphFormat(str, Enum):
    GRAPH6 = "graph6"
    EDGELIST = "edgelist"


class GraphFamily(str, Enum):
    COMPLETE = "complete"
    COMPLETE_BIPARTITE = "complete_bipartite"
    PATH = "path"
    CYCLE = "cycle"
    DOUBLE_STAR = "double_star"
    RANDOM_CONNECTED = "random_connected"


class BoundKind(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    SANDWICH = "sandwich"


class DoubleStarPairing(str, Enum):
    # default
    DERIVED = "derived"
    # diagnostics only
    PRINTED = "printed"


def _frozen(obj: object, name: str, dtype: type = float) -> None:
    array = np.array(getattr(obj, name), dtype=dtype)
    array.setflags(write=False)
    object.__setattr__(obj, name, array)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"graph needs at least one vertex, got n={self.n}")
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u > v:
                raise ValidationError(f"edge ({u}, {v}) is not stored as (min, max)")

    @classmethod
    def from_edges(cls, n: int, edges: Any) -> Graph:
        """Build from any iterable of vertex pairs; rejects loops and repeated pairs."""
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n=n, edges=frozenset(seen))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=float)
        for u, v in self.edges:
            adj[u, v] = 1.0
            adj[v, u] = 1.0
        return adj

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def neighbors(self, vertex: int) -> tuple[int, ...]:
        if not 0 <= vertex < self.n:
            raise ValidationError(f"vertex {vertex} outside [0, {self.n})")
        out = [v if u == vertex else u for u, v in self.edges if vertex in (u, v)]
        return tuple(sorted(out))

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edge_list())
        return g


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """All-pairs hop distances of a connected graph."""

    n: int
    d: np.ndarray

    def __post_init__(self) -> None:
        _frozen(self, "d", int)
        if self.d.shape != (self.n, self.n):
            raise ValidationError(f"distance matrix shape {self.d.shape} does not match n={self.n}")
        if np.any(np.diag(self.d) != 0):
            raise ValidationError("distance matrix diagonal must be zero")
        if not np.array_equal(self.d, self.d.T):
            raise ValidationError("distance matrix is not symmetric")


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense real symmetric matrix; the upper triangle is the canonical copy."""

    a: np.ndarray

    def __post_init__(self) -> None:
        _frozen(self, "a")
        if self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {self.a.shape}")
        if not np.array_equal(self.a, self.a.T, equal_nan=True):
            raise ValidationError("matrix is not exactly symmetric; use SymmetricMatrix.from_array")

    @classmethod
    def from_array(cls, values: Any, *, atol: float = 1e-12) -> SymmetricMatrix:
        array = np.array(values, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {array.shape}")
        if np.all(np.isfinite(array)):
            scale = max(1.0, float(np.max(np.abs(array), initial=0.0)))
            if not np.allclose(array, array.T, rtol=0.0, atol=atol * scale):
                raise ValidationError("matrix is not symmetric")
        upper = np.triu(array)
        return cls(a=upper + np.triu(array, 1).T)

    @property
    def n(self) -> int:
        return int(self.a.shape[0])

    def trace(self) -> float:
        return float(np.trace(self.a))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending; `tol` groups values into multiplicity classes."""

    values: tuple[float, ...]
    tol: float = 1e-8
    vectors: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if any(a < b for a, b in zip(self.values, self.values[1:], strict=False)):
            raise ValidationError("spectrum values must be sorted descending")
        if self.vectors is not None:
            _frozen(self, "vectors")

    @classmethod
    def from_values(cls, values: Any, *, tol: float = 1e-8) -> Spectrum:
        ordered = sorted((float(v) for v in values), reverse=True)
        return cls(values=tuple(ordered), tol=tol)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    @property
    def largest(self) -> float:
        return self.values[0]

    @property
    def smallest(self) -> float:
        return self.values[-1]

    @property
    def spread(self) -> float:
        if not self.values:
            raise DomainError("spread of an empty spectrum")
        return self.values[0] - self.values[-1]

    def distinct(self) -> list[tuple[float, int]]:
        """Group values whose neighbours differ by at most tol·max(1, |value|)."""
        groups: list[list[float]] = []
        for value in self.values:
            if groups and groups[-1][-1] - value <= self.tol * max(1.0, abs(value)):
                groups[-1].append(value)
            else:
                groups.append([value])
        return [(sum(group) / len(group), len(group)) for group in groups]


@dataclass(frozen=True)
class AlphaParam:
    value: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.value <= 1.0):
            raise DomainError(f"alpha must lie in [0, 1], got {self.value}")

    def __float__(self) -> float:
        return float(self.value)


def as_alpha(alpha: float | AlphaParam) -> AlphaParam:
    if isinstance(alpha, AlphaParam):
        return alpha
    return AlphaParam(float(alpha))


@dataclass(frozen=True)
class TransmissionProfile:
    rtr: tuple[float, ...]
    harary: float
    rtr_max: float
    rtr_min: float
    is_regular: bool

    @property
    def n(self) -> int:
        return len(self.rtr)


@dataclass(frozen=True, eq=False)
class QuotientMatrix:
    """Block-averaged matrix of a partition plus its (real) eigenvalues."""

    b: np.ndarray
    spectrum: Spectrum
    # 1/2 (tr ± sqrt(tr^2 - 4 det)) for two-cell partitions, + root first
    closed_form: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        _frozen(self, "b")


@dataclass(frozen=True, eq=False)
class BlockForm:
    """E bordered by z copies of gamma, F on the diagonal blocks and Q between copies."""

    e: np.ndarray
    gamma: np.ndarray
    f: np.ndarray
    q: np.ndarray
    z: int

    def __post_init__(self) -> None:
        for name in ("e", "gamma", "f", "q"):
            _frozen(self, name)
        t, s = self.gamma.shape if self.gamma.ndim == 2 else (-1, -1)
        if self.e.shape != (t, t):
            raise DomainError(f"E has shape {self.e.shape}, expected ({t}, {t}) from gamma")
        if self.f.shape != (s, s) or self.q.shape != (s, s):
            raise DomainError(
                f"F {self.f.shape} and Q {self.q.shape} must both be ({s}, {s}) from gamma"
            )
        if self.z < 1:
            raise DomainError(f"copy count z must be >= 1, got {self.z}")
        for name, block in (("E", self.e), ("F", self.f), ("Q", self.q)):
            if not np.allclose(block, block.T):
                raise DomainError(f"block {name} must be symmetric")

    @property
    def t(self) -> int:
        return int(self.e.shape[0])

    @property
    def s(self) -> int:
        return int(self.f.shape[0])

    @property
    def order(self) -> int:
        return self.z * self.s + self.t


@dataclass(frozen=True)
class BlockDecomposition:
    repeated: tuple[float, ...]
    multiplicity: int
    reduced: SymmetricMatrix


@dataclass(frozen=True)
class DoubleStarDiagnostic:
    m: int
    n: int
    alpha: float
    derived_pairing_dev: float
    printed_pairing_dev: float
    derived_corner_dev: float
    printed_corner_dev: float
    tol: float

    @property
    def printed_pairing_ok(self) -> bool:
        return self.printed_pairing_dev <= self.tol

    @property
    def reconciling_corner(self) -> str:
        if self.derived_corner_dev <= self.tol:
            return "derived"
        if self.printed_corner_dev <= self.tol:
            return "printed"
        return "none"


@dataclass(frozen=True)
class BoundReport:
    name: str
    kind: BoundKind
    observed: float | None
    bound_lo: float | None = None
    bound_hi: float | None = None
    holds: bool = True
    slack: float | None = None
    equality: bool = False
    context: dict[str, Any] = field(default_factory=dict)
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.skip_reason is not None


# =========
# Exceptions (service layer surfaces clear failure reasons)
# =========


class RdSpreadError(Exception):
    """Base error for graph, matrix and bound operations."""


class ParseError(RdSpreadError):
    """Malformed graph6 or edge-list text."""

    def __init__(self, message: str, *, offset: int) -> None:
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ValidationError(RdSpreadError):
    """Structurally invalid input (self-loop, out-of-range endpoint, asymmetric matrix...)."""


class DomainError(RdSpreadError):
    """Parameter or precondition outside the operation's domain."""


class ConnectivityError(RdSpreadError):
    """Graph is disconnected; u and v cannot reach each other."""

    def __init__(self, message: str, *, u: int, v: int) -> None:
        super().__init__(message)
        self.u = u
        self.v = v


class NumericError(RdSpreadError):
    """Non-finite matrix entries."""


class ConvergenceError(NumericError):
    """Eigensolver hit its sweep cap."""

    def __init__(self, message: str, *, sweeps: int) -> None:
        super().__init__(message)
        self.sweeps = sweeps

from __future__ import annotations

import math

import numpy as np

from services.spectral_types import (
    AlphaParam,
    DistanceMatrix,
    DomainError,
    Graph,
    SymmetricMatrix,
    TransmissionProfile,
    ValidationError,
    as_alpha,
)

DEFAULT_REGULAR_TOL = 1e-9


def _require_pair(dist: DistanceMatrix) -> None:
    if dist.n < 2:
        raise DomainError(f"reciprocal distance matrices need n >= 2, got n={dist.n}")


def _require_same_order(graph: Graph, dist: DistanceMatrix) -> None:
    if graph.n != dist.n:
        raise ValidationError(f"graph has {graph.n} vertices but distance matrix has {dist.n}")


def reciprocal_matrix(dist: DistanceMatrix) -> np.ndarray:
    """RD: 1/d off the diagonal, 0 on it."""
    d = dist.d.astype(float)
    return np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)


def transmission_profile(
    dist: DistanceMatrix, *, regular_tol: float = DEFAULT_REGULAR_TOL
) -> TransmissionProfile:
    """
    Reciprocal transmissions RTr(v_i) = sum over j != i of 1/d_ij, and the Harary index.
    Returns: TransmissionProfile with H = (sum of RTr) / 2 over the same compensated sum.
    """
    _require_pair(dist)
    recip = reciprocal_matrix(dist)
    rtr = tuple(math.fsum(row) for row in recip.tolist())
    harary = math.fsum(rtr) / 2.0
    rtr_max, rtr_min = max(rtr), min(rtr)
    return TransmissionProfile(
        rtr=rtr,
        harary=harary,
        rtr_max=rtr_max,
        rtr_min=rtr_min,
        is_regular=rtr_max - rtr_min <= regular_tol * max(1.0, rtr_max),
    )


def neighbor_mean_transmission(graph: Graph, dist: DistanceMatrix, vertex: int) -> float:
    _require_same_order(graph, dist)
    neighbors = graph.neighbors(vertex)
    if not neighbors:
        raise DomainError(f"vertex {vertex} is isolated; neighbour mean is undefined")
    rtr = transmission_profile(dist).rtr
    return math.fsum(rtr[u] for u in neighbors) / len(neighbors)


def rd_alpha_matrix(dist: DistanceMatrix, alpha: float | AlphaParam) -> SymmetricMatrix:
    """alpha·RT + (1-alpha)·RD."""
    a = float(as_alpha(alpha))
    _require_pair(dist)
    profile = transmission_profile(dist)
    matrix = (1.0 - a) * reciprocal_matrix(dist)
    np.fill_diagonal(matrix, [a * r for r in profile.rtr])
    return SymmetricMatrix(a=matrix)


def rq_matrix(dist: DistanceMatrix) -> SymmetricMatrix:
    """Reciprocal distance signless Laplacian RT + RD."""
    _require_pair(dist)
    matrix = reciprocal_matrix(dist)
    np.fill_diagonal(matrix, transmission_profile(dist).rtr)
    return SymmetricMatrix(a=matrix)


def a_alpha_matrix(graph: Graph, alpha: float | AlphaParam) -> SymmetricMatrix:
    """alpha·D + (1-alpha)·A; connectivity not required."""
    a = float(as_alpha(alpha))
    matrix = (1.0 - a) * graph.adjacency_matrix()
    np.fill_diagonal(matrix, [a * deg for deg in graph.degrees()])
    return SymmetricMatrix(a=matrix)


def mstar_matrix(graph: Graph, dist: DistanceMatrix, alpha: float | AlphaParam) -> SymmetricMatrix:
    """
    Correction term for diameter >= 3: off-diagonal (1-alpha)·min{0, 1/d_ij - 1/2},
    diagonal alpha·RTr*(v_i) where RTr* sums 1/d_ij - 1/2 over pairs with d_ij >= 3.
    """
    a = float(as_alpha(alpha))
    _require_pair(dist)
    _require_same_order(graph, dist)
    recip = reciprocal_matrix(dist)
    # d in {1, 2} gives 1/d - 1/2 >= 0, so only d >= 3 survives the min
    correction = np.minimum(0.0, recip - 0.5)
    np.fill_diagonal(correction, 0.0)
    rtr_star = [math.fsum(row) for row in correction.tolist()]
    matrix = (1.0 - a) * correction
    np.fill_diagonal(matrix, [a * r for r in rtr_star])
    return SymmetricMatrix(a=matrix)


def rd_alpha_frobenius_sq(dist: DistanceMatrix, alpha: float | AlphaParam) -> float:
    """alpha^2·sum RTr_i^2 + (1-alpha)^2·sum over i != j of 1/d_ij^2."""
    a = float(as_alpha(alpha))
    profile = transmission_profile(dist)
    recip = reciprocal_matrix(dist)
    diagonal = math.fsum(r * r for r in profile.rtr)
    off_diagonal = math.fsum(float(x) for x in (recip * recip).ravel())
    return a * a * diagonal + (1.0 - a) ** 2 * off_diagonal

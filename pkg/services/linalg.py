from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from functools import lru_cache

import numpy as np

from services.spectral_types import (
    ConvergenceError,
    DomainError,
    NumericError,
    QuotientMatrix,
    Spectrum,
    SymmetricMatrix,
)

logger = logging.getLogger(__name__)

DEFAULT_EIG_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 100
DEFAULT_GROUP_TOL = 1e-8
DEFAULT_CHECK_TOL = 1e-8

EIG_METHODS = ("jacobi", "lapack")

Partition = Sequence[Sequence[int]]


# =========
# Eigensolver
# =========


@lru_cache(maxsize=256)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """
    Circle-method schedule: n-1 rounds (n even) of disjoint index pairs covering every
    pair exactly once. Odd n gets a dummy player whose pairs are dropped.
    """
    size = n + n % 2
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            p_idx = np.array([p for p, _ in pairs], dtype=int)
            q_idx = np.array([q for _, q in pairs], dtype=int)
            rounds.append((p_idx, q_idx))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _off_mass(a: np.ndarray) -> float:
    return math.sqrt(2.0) * float(np.linalg.norm(np.triu(a, 1)))


def _jacobi(a: np.ndarray, *, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    threshold = tol * float(np.linalg.norm(a))
    schedule = _round_robin(n)

    for sweep in range(max_sweeps + 1):
        if _off_mass(a) <= threshold:
            logger.debug("jacobi n=%s converged after %s sweeps", n, sweep)
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p, q in schedule:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = apq != 0.0
            tau = np.divide(aqq - app, 2.0 * apq, out=np.zeros_like(apq), where=active)
            sign = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(active, sign / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            # columns, then rows: A <- J^T A J for the block rotation J
            cols_p, cols_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p, rows_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q

    raise ConvergenceError(
        f"Jacobi did not converge within {max_sweeps} sweeps "
        f"(off-diagonal mass {_off_mass(a):.3e} > {threshold:.3e})",
        sweeps=max_sweeps,
    )


def eig_sym(
    matrix: SymmetricMatrix,
    *,
    tol: float = DEFAULT_EIG_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    method: str = "jacobi",
    vectors: bool = False,
    group_tol: float = DEFAULT_GROUP_TOL,
) -> Spectrum:
    """
    All eigenvalues of a symmetric matrix, descending.
    method="jacobi" runs parallel-ordered cyclic Jacobi until the off-diagonal Frobenius mass
    is at most tol·||A||_F; method="lapack" defers to numpy.linalg.eigh.
    Returns: Spectrum (with eigenvector columns in value order when vectors=True).
    """
    if tol <= 0:
        raise DomainError(f"eigensolver tolerance must be positive, got {tol}")
    if method not in EIG_METHODS:
        raise DomainError(f"unknown eigensolver method {method!r}; expected one of {EIG_METHODS}")
    a = matrix.a
    if not np.all(np.isfinite(a)):
        bad = tuple(int(x) for x in np.argwhere(~np.isfinite(a))[0])
        raise NumericError(f"non-finite matrix entry at {bad}")

    if method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        w, v = _jacobi(a, tol=tol, max_sweeps=max_sweeps)

    order = np.argsort(-w, kind="stable")
    return Spectrum(
        values=tuple(float(x) for x in w[order]),
        tol=group_tol,
        vectors=v[:, order] if vectors else None,
    )


def spread_of(spectrum: Spectrum) -> float:
    return spectrum.spread


def frobenius_norm_sq(matrix: SymmetricMatrix) -> float:
    return math.fsum(float(x) for x in (matrix.a * matrix.a).ravel())


def max_abs_deviation(left: Spectrum | Sequence[float], right: Spectrum | Sequence[float]) -> float:
    """Largest elementwise gap between two spectra after sorting both descending."""
    a = np.sort(np.asarray(tuple(left), dtype=float))[::-1]
    b = np.sort(np.asarray(tuple(right), dtype=float))[::-1]
    if a.shape != b.shape:
        raise DomainError(f"spectra differ in length: {a.size} vs {b.size}")
    return float(np.max(np.abs(a - b), initial=0.0))


def _scaled(tol: float, *values: Sequence[float] | np.ndarray) -> float:
    peak = max((float(np.max(np.abs(v), initial=0.0)) for v in values), default=0.0)
    return tol * max(1.0, peak)


# =========
# Partitions and quotients
# =========


def _indicator(n: int, partition: Partition) -> np.ndarray:
    if not partition:
        raise DomainError("partition has no cells")
    indicator = np.zeros((n, len(partition)))
    seen: set[int] = set()
    for cell_no, cell in enumerate(partition):
        if not cell:
            raise DomainError(f"partition cell {cell_no} is empty")
        for vertex in cell:
            if not 0 <= vertex < n:
                raise DomainError(f"partition vertex {vertex} outside [0, {n})")
            if vertex in seen:
                raise DomainError(f"vertex {vertex} appears in more than one cell")
            seen.add(vertex)
            indicator[vertex, cell_no] = 1.0
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise DomainError(f"partition does not cover vertices {missing}")
    return indicator


def quotient_matrix(
    matrix: SymmetricMatrix,
    partition: Partition,
    *,
    tol: float = DEFAULT_EIG_TOL,
    method: str = "jacobi",
) -> QuotientMatrix:
    """
    B[s][t] = average row sum of the (V_s, V_t) block.
    Eigenvalues come from the similar symmetric matrix D^1/2 B D^-1/2, D = diag(|V_s|).
    """
    indicator = _indicator(matrix.n, partition)
    block_sums = indicator.T @ matrix.a @ indicator
    sizes = indicator.sum(axis=0)
    b = block_sums / sizes[:, None]
    symmetric = block_sums / np.sqrt(np.outer(sizes, sizes))
    spectrum = eig_sym(SymmetricMatrix.from_array(symmetric), tol=tol, method=method)

    closed_form = None
    if b.shape == (2, 2):
        trace = b[0, 0] + b[1, 1]
        det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
        root = math.sqrt(max(trace * trace - 4.0 * det, 0.0))
        closed_form = (0.5 * (trace + root), 0.5 * (trace - root))
    return QuotientMatrix(b=b, spectrum=spectrum, closed_form=closed_form)


def is_equitable(
    matrix: SymmetricMatrix, partition: Partition, *, tol: float = DEFAULT_CHECK_TOL
) -> bool:
    """True when every row of a cell has the same row sum into each cell."""
    indicator = _indicator(matrix.n, partition)
    row_sums = matrix.a @ indicator
    slack = _scaled(tol, row_sums)
    return all(float(np.ptp(row_sums[list(cell)], axis=0).max()) <= slack for cell in partition)


def interlaces(inner: Spectrum, outer: Spectrum, *, tol: float = DEFAULT_CHECK_TOL) -> bool:
    """lambda_i(outer) >= lambda_i(inner) >= lambda_{i+n-m}(outer) for every i, within tol."""
    m, n = len(inner), len(outer)
    if m > n:
        raise DomainError(f"inner spectrum ({m}) longer than outer spectrum ({n})")
    lam_in, lam_out = inner.as_array(), outer.as_array()
    slack = _scaled(tol, lam_in, lam_out)
    upper_ok = np.all(lam_out[:m] + slack >= lam_in)
    lower_ok = np.all(lam_in >= lam_out[n - m :] - slack)
    return bool(upper_ok and lower_ok)


def spectrum_contains(inner: Spectrum, outer: Spectrum, *, tol: float = DEFAULT_CHECK_TOL) -> bool:
    """Multiset containment: each inner value matched to a distinct outer value within tol."""
    unused = list(outer.values)
    for value in inner.values:
        slack = tol * max(1.0, abs(value))
        match = next((i for i, other in enumerate(unused) if abs(other - value) <= slack), None)
        if match is None:
            return False
        unused.pop(match)
    return True


def weyl_check(
    a: SymmetricMatrix,
    b: SymmetricMatrix,
    *,
    tol: float = DEFAULT_CHECK_TOL,
    method: str = "jacobi",
) -> bool:
    """
    Both Weyl families for C = A + B (0-based, descending):
    lambda_{i+j}(C) <= lambda_i(A) + lambda_j(B) when i+j <= n-1, and
    lambda_{i+j-n+1}(C) >= lambda_i(A) + lambda_j(B) when i+j >= n-1.
    """
    if a.n != b.n:
        raise DomainError(f"matrix orders differ: {a.n} vs {b.n}")
    n = a.n
    lam_a = eig_sym(a, method=method).as_array()
    lam_b = eig_sym(b, method=method).as_array()
    lam_c = eig_sym(SymmetricMatrix.from_array(a.a + b.a), method=method).as_array()
    slack = _scaled(tol, lam_a, lam_b, lam_c)

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pair_sum = lam_a[i] + lam_b[j]

    upper_idx = i + j
    upper_mask = upper_idx <= n - 1
    upper_c = lam_c[np.clip(upper_idx, 0, n - 1)]
    upper_ok = np.all(upper_c[upper_mask] <= pair_sum[upper_mask] + slack)

    lower_idx = i + j - (n - 1)
    lower_mask = lower_idx >= 0
    lower_c = lam_c[np.clip(lower_idx, 0, n - 1)]
    lower_ok = np.all(lower_c[lower_mask] >= pair_sum[lower_mask] - slack)
    return bool(upper_ok and lower_ok)

from __future__ import annotations

import logging
import math

import numpy as np

from services.linalg import DEFAULT_EIG_TOL, eig_sym, max_abs_deviation
from services.spectral_types import (
    AlphaParam,
    BlockDecomposition,
    BlockForm,
    DomainError,
    DoubleStarDiagnostic,
    DoubleStarPairing,
    Graph,
    Spectrum,
    SymmetricMatrix,
    as_alpha,
)

logger = logging.getLogger(__name__)

DEFAULT_DIAGNOSTIC_TOL = 1e-8


def _spectrum(values: list[float]) -> Spectrum:
    return Spectrum.from_values(values)


# =========
# Complete and complete bipartite graphs
# =========


def spectrum_complete(n: int, alpha: float | AlphaParam) -> Spectrum:
    """n-1 once and alpha·n - 1 with multiplicity n-1."""
    a = float(as_alpha(alpha))
    if n < 2:
        raise DomainError(f"complete graph spectrum needs n >= 2, got {n}")
    return _spectrum([n - 1.0] + [a * n - 1.0] * (n - 1))


def spectrum_complete_bipartite(a: int, b: int, alpha: float | AlphaParam) -> Spectrum:
    """
    K_{a,b}: (alpha(n+b)-1)/2 with multiplicity a-1, (alpha(n+a)-1)/2 with multiplicity b-1,
    and 1/2((alpha+1/2)n - 1 +- sqrt((alpha-1/2)^2 (a-b)^2 + 4(1-alpha)^2 ab)).
    """
    al = float(as_alpha(alpha))
    if a < 1 or b < 1:
        raise DomainError(f"complete bipartite spectrum needs a, b >= 1, got ({a}, {b})")
    n = a + b
    root = math.sqrt((al - 0.5) ** 2 * (a - b) ** 2 + 4.0 * (1.0 - al) ** 2 * a * b)
    centre = (al + 0.5) * n - 1.0
    values = [0.5 * (centre + root), 0.5 * (centre - root)]
    values += [(al * (n + b) - 1.0) / 2.0] * (a - 1)
    values += [(al * (n + a) - 1.0) / 2.0] * (b - 1)
    return _spectrum(values)


# =========
# Block decomposition
# =========


def assemble_block_form(form: BlockForm) -> SymmetricMatrix:
    """[[E, gamma, ..., gamma], [gamma^T, F, Q, ...], ..., [gamma^T, Q, ..., F]]."""
    z = form.z
    corner = np.kron(np.eye(z), form.f - form.q) + np.kron(np.ones((z, z)), form.q)
    border = np.tile(form.gamma, (1, z))
    return SymmetricMatrix.from_array(np.block([[form.e, border], [border.T, corner]]))


def block_decompose(
    form: BlockForm, *, tol: float = DEFAULT_EIG_TOL, method: str = "jacobi"
) -> BlockDecomposition:
    """
    Split the spectrum of the assembled matrix into sigma(F - Q) repeated z-1 times
    and the spectrum of M' = [[E, sqrt(z)·gamma], [sqrt(z)·gamma^T, F + (z-1)Q]].
    """
    z = form.z
    scaled = math.sqrt(z) * form.gamma
    reduced = SymmetricMatrix.from_array(
        np.block([[form.e, scaled], [scaled.T, form.f + (z - 1) * form.q]])
    )
    if z == 1:
        return BlockDecomposition(repeated=(), multiplicity=0, reduced=reduced)
    repeated = eig_sym(SymmetricMatrix.from_array(form.f - form.q), tol=tol, method=method)
    return BlockDecomposition(repeated=repeated.values, multiplicity=z - 1, reduced=reduced)


def decomposed_spectrum(
    decomposition: BlockDecomposition, *, tol: float = DEFAULT_EIG_TOL, method: str = "jacobi"
) -> Spectrum:
    reduced = eig_sym(decomposition.reduced, tol=tol, method=method)
    repeated = list(decomposition.repeated) * decomposition.multiplicity
    return _spectrum(repeated + list(reduced.values))


# =========
# Double stars
# =========


def _leaf_transmissions(m: int, n: int) -> tuple[float, float]:
    """(RTr of a leaf of u, RTr of a leaf of v)."""
    return 0.5 * m + n / 3.0 + 1.0, 0.5 * n + m / 3.0 + 1.0


def _require_double_star(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise DomainError(f"double star needs m, n >= 1, got ({m}, {n})")


def double_star_u_matrix(m: int, n: int, alpha: float | AlphaParam) -> SymmetricMatrix:
    """
    4x4 symmetrized quotient over (u, v, leaves of v, leaves of u); u carries the m leaves.
    """
    _require_double_star(m, n)
    a = float(as_alpha(alpha))
    b = 1.0 - a
    rtr_x, rtr_y = _leaf_transmissions(m, n)
    l1 = a * rtr_y + 0.5 * b * (n - 1)
    l2 = a * rtr_x + 0.5 * b * (m - 1)
    u_matrix = [
        [a * (m + 0.5 * n + 1.0), b, 0.5 * b * math.sqrt(n), b * math.sqrt(m)],
        [b, a * (n + 0.5 * m + 1.0), b * math.sqrt(n), 0.5 * b * math.sqrt(m)],
        [0.5 * b * math.sqrt(n), b * math.sqrt(n), l1, b * math.sqrt(m * n) / 3.0],
        [b * math.sqrt(m), 0.5 * b * math.sqrt(m), b * math.sqrt(m * n) / 3.0, l2],
    ]
    return SymmetricMatrix.from_array(u_matrix)


def double_star_outer_form(m: int, n: int, alpha: float | AlphaParam) -> BlockForm:
    """
    First split of RD_alpha(S_{m,n}) over the n leaves of v. E covers u, v and u's leaves
    in vertex order, so the assembled matrix equals rd_alpha_matrix(double_star(m, n)).
    """
    _require_double_star(m, n)
    a = float(as_alpha(alpha))
    b = 1.0 - a
    rtr_x, rtr_y = _leaf_transmissions(m, n)
    t = m + 2
    e = np.full((t, t), 0.5 * b)
    e[0, 1] = e[1, 0] = b
    e[0, 2:] = e[2:, 0] = b
    e[0, 0] = a * (m + 0.5 * n + 1.0)
    e[1, 1] = a * (n + 0.5 * m + 1.0)
    e[2:, 2:] = np.where(np.eye(m, dtype=bool), a * rtr_x, 0.5 * b)
    gamma = np.full((t, 1), b / 3.0)
    gamma[0, 0] = 0.5 * b
    gamma[1, 0] = b
    return BlockForm(e=e, gamma=gamma, f=np.array([[a * rtr_y]]), q=np.array([[0.5 * b]]), z=n)


def _leaf_families(m: int, n: int, a: float, pairing: DoubleStarPairing) -> list[float]:
    b = 1.0 - a
    rtr_x, rtr_y = _leaf_transmissions(m, n)
    y_value = a * rtr_y - 0.5 * b
    x_value = a * rtr_x - 0.5 * b
    if pairing is DoubleStarPairing.PRINTED:
        return [y_value] * (m - 1) + [x_value] * (n - 1)
    return [y_value] * (n - 1) + [x_value] * (m - 1)


def spectrum_double_star(
    m: int,
    n: int,
    alpha: float | AlphaParam,
    *,
    pairing: DoubleStarPairing | str = DoubleStarPairing.DERIVED,
    tol: float = DEFAULT_EIG_TOL,
    method: str = "jacobi",
) -> Spectrum:
    """
    S_{m,n}: leaf families plus the four eigenvalues of the reduced 4x4 matrix.
    The DERIVED pairing gives v's leaf value multiplicity n-1; PRINTED swaps the exponents.
    """
    _require_double_star(m, n)
    a = float(as_alpha(alpha))
    pairing = DoubleStarPairing(pairing)
    theta = eig_sym(double_star_u_matrix(m, n, a), tol=tol, method=method)
    return _spectrum(_leaf_families(m, n, a, pairing) + list(theta.values))


def diagnose_double_star(
    m: int,
    n: int,
    alpha: float | AlphaParam,
    observed: Spectrum,
    *,
    tol: float = DEFAULT_DIAGNOSTIC_TOL,
    method: str = "jacobi",
) -> DoubleStarDiagnostic:
    """
    Compare both multiplicity pairings and both candidate corner entries of the first
    reduced matrix against an observed spectrum of RD_alpha(S_{m,n}).
    """
    _require_double_star(m, n)
    a = float(as_alpha(alpha))
    if len(observed) != m + n + 2:
        raise DomainError(f"observed spectrum has {len(observed)} values, expected {m + n + 2}")

    derived = spectrum_double_star(m, n, a, pairing=DoubleStarPairing.DERIVED, method=method)
    printed = spectrum_double_star(m, n, a, pairing=DoubleStarPairing.PRINTED, method=method)

    decomposition = block_decompose(double_star_outer_form(m, n, a), method=method)
    rtr_y = _leaf_transmissions(m, n)[1]
    printed_reduced = np.array(decomposition.reduced.a)
    printed_reduced[-1, -1] = a * rtr_y + 0.5 * (m - 1) * (n - 1)
    printed_split = BlockDecomposition(
        repeated=decomposition.repeated,
        multiplicity=decomposition.multiplicity,
        reduced=SymmetricMatrix.from_array(printed_reduced),
    )

    diagnostic = DoubleStarDiagnostic(
        m=m,
        n=n,
        alpha=a,
        derived_pairing_dev=max_abs_deviation(derived, observed),
        printed_pairing_dev=max_abs_deviation(printed, observed),
        derived_corner_dev=max_abs_deviation(
            decomposed_spectrum(decomposition, method=method), observed
        ),
        printed_corner_dev=max_abs_deviation(
            decomposed_spectrum(printed_split, method=method), observed
        ),
        tol=tol,
    )
    if not diagnostic.printed_pairing_ok:
        logger.warning(
            "double star S_%s,%s alpha=%s: printed multiplicity pairing deviates by %.3e",
            m,
            n,
            a,
            diagnostic.printed_pairing_dev,
        )
    return diagnostic


# =========
# Two distinct eigenvalues
# =========


def two_valued_non_complete(graph: Graph, spectrum: Spectrum) -> bool:
    """
    True when the RD_alpha spectrum of a non-complete graph still has exactly two distinct
    values. K_{1,4} at alpha = 1/2 ({3, 1, 1, 1, 1}) is such a graph.
    """
    if graph.is_complete() or len(spectrum.distinct()) != 2:
        return False
    logger.warning(
        "non-complete graph n=%s m=%s has two distinct eigenvalues %s",
        graph.n,
        graph.m,
        [value for value, _ in spectrum.distinct()],
    )
    return True

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from services import graph_core, linalg, rd_matrices
from services.spectral_types import (
    ConvergenceError,
    DomainError,
    NumericError,
    Spectrum,
    SymmetricMatrix,
)

P3_SPECTRUM = ((0.5 + math.sqrt(8.25)) / 2, -0.5, (0.5 - math.sqrt(8.25)) / 2)


def _rd(graph, alpha=0.0):
    return rd_matrices.rd_alpha_matrix(graph_core.apsp(graph), alpha)


def _random_symmetric(seed: int, n: int) -> SymmetricMatrix:
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(n, n))
    return SymmetricMatrix.from_array((raw + raw.T) / 2)


# =========
# eig_sym
# =========


def test_round_robin_covers_every_pair_once():
    for n in range(1, 10):
        seen = []
        for p_idx, q_idx in linalg._round_robin(n):
            assert len(set(p_idx) | set(q_idx)) == 2 * len(p_idx)
            seen += list(zip(p_idx.tolist(), q_idx.tolist(), strict=True))
        assert sorted(seen) == [(p, q) for p in range(n) for q in range(p + 1, n)]


def test_eig_sym_diagonal():
    spectrum = linalg.eig_sym(SymmetricMatrix.from_array(np.diag([3.0, 1.0, 2.0])))
    assert spectrum.values == (3.0, 2.0, 1.0)


def test_eig_sym_p3(p3):
    spectrum = linalg.eig_sym(_rd(p3))
    assert spectrum.values == pytest.approx(P3_SPECTRUM, abs=1e-10)
    assert spectrum.values == pytest.approx((1.68614, -0.5, -1.18614), abs=1e-5)


def test_eig_sym_c4(c4):
    assert linalg.eig_sym(_rd(c4)).values == pytest.approx((2.5, -0.5, -0.5, -1.5), abs=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_jacobi_matches_lapack(seed):
    matrix = _random_symmetric(seed, 3 + seed)
    jacobi = linalg.eig_sym(matrix)
    lapack = linalg.eig_sym(matrix, method="lapack")
    assert linalg.max_abs_deviation(jacobi, lapack) <= 1e-9


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_eigenvectors_diagonalize(method):
    matrix = _random_symmetric(7, 6)
    spectrum = linalg.eig_sym(matrix, vectors=True, method=method)
    v = spectrum.vectors
    assert np.allclose(v.T @ v, np.eye(6), atol=1e-9)
    assert np.allclose(matrix.a @ v, v * spectrum.as_array(), atol=1e-9)


def test_trace_and_frobenius_identities():
    for seed in range(5):
        matrix = _random_symmetric(seed, 8)
        values = linalg.eig_sym(matrix).as_array()
        assert values.sum() == pytest.approx(matrix.trace(), abs=1e-9)
        assert (values**2).sum() == pytest.approx(linalg.frobenius_norm_sq(matrix), rel=1e-9)


def test_permutation_invariance():
    matrix = _random_symmetric(3, 7)
    perm = np.random.default_rng(11).permutation(7)
    permuted = SymmetricMatrix.from_array(matrix.a[np.ix_(perm, perm)])
    assert linalg.max_abs_deviation(linalg.eig_sym(matrix), linalg.eig_sym(permuted)) <= 1e-9


def test_eig_sym_zero_and_single():
    assert linalg.eig_sym(SymmetricMatrix.from_array(np.zeros((3, 3)))).values == (0.0, 0.0, 0.0)
    assert linalg.eig_sym(SymmetricMatrix.from_array([[4.0]])).values == (4.0,)


def test_eig_sym_non_finite():
    with pytest.raises(NumericError):
        linalg.eig_sym(SymmetricMatrix.from_array([[1.0, np.nan], [np.nan, 1.0]]))


def test_eig_sym_sweep_cap():
    with pytest.raises(ConvergenceError) as exc:
        linalg.eig_sym(SymmetricMatrix.from_array([[1.0, 2.0], [2.0, 1.0]]), max_sweeps=0)
    assert exc.value.sweeps == 0


@pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"method": "qr"}])
def test_eig_sym_bad_options(kwargs):
    with pytest.raises(DomainError):
        linalg.eig_sym(SymmetricMatrix.from_array([[1.0]]), **kwargs)


def test_perron_value_is_simple():
    for graph in graph_core.connected_corpus(5):
        if graph.n < 2:
            continue
        for alpha in (0.0, 0.5):
            values = linalg.eig_sym(_rd(graph, alpha)).values
            assert values[0] - values[1] > 1e-9


# =========
# spread / norms
# =========


def test_spread_of(c4):
    assert linalg.spread_of(linalg.eig_sym(_rd(c4))) == pytest.approx(4.0, abs=1e-10)
    assert linalg.spread_of(Spectrum.from_values([2.0])) == 0.0
    with pytest.raises(DomainError):
        linalg.spread_of(Spectrum(values=()))


def test_spread_of_complete_graph():
    for n in range(2, 7):
        spectrum = linalg.eig_sym(_rd(graph_core.complete(n), 0.25))
        assert linalg.spread_of(spectrum) == pytest.approx(n * 0.75, abs=1e-9)


def test_frobenius_norm_sq(p3):
    assert linalg.frobenius_norm_sq(SymmetricMatrix.from_array(np.zeros((2, 2)))) == 0.0
    assert linalg.frobenius_norm_sq(SymmetricMatrix.from_array(np.eye(5))) == 5.0
    assert linalg.frobenius_norm_sq(_rd(p3)) == pytest.approx(4.5)


def test_max_abs_deviation_accepts_spectra():
    spectrum = Spectrum.from_values([1.0, 3.0, -2.0])
    assert list(spectrum) == [3.0, 1.0, -2.0]
    assert linalg.max_abs_deviation(spectrum, Spectrum.from_values([3.0, 1.5, -2.0])) == 0.5
    assert linalg.max_abs_deviation(spectrum, [-2.0, 1.0, 3.0]) == 0.0


def test_max_abs_deviation_length_mismatch():
    with pytest.raises(DomainError):
        linalg.max_abs_deviation([1.0], [1.0, 2.0])


# =========
# quotients and interlacing
# =========


def test_quotient_trivial_partition(p3):
    matrix = _rd(p3)
    quotient = linalg.quotient_matrix(matrix, [[0], [1], [2]])
    assert np.allclose(quotient.b, matrix.a)
    assert linalg.max_abs_deviation(quotient.spectrum, linalg.eig_sym(matrix)) <= 1e-9
    assert quotient.closed_form is None


def test_quotient_single_cell(c4):
    quotient = linalg.quotient_matrix(_rd(c4), [[0, 1, 2, 3]])
    assert np.allclose(quotient.b, [[2.5]])


def test_quotient_center_and_leaves(p3):
    matrix = _rd(p3)
    quotient = linalg.quotient_matrix(matrix, [[1], [0, 2]])
    assert np.allclose(quotient.b, [[0.0, 2.0], [1.0, 0.5]])
    assert quotient.closed_form == pytest.approx(quotient.spectrum.values, abs=1e-9)
    assert linalg.interlaces(quotient.spectrum, linalg.eig_sym(matrix))


@pytest.mark.parametrize(
    "partition",
    [[], [[0, 1], []], [[0, 1], [1, 2]], [[0, 1]], [[0, 1], [2, 3]]],
)
def test_quotient_invalid_partition(p3, partition):
    with pytest.raises(DomainError):
        linalg.quotient_matrix(_rd(p3), partition)


def test_equitable_partition_spectrum_is_contained(p3):
    matrix = _rd(p3)
    full = linalg.eig_sym(matrix)
    assert linalg.is_equitable(matrix, [[1], [0, 2]])
    assert not linalg.is_equitable(matrix, [[0, 1], [2]])
    quotient = linalg.quotient_matrix(matrix, [[1], [0, 2]])
    assert linalg.spectrum_contains(quotient.spectrum, full)


def test_spectrum_contains_multiset():
    outer = Spectrum.from_values([3.0, 1.0, 1.0])
    assert linalg.spectrum_contains(Spectrum.from_values([1.0, 1.0]), outer)
    assert not linalg.spectrum_contains(Spectrum.from_values([3.0, 3.0]), outer)


def test_interlaces_examples():
    outer = Spectrum.from_values([3.0, 1.0])
    assert linalg.interlaces(outer, outer)
    assert linalg.interlaces(Spectrum.from_values([2.0]), outer)
    assert not linalg.interlaces(Spectrum.from_values([4.0]), outer)
    with pytest.raises(DomainError):
        linalg.interlaces(Spectrum.from_values([1.0, 2.0, 3.0]), outer)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    n=st.integers(min_value=3, max_value=9),
    cells=st.integers(min_value=1, max_value=4),
)
def test_random_quotients_interlace(seed, n, cells):
    graph = graph_core.random_connected(n, 0.5, seed)
    labels = np.random.default_rng(seed).integers(0, cells, size=n)
    partition = [np.flatnonzero(labels == c).tolist() for c in range(cells)]
    partition = [cell for cell in partition if cell]
    matrix = _rd(graph, (seed % 5) / 4)
    quotient = linalg.quotient_matrix(matrix, partition)
    assert linalg.interlaces(quotient.spectrum, linalg.eig_sym(matrix))


# =========
# weyl_check
# =========


def test_weyl_zero_perturbation(c4):
    matrix = _rd(c4)
    assert linalg.weyl_check(matrix, SymmetricMatrix.from_array(np.zeros((4, 4))))


def test_weyl_rd_plus_rt(c4):
    dist = graph_core.apsp(c4)
    rt = SymmetricMatrix.from_array(np.diag(rd_matrices.transmission_profile(dist).rtr))
    assert linalg.weyl_check(rd_matrices.rd_alpha_matrix(dist, 0.0), rt)


@pytest.mark.parametrize("seed", range(5))
def test_weyl_random_pairs(seed):
    assert linalg.weyl_check(_random_symmetric(seed, 5), _random_symmetric(seed + 100, 5))


def test_weyl_order_mismatch():
    with pytest.raises(DomainError):
        linalg.weyl_check(_random_symmetric(0, 3), _random_symmetric(0, 4))

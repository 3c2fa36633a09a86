import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spectral_nash.errors import (ConstantMatrix, DimensionMismatch,
                                  NonPositiveConstant, ZeroBlock)
from spectral_nash.games import (BimatrixGame, SymmetricGame, as_prob_vector,
                                 bimatrix_regrets, extract_strategies,
                                 min_max_constants, normalize, regret_f,
                                 remove_dominated, row_is_dominated,
                                 summed_regret_bound, symmetrize,
                                 trivial_zero_check)

matrices = arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                  elements=st.floats(-10, 10))


def test_normalize_examples():
    np.testing.assert_allclose(normalize([[2, 5], [3, 4]]), [[0, 1], [1 / 3, 2 / 3]])
    np.testing.assert_array_equal(normalize([[0, 1], [1, 0]]), [[0, 1], [1, 0]])
    with pytest.raises(ConstantMatrix):
        normalize([[7, 7], [7, 7]])


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_normalize_idempotent_and_order_preserving(M):
    if M.max() == M.min():
        return
    N = normalize(M)
    assert N.min() == 0.0 and N.max() == 1.0
    np.testing.assert_allclose(normalize(N), N, atol=1e-15)
    flat, nflat = M.ravel(), N.ravel()
    order = np.argsort(flat, kind="stable")
    assert np.all(np.diff(nflat[order]) >= 0)


def test_prob_vector_validation():
    as_prob_vector([0.5, 0.5])
    with pytest.raises(ValueError):
        as_prob_vector([0.6, 0.5])
    with pytest.raises(ValueError):
        as_prob_vector([1.5, -0.5])
    with pytest.raises(DimensionMismatch):
        as_prob_vector([1.0], n=2)


def test_bimatrix_shape_check():
    with pytest.raises(DimensionMismatch):
        BimatrixGame(np.zeros((2, 2)), np.zeros((2, 3)))


def test_symmetric_flags():
    g = SymmetricGame.from_matrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert g.zero_diagonal and g.no_zero_column and g.no_dominated_row
    g = SymmetricGame.from_matrix([[1, 0], [1, 0]])
    assert not g.zero_diagonal and not g.no_zero_column


def test_strictly_dominated_row_removed():
    R = np.array([[1.0, 1.0], [0.0, 0.0]])
    C = np.array([[0.0, 1.0], [1.0, 0.0]])
    reduced, an = remove_dominated(BimatrixGame(R, C))
    assert an.removed_rows == (1,)
    # with row 1 gone the column player strictly prefers column 1
    assert an.removed_cols == (0,)
    assert (an.kept_rows, an.kept_cols) == ((0,), (1,))


def test_dominance_by_mixture():
    # row 2 is beaten by the half-half mix of rows 0 and 1
    R = np.array([[1.0, 0.0], [0.0, 1.0], [0.4, 0.4]])
    assert row_is_dominated(R, 2)
    assert not row_is_dominated(R, 0)


def test_remove_dominated_keeps_representative_of_duplicates():
    R = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    C = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 0.0]])
    reduced, an = remove_dominated(BimatrixGame(R, C))
    assert reduced.shape[0] >= 1
    assert len(an.kept_rows) + len(an.removed_rows) == 3


def test_dominant_pure_pair_reduces_to_single_cell():
    g = BimatrixGame([[1, 0], [0, 0]], [[1, 0], [0, 0]])
    reduced, an = remove_dominated(g)
    assert reduced.shape == (1, 1)
    assert an.kept_rows == (0,) and an.kept_cols == (0,)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2 ** 31))
def test_unique_best_rows_are_never_removed(l1, l2, seed):
    rng = np.random.default_rng(seed)
    g = BimatrixGame(rng.random((l1, l2)), rng.random((l1, l2))).normalized()
    reduced, an = remove_dominated(g)
    # only the first round of row removal sees the full column set
    first_cols = list(range(l2))
    for _ in range(50):
        y = rng.dirichlet(np.ones(l2))
        pay = g.R[:, first_cols] @ y
        best = np.flatnonzero(pay >= pay.max() - 1e-12)
        if best.size == 1 and not an.removed_cols:
            assert best[0] in an.kept_rows


def test_min_max_constants_of_pennies(pennies):
    c1, c2 = min_max_constants(pennies)
    assert c1 == pytest.approx(0.5) and c2 == pytest.approx(0.5)


def test_trivial_zero_column():
    R = np.array([[0.0, 1.0], [0.0, 0.5]])
    C = np.array([[1.0, 0.0], [0.0, 1.0]])
    x_R, x_C = trivial_zero_check(BimatrixGame(R, C))
    f_R, f_C = bimatrix_regrets(R, C, x_R, x_C)
    assert f_R == pytest.approx(0.0, abs=1e-12) and f_C == pytest.approx(0.0, abs=1e-9)


def test_symmetrize_block_layout(pennies):
    A = symmetrize(pennies).A
    np.testing.assert_array_equal(A[:2, 2:], pennies.C.T)
    np.testing.assert_array_equal(A[2:, :2], pennies.R)
    assert np.all(A[:2, :2] == 0) and np.all(A[2:, 2:] == 0)


def test_regret_of_block_uniform_point(pennies):
    A = symmetrize(pennies).A
    assert regret_f(A, np.full(4, 0.25)) == pytest.approx(0.0, abs=1e-15)
    # x = (e_1 for C, e_1 for R) / 2: Ax = (0, 1, 1, 0)/2, x^T A x = 1/4
    x = np.array([0.5, 0.0, 0.5, 0.0])
    assert regret_f(A, x) == pytest.approx(0.25)


def test_rps_regrets(rps):
    assert regret_f(rps, np.full(3, 1 / 3)) == pytest.approx(0.0, abs=1e-15)
    assert regret_f(rps, [1, 0, 0]) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2 ** 31))
def test_regret_range(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n))
    x = rng.dirichlet(np.ones(n))
    f = regret_f(A, x)
    assert -1e-12 <= f <= A.max() + 1e-12


def test_bimatrix_regrets_of_pennies(pennies):
    assert bimatrix_regrets(pennies.R, pennies.C, [1, 0], [1, 0]) == (0.0, 1.0)


def test_extraction_of_pennies(pennies):
    ext = extract_strategies(np.full(4, 0.25), pennies)
    np.testing.assert_allclose(ext.x_R, [0.5, 0.5])
    np.testing.assert_allclose(ext.x_C, [0.5, 0.5])
    assert ext.f_R == pytest.approx(0) and ext.f_C == pytest.approx(0)
    with pytest.raises(ZeroBlock):
        extract_strategies([0.5, 0.5, 0.0, 0.0], pennies)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2 ** 31))
def test_rebalanced_point_is_no_worse_and_bound_holds(l1, l2, seed):
    rng = np.random.default_rng(seed)
    g = BimatrixGame(rng.random((l1, l2)), rng.random((l1, l2))).normalized()
    reduced, an = remove_dominated(g)
    A = symmetrize(reduced).A
    n = A.shape[0]
    x = rng.dirichlet(np.ones(n))
    try:
        ext = extract_strategies(x, reduced)
    except ZeroBlock:
        return
    f1 = regret_f(A, ext.x1)
    assert f1 <= regret_f(A, x) + 1e-12
    if an.c1 > 0 and an.c2 > 0:
        assert ext.f_R + ext.f_C <= summed_regret_bound(f1, an.c1, an.c2) + 1e-9


def test_summed_regret_bound_arithmetic():
    assert summed_regret_bound(0.01, 0.5, 0.5) == pytest.approx(0.08)
    assert summed_regret_bound(0.0, 0.3, 0.7) == 0.0
    assert summed_regret_bound(0.02, 1, 1) == pytest.approx(0.08)
    with pytest.raises(NonPositiveConstant):
        summed_regret_bound(0.1, 0.0, 1.0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import linprog

from spectral_nash.errors import LpFailure
from spectral_nash.lp import LinearProgram, solve_lp, solve_zero_sum, _require_optimal


def test_small_lp_with_known_optimum():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
    lp = LinearProgram([-1.0, -1.0])
    lp.add([1, 2], "<=", 4).add([3, 1], "<=", 6)
    sol = solve_lp(lp)
    assert sol.optimal
    np.testing.assert_allclose(sol.primal, [1.6, 1.2], atol=1e-10)
    assert sol.value == pytest.approx(-2.8)
    # sensitivity duals of <= rows in a minimization are nonpositive
    assert np.all(sol.duals <= 1e-12)
    assert sol.duals @ [4, 6] == pytest.approx(sol.value)


def test_equality_and_ge_rows():
    lp = LinearProgram([1.0, 2.0, 0.0])
    lp.add([1, 1, 1], "=", 1).add([1, 0, 0], ">=", 0.25)
    sol = solve_lp(lp)
    np.testing.assert_allclose(sol.primal, [0.25, 0.0, 0.75], atol=1e-10)


def test_infeasible_and_unbounded_status():
    lp = LinearProgram([1.0])
    lp.add([1.0], "<=", -1.0)
    assert solve_lp(lp).status == "infeasible"
    lp = LinearProgram([-1.0])
    assert solve_lp(lp).status == "unbounded"
    with pytest.raises(LpFailure):
        _require_optimal(solve_lp(lp), "test")


def test_free_variable_can_go_negative():
    lp = LinearProgram([1.0, 0.0], free=(0,))
    lp.add([1.0, 1.0], ">=", -3.0).add([0.0, 1.0], "<=", 0.0)
    sol = solve_lp(lp)
    assert sol.primal[0] == pytest.approx(-3.0)


def test_simplex_domain_constraint():
    lp = LinearProgram([3.0, 1.0, 2.0], simplex_domain=True)
    sol = solve_lp(lp)
    np.testing.assert_allclose(sol.primal, [0, 1, 0], atol=1e-12)
    assert sol.value == pytest.approx(1.0)


def test_zero_sum_matching_pennies():
    value, u, v = solve_zero_sum([[1, 0], [0, 1]])
    assert value == pytest.approx(0.5)
    np.testing.assert_allclose(u, [0.5, 0.5], atol=1e-10)
    np.testing.assert_allclose(v, [0.5, 0.5], atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(0, 1)))
def test_zero_sum_value_matches_scipy(M):
    rows, cols = M.shape
    value, u, v = solve_zero_sum(M)
    c = np.zeros(cols + 1)
    c[-1] = 1.0
    A_ub = np.hstack([M, -np.ones((rows, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(rows),
                  A_eq=[np.append(np.ones(cols), 0.0)], b_eq=[1.0],
                  bounds=[(0, None)] * cols + [(None, None)], method="highs")
    assert value == pytest.approx(res.fun, abs=1e-8)
    # saddle point: u guarantees the value, v forces it
    assert (M @ u).max() <= value + 1e-8
    assert (v @ M).min() >= value - 1e-8


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 2 ** 31))
def test_random_lp_matches_scipy(n, m, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    G = rng.normal(size=(m, n))
    h = rng.random(m) + 0.1                 # x = 0 is feasible
    lp = LinearProgram(c)
    for row, r in zip(G, h):
        lp.add(row, "<=", r)
    lp.add(np.ones(n), "<=", 5.0)           # keeps it bounded
    ours = solve_lp(lp)
    ref = linprog(c, A_ub=np.vstack([G, np.ones(n)]), b_ub=np.append(h, 5.0),
                  bounds=[(0, None)] * n, method="highs")
    assert ours.optimal and ref.status == 0
    assert ours.value == pytest.approx(ref.fun, abs=1e-7)

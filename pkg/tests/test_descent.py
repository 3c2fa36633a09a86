import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cycle
from spectral_nash.descent import (FullSimplex, SpectralBall, StationaryResult,
                                   SupportFace, certify_stationarity,
                                   direction_subproblem, find_stationary,
                                   gradient_D, line_search, pairwise_bound_check,
                                   suppmax)
from spectral_nash.errors import CertificateViolation, DimensionMismatch, NotDescent
from spectral_nash.games import regret_f, symmetrize
from spectral_nash.generate import random_winlose, winlose_pool
from spectral_nash.spectral import PositivePart, spectrum_of

U3 = np.full(3, 1 / 3)
E = np.eye(3)


def fd(A, x, xp, eps=1e-6):
    return (regret_f(A, (1 - eps) * x + eps * xp) - regret_f(A, x)) / eps


def test_suppmax_examples():
    assert suppmax([0.5, 0.5, 0.1]) == (0, 1)
    assert suppmax([1, 2, 3]) == (2,)
    assert suppmax([1, 1 - 1e-10, 0]) == (0, 1)


def test_gradient_examples(rps):
    rng = np.random.default_rng(0)
    x = rng.dirichlet(np.ones(3))
    assert gradient_D(rps, x, x) == pytest.approx(0.0, abs=1e-15)
    assert gradient_D(rps, U3, E[0]) == pytest.approx(2 / 3)
    assert fd(rps, U3, E[0]) == pytest.approx(2 / 3, abs=1e-5)
    assert gradient_D(rps, E[0], E[1]) == pytest.approx(-2.0)
    assert fd(rps, E[0], E[1]) == pytest.approx(-2.0, abs=1e-5)
    with pytest.raises(DimensionMismatch):
        gradient_D(rps, U3, np.ones(4) / 4)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 31))
def test_gradient_is_convex_in_direction(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n))
    x, u, v = rng.dirichlet(np.ones(n), 3)
    mid = gradient_D(A, x, 0.5 * (u + v))
    assert mid <= 0.5 * (gradient_D(A, x, u) + gradient_D(A, x, v)) + 1e-12


def test_direction_subproblem_examples(rps):
    ge = direction_subproblem(rps, U3)
    assert ge.value == pytest.approx(0.0, abs=1e-12)
    # vertex oracle: D is convex, so vertices bound the LP value from above
    assert min(gradient_D(rps, U3, e) for e in E) == pytest.approx(2 / 3)
    ge = direction_subproblem(rps, E[0])
    assert ge.value <= -1.0
    assert ge.value <= min(gradient_D(rps, E[0], e) for e in E) + 1e-12
    assert set(np.flatnonzero(ge.dual)) <= set(ge.S)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2 ** 31))
def test_direction_lp_beats_vertices_and_samples(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n))
    x = rng.dirichlet(np.ones(n))
    ge = direction_subproblem(A, x)
    pts = np.vstack([np.eye(n), rng.dirichlet(np.ones(n), 30)])
    assert ge.value <= min(gradient_D(A, x, p) for p in pts) + 1e-9
    assert ge.value <= 1e-12
    assert gradient_D(A, x, ge.minimizing_direction) == pytest.approx(ge.value, abs=1e-9)
    assert abs(ge.dual.sum() - 1) < 1e-12 and set(np.flatnonzero(ge.dual)) <= set(ge.S)


def test_support_face_subproblem(rps):
    K = SupportFace((0, 1))
    ge = direction_subproblem(rps, np.array([0.5, 0.5, 0.0]), K)
    assert ge.minimizing_direction[2] == 0.0
    with pytest.raises(ValueError):
        SupportFace(())


def test_line_search_examples(rps):
    step, f_new = line_search(rps, E[0], U3)
    assert step == pytest.approx(1.0) and f_new == pytest.approx(0.0, abs=1e-12)
    grid = np.linspace(0, 1, 10001)
    vals = [regret_f(rps, (1 - t) * E[0] + t * U3) for t in grid]
    assert grid[int(np.argmin(vals))] == pytest.approx(1.0)
    with pytest.raises(NotDescent):
        line_search(rps, U3, E[0])


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 31))
def test_line_search_matches_grid_scan(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n))
    x = rng.dirichlet(np.ones(n))
    xp = direction_subproblem(A, x).minimizing_direction
    if gradient_D(A, x, xp) >= -1e-12:
        return
    step, f_new = line_search(A, x, xp)
    assert f_new < regret_f(A, x)
    grid = np.linspace(0, 1, 2001)
    scan = min(regret_f(A, (1 - t) * x + t * xp) for t in grid)
    assert f_new <= scan + 1e-12


def test_find_stationary_rps(rps):
    r = find_stationary(rps, E[0])
    assert r.converged and r.f_x < 1e-8 and r.iterations <= 50
    r = find_stationary(rps, U3)
    assert r.converged and r.iterations == 0


def test_find_stationary_pennies(pennies):
    A = symmetrize(pennies).A
    x0 = 0.9 * np.eye(4)[0] + 0.1 * np.full(4, 0.25)
    r = find_stationary(A, x0)
    assert r.converged
    assert min(r.f_x, r.f_w) <= 1 / 3 + 1e-8


def test_find_stationary_validates_start(rps):
    with pytest.raises(ValueError):
        find_stationary(rps, [0.5, 0.6, 0.0])
    with pytest.raises(DimensionMismatch):
        find_stationary(rps, [0.5, 0.5])


def test_trace_strictly_decreasing_and_certified():
    for i, A in enumerate(winlose_pool(50, 3, 12, seed=4)):
        n = A.shape[0]
        r = find_stationary(A, np.eye(n)[i % n])
        assert np.all(np.diff(r.trace) < 0)
        if r.converged:
            rep = certify_stationarity(A, r, seed=i)
            assert rep.ok
            assert set(np.flatnonzero(r.w_star)) <= set(r.S)


def test_certificate_on_rps_equilibrium(rps):
    r = find_stationary(rps, U3)
    rep = certify_stationarity(rps, r)
    assert rep.ok and all(rep.passed().values())
    assert rep.points == 3 + 50


def test_certificate_detects_perturbed_point(rps):
    r = find_stationary(rps, U3)
    x = U3.copy()
    x[0] += 0.1
    x /= x.sum()
    bad = StationaryResult(x, r.w_star, regret_f(rps, x), r.f_w, 0, True)
    with pytest.raises(CertificateViolation) as info:
        certify_stationarity(rps, bad)
    assert info.value.excess > 1e-6
    rep = certify_stationarity(rps, bad, raise_on_violation=False)
    assert not rep.ok


def test_pairwise_bound():
    A = random_winlose(8, seed=2)
    r1 = find_stationary(A, np.eye(8)[0])
    r2 = find_stationary(A, np.eye(8)[5])
    same = pairwise_bound_check(A, r1, r1)
    assert same.ok and same.gap == 0 and same.quadratic == 0
    p = PositivePart.from_spectrum(spectrum_of(A))
    rep = pairwise_bound_check(A, r1, r2, positive=p)
    assert rep.ok
    assert rep.gap <= rep.quadratic + 1e-6 and rep.gap <= rep.spectral + 1e-6


def test_pairwise_on_equal_regret_points(rps):
    r1 = find_stationary(rps, U3)
    r2 = find_stationary(rps, E[1])
    rep = pairwise_bound_check(rps, r1, r2)
    assert rep.gap == pytest.approx(0.0, abs=1e-8) and rep.ok


def test_spectral_ball_descent_stays_inside():
    A = random_winlose(7, seed=9)
    s = spectrum_of(A)
    p = PositivePart.from_spectrum(s)
    for j in range(7):
        center = np.eye(7)[j]
        K = SpectralBall(center, 0.5 * s.xi, p)
        r = find_stationary(A, center, K)
        assert K.contains(r.x_star)
        assert np.all(np.diff(r.trace) < 0)
        if r.converged:
            assert certify_stationarity(A, r).ok
    with pytest.raises(ValueError):
        SpectralBall(np.eye(7)[0], -1.0, p)

"""Support-grid multi-start search and the end-to-end bimatrix solver.

Starting points are uniform distributions on every support of size at most
``1/eps``.  Descent runs from each one and the lowest-regret stationary
point wins.  ``solve_bimatrix`` wraps this with the preprocessing, the
symmetric reduction and the strategy extraction.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import NamedTuple, Optional

import numpy as np

from .descent import (FullSimplex, SpectralBall, StationaryResult,
                      certify_stationarity, find_stationary)
from .errors import (AllRegionsFailed, ConstantMatrix, NonPositiveConstant,
                     SpectralNashError, ZeroBlock)
from .games import (BimatrixGame, as_matrix, bimatrix_regrets,
                    extract_strategies, normalized_or_zero, regret_f, remove_dominated,
                    summed_regret_bound, symmetrize, trivial_zero_check,
                    uniform_on)
from .graph import decompose, lift
from .spectral import PositivePart, Spectrum, spectrum_of

DEFAULT_CAP = 100_000
PLAIN = "plain"
BALL = "ball"
MODES = (PLAIN, BALL)
BASELINE_CONSTANT = 12.0
SUMMED_BOUND_SLACK = 1e-9
EXTRACTION_SLACK = 1e-12


# -- grid ---------------------------------------------------------------------

def enumerate_supports(n: int, k: int, cap: int = DEFAULT_CAP):
    """Subsets of ``range(n)`` with at most ``k`` elements, by size, then
    lexicographically.  Returns ``(supports, truncated)``."""
    if not 1 <= k <= n:
        raise ValueError(f"support size {k} outside [1, {n}]")
    gen = (c for size in range(1, k + 1)
           for c in itertools.combinations(range(n), size))
    out = list(itertools.islice(gen, cap))
    truncated = len(out) == cap and next(gen, None) is not None
    return out, truncated


def region_start(support, n: int) -> np.ndarray:
    if len(support) == 0:
        raise ValueError("empty support")
    return uniform_on(support, n)


def parse_epsilon(eps) -> Fraction:
    """Accept ``1/3``, ``0.5``, a Fraction or a float; 1/eps must be a
    positive integer."""
    if isinstance(eps, str):
        frac = Fraction(eps.strip())
    elif isinstance(eps, Fraction):
        frac = eps
    else:
        frac = Fraction(float(eps)).limit_denominator(10_000)
    if not 0 < frac <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {eps!r}")
    inv = 1 / frac
    k = round(inv)
    if abs(float(inv) - k) > 1e-9:
        raise ValueError(f"1/epsilon must be an integer, got epsilon={eps!r}")
    return Fraction(1, k)


@dataclass(frozen=True)
class SearchPlan:
    epsilon: Fraction
    support_size: int
    region_count_bound: int
    cap: int = DEFAULT_CAP
    mode: str = PLAIN
    seed: int = 0

    @classmethod
    def build(cls, n: int, epsilon, cap: int = DEFAULT_CAP, mode: str = PLAIN,
              seed: int = 0) -> "SearchPlan":
        """Supports larger than ``n`` do not exist, so ``1/eps`` is clipped to ``n``."""
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
        if cap < 1:
            raise ValueError("cap must be positive")
        eps = parse_epsilon(epsilon)
        k = min(int(1 / eps), n)
        return cls(eps, k, n ** int(1 / eps), int(cap), mode, int(seed))

    def full_count(self, n: int) -> int:
        return sum(comb(n, j) for j in range(1, self.support_size + 1))

    def as_dict(self) -> dict:
        return {"epsilon": str(self.epsilon), "support_size": self.support_size,
                "region_count_bound": self.region_count_bound, "cap": self.cap,
                "mode": self.mode, "seed": self.seed}


# -- multi-start search -------------------------------------------------------

@dataclass
class RegionRun:
    support: tuple
    result: Optional[StationaryResult]
    error: Optional[str] = None


@dataclass
class SearchOutcome:
    best: StationaryResult
    best_support: tuple
    all_results: list
    guarantee: float
    wall_time: float
    regions_explored: int
    truncated: bool
    failures: list = field(default_factory=list)

    @property
    def converged_count(self) -> int:
        return sum(1 for r in self.all_results if r.result is not None and r.result.converged)


def _region_for(A, plan: SearchPlan, start, positive, radius2):
    if plan.mode == BALL:
        return SpectralBall(start, radius2, positive)
    return FullSimplex()


def _run_region(job):
    A, support, plan, positive, radius2 = job
    n = A.shape[0]
    x0 = region_start(support, n)
    try:
        K = _region_for(A, plan, x0, positive, radius2)
        return RegionRun(tuple(support), find_stationary(A, x0, K))
    except SpectralNashError as exc:
        return RegionRun(tuple(support), None, f"{type(exc).__name__}: {exc}")


def multi_start_search(A, s: Spectrum, plan: SearchPlan,
                       workers: Optional[int] = None) -> SearchOutcome:
    """Descend from the uniform point of every enumerated support and keep
    the converged result with the smallest regret.

    A region that raises is recorded as a failure.  With ``workers > 1`` the
    regions run in a process pool; results are merged in enumeration order,
    so the outcome does not depend on the worker count.
    """
    A = as_matrix(A)
    n = A.shape[0]
    t0 = time.perf_counter()
    supports, truncated = enumerate_supports(n, plan.support_size, plan.cap)
    positive = PositivePart.from_spectrum(s)
    radius2 = float(plan.epsilon) * s.xi
    jobs = [(A, sup, plan, positive, radius2) for sup in supports]
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_region, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        runs = [_run_region(j) for j in jobs]

    best_i = None
    for i, run in enumerate(runs):
        r = run.result
        if r is None or not r.converged:
            continue
        if best_i is None or r.f_x < runs[best_i].result.f_x:
            best_i = i
    failures = [(run.support, run.error) for run in runs if run.error is not None]
    if best_i is None:
        raise AllRegionsFailed(
            f"none of {len(runs)} regions produced a converged stationary point")
    return SearchOutcome(
        best=runs[best_i].result, best_support=runs[best_i].support,
        all_results=runs, guarantee=radius2,
        wall_time=time.perf_counter() - t0, regions_explored=len(runs),
        truncated=truncated, failures=failures)


# -- complexity planner -------------------------------------------------------

def _threshold_gap(n, eps):
    return BASELINE_CONSTANT * math.log(n) / math.sqrt(n) - eps


def crossover_n0(eps: float, iters: int = 200) -> float:
    """Solve ``12 ln n / sqrt(n) = eps`` for ``n`` on the decreasing branch
    (``n > e^2``) by bisection in ``log n``."""
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    lo, hi = 2.0, 200.0            # bounds on ln n; the curve peaks at ln n = 2
    if _threshold_gap(math.exp(hi), eps) > 0:
        raise ValueError("epsilon too small for the search bracket")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _threshold_gap(math.exp(mid), eps) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


@dataclass(frozen=True)
class PlannerReport:
    n: int
    epsilon: float
    m: Optional[int]
    xi: Optional[float]
    spectral_exponent: Optional[float]
    sqrt_m_exponent: Optional[float]
    sqrt_n_exponent: float
    baseline_exponent: float
    crossover_n0: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def planner(n: int, s: Optional[Spectrum], eps: float) -> PlannerReport:
    """Exponents of ``n`` in the running times of the spectral grid and of
    the support-enumeration baseline, plus the crossover size."""
    eps = float(eps)
    m = xi = spec = sq = None
    if s is not None:
        m, xi = s.m, s.xi
        spec = xi / eps
        sq = math.sqrt(m) / eps
    return PlannerReport(
        n=n, epsilon=eps, m=m, xi=xi, spectral_exponent=spec, sqrt_m_exponent=sq,
        sqrt_n_exponent=math.sqrt(n) / eps,
        baseline_exponent=BASELINE_CONSTANT * math.log(n) / eps ** 2 if n > 1 else 0.0,
        crossover_n0=crossover_n0(eps))


# -- end-to-end bimatrix solve ------------------------------------------------

class BimatrixSolution(NamedTuple):
    x_R: np.ndarray
    x_C: np.ndarray
    f_R: float
    f_C: float
    report: dict


def _pure(i, n):
    x = np.zeros(n)
    x[i] = 1.0
    return x


def _constant_case(g: BimatrixGame):
    """Equilibrium of a game where one payoff matrix is constant: the
    indifferent player plays the first strategy, the other best-responds."""
    R, C = g.R, g.C
    if R.min() == R.max():
        x_R = _pure(0, R.shape[0])
        x_C = _pure(int(np.argmax(C[0])), R.shape[1])
    else:
        x_C = _pure(0, R.shape[1])
        x_R = _pure(int(np.argmax(R[:, 0])), R.shape[0])
    return x_R, x_C


def _lift_pair(x_R, x_C, analysis, shape):
    out_R = np.zeros(shape[0])
    out_C = np.zeros(shape[1])
    out_R[list(analysis.kept_rows)] = x_R
    out_C[list(analysis.kept_cols)] = x_C
    return out_R, out_C


def _first_mixed_component(A, l2):
    """First connected component touching both strategy blocks."""
    comps = decompose(A)
    for comp in comps:
        nodes = comp.nodes
        if nodes[0] < l2 <= nodes[-1]:
            return comp, len(comps)
    return comps[0], len(comps)


def _certificate_dict(rep) -> dict:
    return {name: {"ok": bool(v <= rep.tol), "excess": v}
            for name, v in sorted(rep.excess.items())}


def _spectrum_summary(s: Spectrum) -> dict:
    return {"eigenvalues": [float(v) for v in s.eigenvalues], "m": s.m,
            "xi": s.xi, "n": s.n}


def solve_bimatrix(g: BimatrixGame, epsilon, mode: str = PLAIN,
                   cap: int = DEFAULT_CAP, seed: int = 0,
                   workers: Optional[int] = None) -> BimatrixSolution:
    """Approximate equilibrium of ``g`` through the symmetric reduction.

    Regrets in the result are measured on the normalized original game, with
    removed dominated strategies padded by zeros.
    """
    t0 = time.perf_counter()
    l1, l2 = g.shape
    report = {"input": {"kind": "bimatrix", "rows": l1, "cols": l2}}
    try:
        gn = g.normalized()
    except ConstantMatrix:
        x_R, x_C = _constant_case(g)
        return _finish(g, x_R, x_C, report, "constant_payoffs", t0)

    reduced, analysis = remove_dominated(gn)
    report["reduction"] = {
        "c1": analysis.c1, "c2": analysis.c2,
        "removed_rows": list(analysis.removed_rows),
        "removed_cols": list(analysis.removed_cols),
        "reduced_shape": list(reduced.shape)}

    trivial = trivial_zero_check(reduced)
    if trivial is not None:
        x_R, x_C = _lift_pair(*trivial, analysis, g.shape)
        return _finish(g, x_R, x_C, report, "zero_line", t0)
    if reduced.shape == (1, 1):
        x_R, x_C = _lift_pair(np.ones(1), np.ones(1), analysis, g.shape)
        return _finish(g, x_R, x_C, report, "single_pair", t0)

    sym = symmetrize(reduced)
    A = sym.A
    rl1, rl2 = reduced.shape
    n = rl1 + rl2
    comp, ncomp = _first_mixed_component(A, rl2)
    sub = comp.game.A
    s = spectrum_of(sub)
    plan = SearchPlan.build(sub.shape[0], epsilon, cap=cap, mode=mode, seed=seed)
    outcome = multi_start_search(sub, s, plan, workers=workers)
    report["spectrum"] = _spectrum_summary(s)
    report["components"] = ncomp
    report["plan"] = plan.as_dict()

    ranked = sorted((r.result for r in outcome.all_results
                     if r.result is not None and r.result.converged),
                    key=lambda r: r.f_x)
    chosen = ext = None
    for r in ranked:
        x_full = lift(r.x_star, comp.nodes, n)
        try:
            ext = extract_strategies(x_full, reduced)
        except ZeroBlock:
            continue
        chosen = r
        break
    if chosen is None:
        raise ZeroBlock("every converged point has an empty strategy block")

    x_full = lift(chosen.x_star, comp.nodes, n)
    f_x = regret_f(A, x_full)
    f_x1 = regret_f(A, ext.x1)
    cert = certify_stationarity(sub, chosen, seed=seed, raise_on_violation=False)
    certs = _certificate_dict(cert)
    certs["extraction_no_worse"] = {
        "ok": bool(f_x1 <= f_x + EXTRACTION_SLACK),
        "excess": max(f_x1 - f_x, 0.0)}
    try:
        bound = summed_regret_bound(f_x1, analysis.c1, analysis.c2)
        lhs = ext.f_R + ext.f_C
        certs["summed_regret_bound"] = {
            "ok": bool(lhs <= bound + SUMMED_BOUND_SLACK), "excess": max(lhs - bound, 0.0)}
    except NonPositiveConstant:
        bound = None
    report["outcome_search"] = {
        "f_A": f_x, "f_A_rebalanced": f_x1, "f_w": chosen.f_w,
        "iterations": chosen.iterations, "start_support": list(_support_of(chosen)),
        "regions_explored": outcome.regions_explored,
        "regions_converged": outcome.converged_count,
        "regions_failed": len(outcome.failures), "truncated": outcome.truncated,
        "guarantee": outcome.guarantee, "reduced_f_R": ext.f_R, "reduced_f_C": ext.f_C,
        "summed_regret_bound": bound, "M1": ext.M1, "M2": ext.M2}
    report["certificates"] = certs
    x_R, x_C = _lift_pair(ext.x_R, ext.x_C, analysis, g.shape)
    return _finish(g, x_R, x_C, report, "spectral_search", t0)


def _support_of(r: StationaryResult):
    return tuple(int(i) for i in np.flatnonzero(r.start > 0)) if r.start is not None else ()


def _finish(g, x_R, x_C, report, method, t0):
    """Recompute regrets from scratch on the normalized original game."""
    R, C = normalized_or_zero(g.R), normalized_or_zero(g.C)
    f_R, f_C = bimatrix_regrets(R, C, x_R, x_C)
    certs = report.setdefault("certificates", {})
    certs["strategies_valid"] = {
        "ok": bool(np.all(x_R >= 0) and np.all(x_C >= 0)
                   and abs(x_R.sum() - 1) <= 1e-12 and abs(x_C.sum() - 1) <= 1e-12),
        "excess": 0.0}
    if method != "spectral_search":
        certs["exact_equilibrium"] = {"ok": bool(max(f_R, f_C) <= 1e-9),
                                      "excess": max(f_R, f_C, 0.0)}
    report["method"] = method
    report["outcome"] = {"x_R": x_R.tolist(), "x_C": x_C.tolist(),
                         "f_R": f_R, "f_C": f_C}
    report["timings"] = {"total_seconds": time.perf_counter() - t0}
    return BimatrixSolution(x_R, x_C, f_R, f_C, report)


class SymmetricSolution(NamedTuple):
    x: np.ndarray
    f: float
    outcome: SearchOutcome
    report: dict


def solve_symmetric(A, epsilon, mode: str = PLAIN, cap: int = DEFAULT_CAP,
                    seed: int = 0, workers: Optional[int] = None) -> SymmetricSolution:
    """Search the first connected component of ``A`` and pad with zeros."""
    t0 = time.perf_counter()
    A = as_matrix(A)
    n = A.shape[0]
    comps = decompose(A)
    comp = comps[0]
    sub = comp.game.A
    s = spectrum_of(sub)
    plan = SearchPlan.build(sub.shape[0], epsilon, cap=cap, mode=mode, seed=seed)
    outcome = multi_start_search(sub, s, plan, workers=workers)
    best = outcome.best
    x = lift(best.x_star, comp.nodes, n)
    f = regret_f(A, x)
    cert = certify_stationarity(sub, best, seed=seed, raise_on_violation=False)
    certs = _certificate_dict(cert)
    certs["within_guarantee"] = {"ok": bool(f <= outcome.guarantee + 1e-9),
                                 "excess": max(f - outcome.guarantee, 0.0)}
    report = {
        "input": {"kind": "symmetric", "n": n},
        "components": len(comps), "component_nodes": list(comp.nodes),
        "spectrum": _spectrum_summary(s), "plan": plan.as_dict(),
        "method": "spectral_search",
        "outcome": {"x": x.tolist(), "f_A": f, "f_w": best.f_w,
                    "iterations": best.iterations,
                    "start_support": [comp.nodes[i] for i in _support_of(best)],
                    "regions_explored": outcome.regions_explored,
                    "regions_converged": outcome.converged_count,
                    "regions_failed": len(outcome.failures),
                    "truncated": outcome.truncated, "guarantee": outcome.guarantee},
        "certificates": certs,
        "timings": {"search_seconds": outcome.wall_time,
                    "total_seconds": time.perf_counter() - t0},
    }
    return SymmetricSolution(x, f, outcome, report)

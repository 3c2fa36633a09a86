"""Reference solvers used to check the search: exact symmetric equilibria by
support enumeration, the k-uniform support-enumeration baseline, and
epsilon-equilibrium verification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, TooLarge
from .games import BimatrixGame, as_matrix, bimatrix_regrets, regret_f

ORACLE_MAX_N = 10
EQ_TOL = 1e-8
PIVOT_TOL = 1e-10
DEDUP_TOL = 1e-9
VERIFY_SLACK = 1e-12


@dataclass
class OracleResult:
    """``equilibria`` only ever holds points with regret at most ``EQ_TOL``.

    For the baseline search the best pair found (exact or not) is kept in
    ``best`` with its ``best_regret``.
    """

    equilibria: list
    method: str
    exhaustive: bool
    best: Optional[tuple] = None
    best_regret: Optional[float] = None
    enumerated: int = 0
    extra: dict = field(default_factory=dict)


def _support_system(A, T):
    """Equal payoffs on ``T`` plus the simplex row; unknowns ``(x_T, v)``."""
    k = len(T)
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = A[np.ix_(T, T)]
    M[:k, k] = -1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return M, rhs


def _solutions(M, rhs):
    """Solutions of ``M z = rhs``; when ``M`` is singular, the corners of the
    solution set obtained by zeroing nullity-many probability coordinates."""
    U, sv, Vt = np.linalg.svd(M)
    rank = int(np.sum(sv > PIVOT_TOL * max(1.0, sv[0])))
    z, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.abs(M @ z - rhs).max() > 1e-9:
        return []
    if rank == M.shape[1]:
        return [z]
    nullity = M.shape[1] - rank
    k = M.shape[1] - 1
    out = [z]
    for zeros in itertools.combinations(range(k), min(nullity, k)):
        E = np.zeros((len(zeros), M.shape[1]))
        E[np.arange(len(zeros)), list(zeros)] = 1.0
        MM = np.vstack([M, E])
        rr = np.concatenate([rhs, np.zeros(len(zeros))])
        zz, *_ = np.linalg.lstsq(MM, rr, rcond=None)
        if np.abs(MM @ zz - rr).max() <= 1e-9:
            out.append(zz)
    return out


def _dedupe(points):
    kept = []
    for p in points:
        if all(np.abs(p - q).max() > DEDUP_TOL for q in kept):
            kept.append(p)
    return kept


def exact_symmetric_ne(A, max_n: int = ORACLE_MAX_N) -> OracleResult:
    """All symmetric equilibria found by solving the equal-payoff system on
    every support (sorted by support size, then lexicographically)."""
    A = as_matrix(A)
    n = A.shape[0]
    if n > max_n:
        raise TooLarge(f"exact enumeration limited to n <= {max_n}, got {n}")
    found = []
    for size in range(1, n + 1):
        for T in itertools.combinations(range(n), size):
            M, rhs = _support_system(A, list(T))
            for z in _solutions(M, rhs):
                xT = z[:size]
                if xT.min() < -1e-12:
                    continue
                x = np.zeros(n)
                x[list(T)] = np.maximum(xT, 0.0)
                x /= x.sum()
                if regret_f(A, x) <= EQ_TOL:
                    found.append(x)
    eq = _dedupe(found)
    return OracleResult(eq, "support_enumeration", True, enumerated=2 ** n - 1)


def k_uniform_strategies(n: int, k: int) -> np.ndarray:
    """Rows are uniform distributions over the size-``k`` multisets of ``range(n)``."""
    rows = []
    for ms in itertools.combinations_with_replacement(range(n), k):
        rows.append(np.bincount(ms, minlength=n) / k)
    return np.array(rows)


def lmm_support_search(g: BimatrixGame, k: int, cap: int = 1_000_000) -> OracleResult:
    """Best pair of k-uniform strategies under ``max(f_R, f_C)``.

    Pairs are visited row strategy first; at most ``cap`` pairs are scored and
    the first minimum wins ties.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    R, C = g.R, g.C
    l1, l2 = g.shape
    XR = k_uniform_strategies(l1, k)
    XC = k_uniform_strategies(l2, k)
    total = XR.shape[0] * XC.shape[0]
    truncated = total > cap
    best_val, best_pair = np.inf, None
    RX = XC @ R.T                      # row j: R x_C for the j-th column strategy
    bestR = RX.max(axis=1)
    CX = XR @ C                        # row i: C^T x_R for the i-th row strategy
    bestC = CX.max(axis=1)
    scored = 0
    chunk = max(1, 200_000 // max(1, XC.shape[0]))
    for lo in range(0, XR.shape[0], chunk):
        if scored >= cap:
            break
        block = XR[lo:lo + chunk]
        pay_R = block @ RX.T           # x_R^T R x_C
        pay_C = CX[lo:lo + chunk] @ XC.T
        worst = np.maximum(bestR[None, :] - pay_R, bestC[lo:lo + chunk, None] - pay_C)
        flat = worst.ravel()[:cap - scored]
        scored += flat.size
        i = int(np.argmin(flat))
        if flat[i] < best_val:
            best_val = float(flat[i])
            r, c = divmod(i, XC.shape[0])
            best_pair = (XR[lo + r].copy(), XC[c].copy())
    f_R, f_C = bimatrix_regrets(R, C, *best_pair)
    eq = [best_pair] if max(f_R, f_C) <= EQ_TOL else []
    return OracleResult(eq, "k_uniform", not truncated, best=best_pair,
                        best_regret=max(f_R, f_C), enumerated=scored,
                        extra={"k": k, "total_pairs": total, "f_R": f_R, "f_C": f_C})


def lmm_pair_count(l1: int, l2: int, k: int) -> int:
    return comb(l1 + k - 1, k) * comb(l2 + k - 1, k)


def verify_epsilon_ne(g: BimatrixGame, x_R, x_C, eps: float):
    """``(ok, (f_R, f_C))`` with ok iff both regrets are at most ``eps``."""
    x_R = np.asarray(x_R, dtype=float)
    x_C = np.asarray(x_C, dtype=float)
    if x_R.shape != (g.shape[0],) or x_C.shape != (g.shape[1],):
        raise DimensionMismatch(
            f"strategies of shape {x_R.shape}, {x_C.shape} for a {g.shape} game")
    f_R, f_C = bimatrix_regrets(g.R, g.C, x_R, x_C)
    ok = f_R <= eps + VERIFY_SLACK and f_C <= eps + VERIFY_SLACK
    return bool(ok), (f_R, f_C)

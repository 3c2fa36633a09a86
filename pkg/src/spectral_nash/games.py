"""Game representations, preprocessing, and the bimatrix-to-symmetric reduction.

A bimatrix game ``(R, C)`` with ``l1`` rows and ``l2`` columns is folded
into the symmetric ``n x n`` matrix::

    A = [[0,  C^T],
         [R,  0  ]]        n = l2 + l1

A symmetric vector splits as ``x = (x_C, x_R)``: the first ``l2`` entries
belong to the column player and the last ``l1`` to the row player.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (ConstantMatrix, DimensionMismatch, NonPositiveConstant,
                     ZeroBlock)
from .lp import LinearProgram, solve_lp, solve_zero_sum, _require_optimal

PROB_TOL = 1e-12
DOMINANCE_MARGIN = 1e-9
BLOCK_TOL = 1e-10


def as_prob_vector(x, n: Optional[int] = None, tol: float = PROB_TOL) -> np.ndarray:
    """Validate ``x`` as a point of the standard simplex and return a float copy."""
    x = np.array(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DimensionMismatch(f"expected a nonempty vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise DimensionMismatch(f"expected dimension {n}, got {x.size}")
    if np.any(x < 0):
        raise ValueError("probability vector has negative entries")
    if abs(x.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {x.sum()!r}")
    return x


def uniform_on(support, n: int) -> np.ndarray:
    x = np.zeros(n)
    idx = list(support)
    x[idx] = 1.0 / len(idx)
    return x


def as_matrix(A) -> np.ndarray:
    if isinstance(A, SymmetricGame):
        return A.A
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


@dataclass(frozen=True)
class BimatrixGame:
    R: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        C = np.array(self.C, dtype=float)
        if R.ndim != 2 or R.shape != C.shape or R.size == 0:
            raise DimensionMismatch(
                f"payoff matrices must share a nonempty 2-d shape, got {R.shape} and {C.shape}")
        R.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "C", C)

    @property
    def shape(self) -> tuple[int, int]:
        return self.R.shape

    def normalized(self) -> "BimatrixGame":
        return BimatrixGame(normalize(self.R), normalize(self.C))


@dataclass(frozen=True)
class SymmetricGame:
    A: np.ndarray
    zero_diagonal: bool = False
    no_zero_column: bool = False
    no_dominated_row: bool = False

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
            raise DimensionMismatch(f"expected a nonempty square matrix, got {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_matrix(cls, A, check_dominance: bool = True) -> "SymmetricGame":
        """Build a game and record which of the standing assumptions hold."""
        A = np.asarray(A, dtype=float)
        dominated = check_dominance and any(
            row_is_dominated(A, i) for i in range(A.shape[0]))
        return cls(
            A,
            zero_diagonal=bool(np.all(np.diag(A) == 0)),
            no_zero_column=bool(np.all(A.any(axis=0))),
            no_dominated_row=check_dominance and not dominated,
        )


@dataclass(frozen=True)
class ReductionAnalysis:
    c1: Optional[float]
    c2: Optional[float]
    removed_rows: tuple = ()
    removed_cols: tuple = ()
    kept_rows: tuple = ()
    kept_cols: tuple = ()
    trivial_equilibrium: Optional[tuple] = None


def normalize(M) -> np.ndarray:
    """Affinely rescale ``M`` so its minimum is 0 and its maximum is 1."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        raise DimensionMismatch("cannot normalize an empty matrix")
    lo, hi = M.min(), M.max()
    if hi == lo:
        raise ConstantMatrix(f"all entries equal {lo!r}")
    return (M - lo) / (hi - lo)


def normalized_or_zero(M) -> np.ndarray:
    """Like ``normalize`` but maps a constant matrix to zeros."""
    M = np.asarray(M, dtype=float)
    return normalize(M) if M.min() < M.max() else np.zeros_like(M)


def strictness_margin(M, i: int) -> float:
    """Largest ``s`` such that some column mix favours row ``i`` by ``s``
    over every other row of ``M``."""
    M = np.asarray(M, dtype=float)
    rows, cols = M.shape
    if rows == 1:
        return np.inf
    obj = np.zeros(cols + 1)
    obj[-1] = -1.0
    lp = LinearProgram(obj, simplex_domain=True, free=(cols,))
    for j in range(rows):
        if j != i:
            lp.add(np.append(M[i] - M[j], -1.0), ">=", 0.0)
    sol = _require_optimal(solve_lp(lp), "dominance test")
    return -sol.value


def row_is_dominated(M, i: int, margin: float = DOMINANCE_MARGIN) -> bool:
    return strictness_margin(M, i) <= margin


def remove_dominated(g: BimatrixGame) -> tuple[BimatrixGame, ReductionAnalysis]:
    """Iteratively delete dominated rows of R and dominated columns of C.

    One strategy is removed at a time (lowest index first) so duplicated
    strategies keep one representative.  Rows are exhausted before columns
    and the two passes alternate until nothing changes.
    """
    R, C = g.R, g.C
    rows = list(range(R.shape[0]))
    cols = list(range(R.shape[1]))
    removed_rows, removed_cols = [], []

    def first_dominated(M):
        for i in range(M.shape[0]):
            if row_is_dominated(M, i):
                return i
        return None

    changed = True
    while changed:
        changed = False
        while len(rows) > 1:
            i = first_dominated(R[np.ix_(rows, cols)])
            if i is None:
                break
            removed_rows.append(rows.pop(i))
            changed = True
        while len(cols) > 1:
            j = first_dominated(C[np.ix_(rows, cols)].T)
            if j is None:
                break
            removed_cols.append(cols.pop(j))
            changed = True

    reduced = BimatrixGame(R[np.ix_(rows, cols)], C[np.ix_(rows, cols)])
    c1, c2 = min_max_constants(reduced)
    return reduced, ReductionAnalysis(
        c1=c1, c2=c2,
        removed_rows=tuple(removed_rows), removed_cols=tuple(removed_cols),
        kept_rows=tuple(rows), kept_cols=tuple(cols))


def _dominance_mix(M, j):
    """A mix over the rows of ``M`` under which column ``j`` is a best column,
    or None if no such mix exists."""
    rows, cols = M.shape
    if cols == 1:
        return np.full(rows, 1.0 / rows)
    obj = np.zeros(rows + 1)
    obj[-1] = -1.0
    lp = LinearProgram(obj, simplex_domain=True, free=(rows,))
    for k in range(cols):
        if k != j:
            lp.add(np.append(M[:, j] - M[:, k], -1.0), ">=", 0.0)
    sol = _require_optimal(solve_lp(lp), "zero-column equilibrium")
    if -sol.value < -DOMINANCE_MARGIN:
        return None
    return sol.primal[:rows]


def trivial_zero_check(g: BimatrixGame):
    """Equilibrium built from an all-zero column of R or all-zero row of C.

    Returns ``(x_R, x_C)`` or None.
    """
    R, C = g.R, g.C
    l1, l2 = R.shape
    for j in range(l2):
        if np.all(R[:, j] == 0):
            v = _dominance_mix(C, j)
            if v is not None:
                x_C = np.zeros(l2)
                x_C[j] = 1.0
                return v, x_C
    for i in range(l1):
        if np.all(C[i] == 0):
            u = _dominance_mix(R.T, i)
            if u is not None:
                x_R = np.zeros(l1)
                x_R[i] = 1.0
                return x_R, u
    return None


def min_max_constants(g: BimatrixGame) -> tuple[float, float]:
    c1 = solve_zero_sum(g.R)[0]
    c2 = solve_zero_sum(g.C.T)[0]
    return c1, c2


def symmetrize(g: BimatrixGame) -> SymmetricGame:
    l1, l2 = g.shape
    n = l1 + l2
    A = np.zeros((n, n))
    A[:l2, l2:] = g.C.T
    A[l2:, :l2] = g.R
    return SymmetricGame(A, zero_diagonal=True,
                         no_zero_column=bool(np.all(A.any(axis=0))))


def regret_f(A, x) -> float:
    """``max(Ax) - x^T A x``; zero exactly at symmetric equilibria."""
    A = as_matrix(A)
    x = np.asarray(x, dtype=float)
    if x.shape != (A.shape[0],):
        raise DimensionMismatch(f"vector of shape {x.shape} for {A.shape[0]}x{A.shape[0]} game")
    Ax = A @ x
    return float(Ax.max() - x @ Ax)


def bimatrix_regrets(R, C, x_R, x_C) -> tuple[float, float]:
    R = np.asarray(R, dtype=float)
    C = np.asarray(C, dtype=float)
    x_R = np.asarray(x_R, dtype=float)
    x_C = np.asarray(x_C, dtype=float)
    if x_R.shape != (R.shape[0],) or x_C.shape != (R.shape[1],):
        raise DimensionMismatch(
            f"strategies of shape {x_R.shape}, {x_C.shape} for a {R.shape} game")
    Rx = R @ x_C
    f_R = float(Rx.max() - x_R @ Rx)
    Cx = C.T @ x_R
    f_C = float(Cx.max() - x_C @ Cx)
    return f_R, f_C


class Extraction(NamedTuple):
    x_R: np.ndarray
    x_C: np.ndarray
    x1: np.ndarray
    f_R: float
    f_C: float
    M1: float
    M2: float


def extract_strategies(x, g: BimatrixGame) -> Extraction:
    """Split a symmetric vector into the two players' strategies.

    Also returns the rebalanced symmetric point ``x1`` whose blocks are
    weighted by the opposite player's best-response payoff.
    """
    l1, l2 = g.shape
    x = np.asarray(x, dtype=float)
    if x.shape != (l1 + l2,):
        raise DimensionMismatch(f"expected a vector of length {l1 + l2}")
    x_C, x_R = x[:l2], x[l2:]
    if np.abs(x_C).sum() <= BLOCK_TOL or np.abs(x_R).sum() <= BLOCK_TOL:
        raise ZeroBlock("a strategy block of the symmetric vector is zero")
    x_C = x_C / x_C.sum()
    x_R = x_R / x_R.sum()
    M1 = float((g.R @ x_C).max())
    M2 = float((g.C.T @ x_R).max())
    if M1 + M2 <= 0:
        raise ZeroBlock("both best-response payoffs vanish")
    x1 = np.concatenate([M2 * x_C, M1 * x_R]) / (M1 + M2)
    f_R, f_C = bimatrix_regrets(g.R, g.C, x_R, x_C)
    return Extraction(x_R, x_C, x1, f_R, f_C, M1, M2)


def summed_regret_bound(regret: float, c1: float, c2: float) -> float:
    """Guarantee ``2 (1/c1 + 1/c2) * regret`` on ``f_R + f_C``."""
    if c1 <= 0 or c2 <= 0:
        raise NonPositiveConstant(f"min-max constants must be positive, got {c1}, {c2}")
    return 2.0 * (1.0 / c1 + 1.0 / c2) * regret

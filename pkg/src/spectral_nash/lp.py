"""Dense two-phase simplex over small linear programs, with dual multipliers.

Every program is a minimization.  Variables are nonnegative unless they are
listed in ``free``; with ``simplex_domain=True`` the nonnegative variables are
additionally required to sum to one.

Duals follow the sensitivity convention ``dual_i = d(value) / d(rhs_i)``, so a
``>=`` row of a minimization has a nonnegative dual and a ``<=`` row a
nonpositive one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LpFailure, NumericalFailure

FEAS_TOL = 1e-9
OPT_TOL = 1e-8
PIVOT_TOL = 1e-10

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Constraint:
    coeffs: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))


@dataclass
class LinearProgram:
    objective: np.ndarray
    constraints: list = field(default_factory=list)
    simplex_domain: bool = False
    free: tuple = ()

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        for c in self.constraints:
            if c.coeffs.shape != (n,):
                raise ValueError(
                    f"constraint has {c.coeffs.shape} coefficients, expected {n}")
        self.free = tuple(sorted(set(int(j) for j in self.free)))

    @property
    def n(self) -> int:
        return self.objective.shape[0]

    def add(self, coeffs, sense, rhs):
        self.constraints.append(Constraint(coeffs, sense, float(rhs)))
        return self


@dataclass
class LpSolution:
    status: str
    primal: np.ndarray | None
    duals: np.ndarray | None
    value: float
    simplex_dual: float = 0.0
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Standard form ``min c.x, Ax = b, x >= 0`` with ``b >= 0``."""

    def __init__(self, A, b, cap):
        self.A = A
        self.b = b
        self.cap = cap
        self.iterations = 0

    def run(self, basis, cost, eligible):
        """Bland-rule primal simplex from a feasible basis.

        Returns (basis, status).  ``eligible`` masks the columns allowed to
        enter.
        """
        A, b = self.A, self.b
        basis = list(basis)
        while True:
            if self.iterations >= self.cap:
                raise NumericalFailure(
                    f"simplex exceeded iteration cap {self.cap}")
            self.iterations += 1
            B = A[:, basis]
            try:
                Binv = np.linalg.inv(B)
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure("singular basis") from exc
            y = cost[basis] @ Binv
            reduced = cost - y @ A
            reduced[basis] = 0.0
            candidates = np.flatnonzero(eligible & (reduced < -OPT_TOL))
            if candidates.size == 0:
                return basis, OPTIMAL
            j = int(candidates[0])
            xb = Binv @ b
            u = Binv @ A[:, j]
            rows = np.flatnonzero(u > PIVOT_TOL)
            if rows.size == 0:
                return basis, UNBOUNDED
            ratios = np.maximum(xb[rows], 0.0) / u[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12]
            leave = min(ties, key=lambda r: basis[r])
            basis[leave] = j


def _standard_form(p: LinearProgram):
    n = p.n
    free = list(p.free)
    rows, rhs, senses = [], [], []
    for con in p.constraints:
        rows.append(con.coeffs)
        rhs.append(con.rhs)
        senses.append(con.sense)
    if p.simplex_domain:
        mask = np.ones(n)
        mask[free] = 0.0
        rows.append(mask)
        rhs.append(1.0)
        senses.append("=")
    m = len(rows)
    n_slack = sum(s != "=" for s in senses)
    width = n + len(free) + n_slack
    A = np.zeros((m, width))
    b = np.zeros(m)
    c = np.zeros(width)
    c[:n] = p.objective
    c[n:n + len(free)] = -p.objective[free]
    slack = n + len(free)
    for i, (row, r, s) in enumerate(zip(rows, rhs, senses)):
        A[i, :n] = row
        A[i, n:n + len(free)] = -row[free]
        if s == "<=":
            A[i, slack] = 1.0
            slack += 1
        elif s == ">=":
            A[i, slack] = -1.0
            slack += 1
        b[i] = r
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b *= sign
    return A, b, c, sign, senses, m


def solve_lp(p: LinearProgram) -> LpSolution:
    """Solve ``p`` and certify feasibility, slackness and duality gap.

    Raises NumericalFailure if the pivot cap is hit or certification fails.
    """
    n = p.n
    A, b, c, sign, senses, m = _standard_form(p)
    width = A.shape[1]
    cap = 50 * (n + len(p.constraints) + 1)
    if m == 0:
        if np.any(c < -OPT_TOL):
            return LpSolution(UNBOUNDED, None, None, -np.inf)
        return LpSolution(OPTIMAL, np.zeros(n), np.zeros(0), 0.0)

    # Phase I with one artificial per row.
    A1 = np.hstack([A, np.eye(m)])
    cost1 = np.concatenate([np.zeros(width), np.ones(m)])
    tab = _Tableau(A1, b, cap)
    eligible = np.ones(width + m, dtype=bool)
    basis, _ = tab.run(list(range(width, width + m)), cost1, eligible)
    xb = np.linalg.solve(A1[:, basis], b)
    infeas = float(sum(xb[i] for i, j in enumerate(basis) if j >= width))
    if infeas > FEAS_TOL * max(1.0, np.abs(b).max()):
        return LpSolution(INFEASIBLE, None, None, np.nan, iterations=tab.iterations)

    # Drive zero-level artificials out of the basis; drop redundant rows.
    keep = np.ones(m, dtype=bool)
    for pos in range(m):
        j = basis[pos]
        if j < width:
            continue
        Binv = np.linalg.inv(A1[:, basis])
        row = Binv[pos] @ A
        cand = [k for k in range(width)
                if k not in basis and abs(row[k]) > 1e-7]
        if cand:
            basis[pos] = cand[0]
        else:
            keep[pos] = False
    live = np.flatnonzero(keep)
    basis = [basis[i] for i in live]
    A2 = A[live]
    b2 = b[live]
    tab2 = _Tableau(A2, b2, cap)
    tab2.iterations = tab.iterations
    basis, status = tab2.run(basis, c, np.ones(width, dtype=bool))
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, None, -np.inf, iterations=tab2.iterations)

    B = A2[:, basis]
    xb = np.linalg.solve(B, b2)
    y_live = np.linalg.solve(B.T, c[basis])
    x = np.zeros(width)
    x[basis] = xb
    y = np.zeros(m)
    y[live] = y_live
    y *= sign

    primal = x[:n].copy()
    primal[list(p.free)] -= x[n:n + len(p.free)]
    nonneg = np.ones(n, dtype=bool)
    nonneg[list(p.free)] = False
    if np.any(primal[nonneg] < -FEAS_TOL):
        raise NumericalFailure("negative primal beyond feasibility tolerance")
    primal[nonneg] = np.maximum(primal[nonneg], 0.0)
    if p.simplex_domain and nonneg.any():
        primal[nonneg] /= primal[nonneg].sum()

    ncon = len(p.constraints)
    sol = LpSolution(
        OPTIMAL, primal, y[:ncon].copy(), float(p.objective @ primal),
        simplex_dual=float(y[ncon]) if p.simplex_domain else 0.0,
        iterations=tab2.iterations)
    _certify(p, sol)
    return sol


def _certify(p: LinearProgram, sol: LpSolution):
    x = sol.primal
    dual_value = sol.simplex_dual if p.simplex_domain else 0.0
    cols = np.zeros(p.n)
    if p.simplex_domain:
        mask = np.ones(p.n)
        mask[list(p.free)] = 0.0
        cols += sol.simplex_dual * mask
    for con, yi in zip(p.constraints, sol.duals):
        lhs = float(con.coeffs @ x)
        viol = {"<=": lhs - con.rhs, ">=": con.rhs - lhs,
                "=": abs(lhs - con.rhs)}[con.sense]
        if viol > FEAS_TOL * max(1.0, abs(con.rhs)):
            raise NumericalFailure(f"primal residual {viol:.3e}")
        if abs(yi * (lhs - con.rhs)) > OPT_TOL:
            raise NumericalFailure("complementary slackness residual")
        dual_value += yi * con.rhs
        cols += yi * con.coeffs
    if abs(sol.value - dual_value) > OPT_TOL * max(1.0, abs(sol.value)):
        raise NumericalFailure(
            f"duality gap {abs(sol.value - dual_value):.3e}")
    reduced = p.objective - cols
    if p.free and np.any(np.abs(reduced[list(p.free)]) > OPT_TOL):
        raise NumericalFailure("dual infeasible on a free variable")


def _require_optimal(sol: LpSolution, what: str) -> LpSolution:
    if not sol.optimal:
        raise LpFailure(f"{what}: LP {sol.status}")
    return sol


def solve_zero_sum(M: Sequence) -> tuple[float, np.ndarray, np.ndarray]:
    """Value of the zero-sum game ``min_u max_v v^T M u``.

    ``u`` mixes the columns and ``v`` the rows of ``M``.  Returns
    ``(value, u, v)``; ``v`` is read off the LP duals.
    """
    M = np.asarray(M, dtype=float)
    rows, cols = M.shape
    # variables (u_1..u_cols, t); min t subject to t >= (M u)_i
    obj = np.zeros(cols + 1)
    obj[-1] = 1.0
    lp = LinearProgram(obj, simplex_domain=True, free=(cols,))
    for i in range(rows):
        coeffs = np.append(-M[i], 1.0)
        lp.add(coeffs, ">=", 0.0)
    sol = _require_optimal(solve_lp(lp), "zero-sum game")
    u = sol.primal[:cols]
    v = np.maximum(sol.duals, 0.0)
    v = v / v.sum() if v.sum() > 0 else np.full(rows, 1.0 / rows)
    return sol.value, u, v

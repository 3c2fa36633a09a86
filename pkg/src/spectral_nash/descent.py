"""Descent to stationary points of the regret ``f(x) = max(Ax) - x^T A x``.

Each step solves a linear program for the steepest feasible direction of the
directional derivative ``D(x', x)`` and then minimizes ``f`` exactly along the
segment.  The LP duals of the epigraph rows give the dual vector ``w`` that
pairs with a stationary point in the certificates below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import (CertificateViolation, DimensionMismatch, InfeasibleRegion,
                     LpFailure, NotDescent)
from .games import as_matrix, regret_f
from .lp import LinearProgram, solve_lp
from .spectral import PositivePart

SUPPMAX_TOL = 1e-9
DELTA_STAT = 1e-8
DELTA_CERT = 1e-6
MEMBERSHIP_TOL = 1e-9


# -- constraint regions -------------------------------------------------------

@dataclass(frozen=True)
class FullSimplex:
    kind = "full"

    def contains(self, x) -> bool:
        return True


@dataclass(frozen=True)
class SupportFace:
    support: tuple
    kind = "face"

    def __post_init__(self):
        if not self.support:
            raise ValueError("a support face needs at least one index")
        object.__setattr__(self, "support", tuple(sorted(int(i) for i in self.support)))

    def contains(self, x) -> bool:
        x = np.asarray(x)
        off = np.ones(x.size, dtype=bool)
        off[list(self.support)] = False
        return bool(np.all(np.abs(x[off]) <= MEMBERSHIP_TOL))


@dataclass(frozen=True, eq=False)
class SpectralBall:
    """Probability vectors within squared distance ``radius2`` of ``center``
    in the metric of ``positive.A_plus``."""

    center: np.ndarray
    radius2: float
    positive: PositivePart
    kind = "ball"

    def __post_init__(self):
        if self.radius2 < 0:
            raise ValueError("squared radius must be nonnegative")

    def excess(self, x) -> float:
        d = np.asarray(x) - self.center
        return float(d @ self.positive.A_plus @ d - self.radius2)

    def contains(self, x) -> bool:
        return self.excess(x) <= MEMBERSHIP_TOL


ConstraintRegion = Union[FullSimplex, SupportFace, SpectralBall]


# -- gradient -----------------------------------------------------------------

def suppmax(v, tol: float = SUPPMAX_TOL) -> tuple:
    v = np.asarray(v, dtype=float)
    return tuple(np.flatnonzero(v >= v.max() - tol).tolist())


def _linear_part(A, x):
    """Coefficients ``c`` and constant ``k`` with
    ``D(x', x) = max_S (A x') + c.x' + k``."""
    Ax = A @ x
    xAx = float(x @ Ax)
    f = float(Ax.max() - xAx)
    return -(A.T @ x + Ax), xAx - f


def gradient_D(A, x, x_prime, tol: float = SUPPMAX_TOL) -> float:
    """Directional derivative of the regret at ``x`` towards ``x_prime``."""
    A = as_matrix(A)
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != (A.shape[0],) or x_prime.shape != x.shape:
        raise DimensionMismatch("vectors do not match the game dimension")
    S = list(suppmax(A @ x, tol))
    c, k = _linear_part(A, x)
    return float((A[S] @ x_prime).max() + c @ x_prime + k)


@dataclass(frozen=True)
class GradientEval:
    S: tuple
    value: float
    minimizing_direction: np.ndarray
    dual: np.ndarray
    lower_bound: float


def _epigraph_lp(A, S, c, cols, cuts=()):
    """min t + c.x' over the face ``cols`` with t >= (A x')_i for i in S."""
    k = len(cols)
    obj = np.append(c[cols], 1.0)
    lp = LinearProgram(obj, simplex_domain=True, free=(k,))
    for i in S:
        lp.add(np.append(-A[i, cols], 1.0), ">=", 0.0)
    for coeffs, rhs in cuts:
        lp.add(np.append(coeffs[cols], 0.0), "<=", rhs)
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        raise InfeasibleRegion("constraint region has no feasible point")
    if not sol.optimal:
        raise LpFailure(f"direction subproblem {sol.status}")
    return sol


def _dual_on(S, duals, n):
    w = np.zeros(n)
    vals = np.maximum(duals[:len(S)], 0.0)
    if vals.sum() <= 0:
        w[list(S)] = 1.0 / len(S)
    else:
        w[list(S)] = vals / vals.sum()
    return w


def direction_subproblem(A, x, K: Optional[ConstraintRegion] = None,
                         tol: float = SUPPMAX_TOL,
                         max_cuts: Optional[int] = None) -> GradientEval:
    """Minimize ``D(., x)`` over the region ``K``.

    Polyhedral regions are solved exactly by one LP.  For a spectral ball the
    quadratic constraint is approximated from outside by tangent cuts; the
    returned direction is pulled back into the ball, and ``lower_bound``
    carries the LP value of the outer approximation.
    """
    A = as_matrix(A)
    n = A.shape[0]
    x = np.asarray(x, dtype=float)
    K = FullSimplex() if K is None else K
    S = suppmax(A @ x, tol)
    c, k = _linear_part(A, x)
    cols = list(K.support) if isinstance(K, SupportFace) else list(range(n))

    if not isinstance(K, SpectralBall):
        sol = _epigraph_lp(A, S, c, cols)
        direction = np.zeros(n)
        direction[cols] = sol.primal[:-1]
        value = sol.value + k
        return GradientEval(S, value, direction, _dual_on(S, sol.duals, n), value)

    P = K.positive.A_plus
    max_cuts = max(20, 2 * n) if max_cuts is None else max_cuts
    cuts = []
    for _ in range(max_cuts + 1):
        sol = _epigraph_lp(A, S, c, cols, cuts)
        xhat = sol.primal[:-1]
        g = K.excess(xhat)
        if g <= MEMBERSHIP_TOL:
            break
        grad = 2.0 * P @ (xhat - K.center)
        cuts.append((grad, float(grad @ xhat - g)))
    lower = sol.value + k
    d = xhat - x
    h = x - K.center
    qa, qb, qc = float(d @ P @ d), 2.0 * float(h @ P @ d), min(K.excess(x), 0.0)
    if K.excess(xhat) <= MEMBERSHIP_TOL:
        theta = 1.0
    elif qa <= 1e-15:
        theta = 1.0 if qb <= 0 else min(1.0, -qc / qb)
    else:
        theta = min(1.0, (-qb + np.sqrt(max(qb * qb - 4 * qa * qc, 0.0))) / (2 * qa))
    direction = x + max(theta, 0.0) * d
    value = gradient_D(A, x, direction, tol)
    return GradientEval(S, value, direction, _dual_on(S, sol.duals, n), lower)


# -- line search --------------------------------------------------------------

def line_search(A, x, x_prime, tol: float = SUPPMAX_TOL) -> tuple[float, float]:
    """Exact minimizer of ``f((1-t) x + t x')`` over ``t`` in [0, 1].

    ``max(A x(t))`` is the upper envelope of ``n`` lines and ``x(t)^T A x(t)``
    a parabola, so the minimum sits at an envelope breakpoint, an endpoint, or
    the vertex of one of the per-line parabolas.  All are evaluated.
    """
    A = as_matrix(A)
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if gradient_D(A, x, x_prime, tol) >= 0:
        raise NotDescent("direction does not decrease the regret")
    d = x_prime - x
    a = A @ x
    b = A @ d
    q0 = float(x @ a)
    q1 = float(d @ a + x @ b)
    q2 = float(d @ b)

    cands = [np.array([0.0, 1.0])]
    da = a[None, :] - a[:, None]
    db = b[:, None] - b[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = da / db
    cands.append(cross[np.isfinite(cross) & (cross > 0) & (cross < 1)])
    if q2 < 0:
        cands.append((b - q1) / (2.0 * q2))
    t = np.concatenate(cands)
    t = np.unique(t[(t >= 0) & (t <= 1)])
    vals = (a[None, :] + t[:, None] * b[None, :]).max(axis=1) - (q0 + q1 * t + q2 * t * t)
    best = int(np.argmin(vals))
    step = float(t[best])
    x_new = (1.0 - step) * x + step * x_prime
    return step, regret_f(A, x_new)


# -- iteration ----------------------------------------------------------------

@dataclass
class StationaryResult:
    x_star: np.ndarray
    w_star: np.ndarray
    f_x: float
    f_w: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    S: tuple = ()
    subproblem_value: float = 0.0
    region: object = None
    start: Optional[np.ndarray] = None


def _clean(x):
    x = np.maximum(x, 0.0)
    return x / x.sum()


def support_polish(A, x, f, K=None):
    """Project ``x`` onto the affine set where the near-best payoffs tie.

    Near a degenerate equilibrium the LP directions zigzag; solving the
    equal-payoff system on guessed supports usually lands on it directly.
    Several support guesses are tried and the lowest-regret nonnegative
    candidate inside ``K`` is returned as ``(f, y)``, or None.
    """
    n = x.size
    Ax = A @ x
    f = max(f, 0.0)
    root = np.sqrt(f)
    best = None
    for tau in sorted({1e-12, f, 10 * f, root}):
        T = np.flatnonzero(x > tau)
        if T.size == 0:
            continue
        for stol in sorted({SUPPMAX_TOL, 10 * f, root}):
            S = np.flatnonzero(Ax >= Ax.max() - stol)
            k = T.size
            M = np.zeros((S.size + 1, k + 1))
            M[:S.size, :k] = A[np.ix_(S, T)]
            M[:S.size, k] = -1.0
            M[S.size, :k] = 1.0
            rhs = np.zeros(S.size + 1)
            rhs[S.size] = 1.0
            z0 = np.append(x[T], Ax[S].mean())
            z = z0 + np.linalg.pinv(M) @ (rhs - M @ z0)
            y = np.zeros(n)
            y[T] = z[:k]
            if y.min() < 0 or y.sum() <= 0:
                continue
            y /= y.sum()
            if K is not None and not K.contains(y):
                continue
            fy = regret_f(A, y)
            if best is None or fy < best[0]:
                best = (fy, y)
    return best


def find_stationary(A, x0, K: Optional[ConstraintRegion] = None,
                    delta_stat: float = DELTA_STAT,
                    max_iter: Optional[int] = None,
                    tol: float = SUPPMAX_TOL,
                    polish: bool = True) -> StationaryResult:
    """Iterate LP direction + exact line search until ``D`` is nonnegative
    to within ``delta_stat`` over ``K``.

    With ``polish`` each step is followed by ``support_polish``, kept only if
    it lowers the regret further.  Non-convergence is reported in the
    ``converged`` flag, never raised.
    """
    A = as_matrix(A)
    n = A.shape[0]
    K = FullSimplex() if K is None else K
    x = np.asarray(x0, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch("start point does not match the game dimension")
    if np.any(x < -MEMBERSHIP_TOL) or abs(x.sum() - 1.0) > 1e-9:
        raise ValueError("start point is not a probability vector")
    x = _clean(x)
    if not K.contains(x):
        raise ValueError("start point lies outside the constraint region")
    max_iter = 10 * n * n if max_iter is None else max_iter

    f = regret_f(A, x)
    trace = [f]
    converged = False
    steps = 0
    while True:
        ge = direction_subproblem(A, x, K, tol)
        if ge.lower_bound >= -delta_stat:
            converged = True
            break
        if steps >= max_iter or ge.value >= 0:
            break
        step, _ = line_search(A, x, ge.minimizing_direction, tol)
        x_new = _clean((1.0 - step) * x + step * ge.minimizing_direction)
        f_new = regret_f(A, x_new)
        if polish:
            better = support_polish(A, x_new, f_new, K)
            if better is not None and better[0] < f_new:
                f_new, x_new = better
        if not f_new < f:
            break
        x, f = x_new, f_new
        trace.append(f)
        steps += 1

    w = ge.dual
    return StationaryResult(
        x_star=x, w_star=w, f_x=f, f_w=regret_f(A, w), iterations=steps,
        converged=converged, trace=trace, S=ge.S,
        subproblem_value=ge.lower_bound, region=K, start=np.asarray(x0, dtype=float))


# -- certificates -------------------------------------------------------------

CHECKS = (
    "stationarity_max",      # D over S(x*) is nonnegative in every direction
    "stationarity_dual",     # same with w* in place of the max over S(x*)
    "local_quadratic_bound",  # f(x*) - f(x) + (max - max_S)(Ax) <= (x-x*)A(x-x*)
    "dual_quadratic_bound",  # f(x*) <= (w*-x*)A(w*-x*)
    "dual_regret_bound",     # 2 f(x*) + f(w*) <= max(Aw*) - x* A w*
    "one_third",             # min(f(x*), f(w*)) <= 1/3
    "dual_support",          # supp(w*) within suppmax(Ax*)
)


@dataclass
class CertificateReport:
    excess: dict
    witnesses: dict
    tol: float
    points: int

    @property
    def ok(self) -> bool:
        return all(v <= self.tol for v in self.excess.values())

    def passed(self) -> dict:
        return {k: bool(v <= self.tol) for k, v in self.excess.items()}


def _test_points(n, sample_count, seed, region):
    rng = np.random.default_rng(seed)
    if isinstance(region, SupportFace):
        cols = list(region.support)
        pts = np.zeros((len(cols) + sample_count, n))
        pts[np.arange(len(cols)), cols] = 1.0
        pts[len(cols):, cols] = rng.dirichlet(np.ones(len(cols)), sample_count)
        return pts
    pts = np.vstack([np.eye(n), rng.dirichlet(np.ones(n), sample_count)])
    if isinstance(region, SpectralBall):
        # pull every point towards the centre until it enters the ball
        out = []
        for p in pts:
            theta = 1.0
            while not region.contains(region.center + theta * (p - region.center)):
                theta *= 0.5
            out.append(region.center + theta * (p - region.center))
        pts = np.array(out)
    return pts


def certify_stationarity(A, r: StationaryResult, sample_count: int = 50,
                         seed: int = 0, tol: float = DELTA_CERT,
                         raise_on_violation: bool = True) -> CertificateReport:
    """Re-check the stationarity inequalities at ``r`` on the simplex vertices
    plus ``sample_count`` random points.

    Only the checks that hold over the result's region are evaluated; the
    dual-vector bounds need the unconstrained simplex.
    """
    A = as_matrix(A)
    n = A.shape[0]
    x, w = r.x_star, r.w_star
    region = r.region if r.region is not None else FullSimplex()
    S = list(r.S) if r.S else list(suppmax(A @ x))
    Ax, Aw = A @ x, A @ w
    fx = regret_f(A, x)
    fw = regret_f(A, w)
    xAx = float(x @ Ax)

    P = _test_points(n, sample_count, seed, region)
    AP = P @ A.T                   # rows are A p
    PAx = P @ Ax                   # p^T A x*
    xAP = AP @ x                   # x*^T A p
    pAp = np.einsum("ij,ij->i", P, AP)
    maxS = AP[:, S].max(axis=1)
    maxAll = AP.max(axis=1)
    quad = pAp - PAx - xAP + xAx   # (p - x*)^T A (p - x*)

    excess, witness = {}, {}

    def record(name, values):
        i = int(np.argmax(values))
        excess[name] = float(max(values[i], 0.0))
        witness[name] = P[i].tolist()

    record("stationarity_max", -(maxS - xAP - PAx + xAx - fx))
    supp = np.ones(n, dtype=bool)
    supp[S] = False
    excess["dual_support"] = float(w[supp].sum())
    witness["dual_support"] = w.tolist()
    if isinstance(region, (FullSimplex, SupportFace)):
        record("stationarity_dual", -(AP @ w - xAP - PAx + xAx - fx))
    if isinstance(region, FullSimplex):
        record("local_quadratic_bound", fx - (maxAll - pAp) + (maxAll - maxS) - quad)
        d = w - x
        excess["dual_quadratic_bound"] = float(max(fx - d @ A @ d, 0.0))
        excess["dual_regret_bound"] = float(max(2 * fx + fw - (Aw.max() - x @ Aw), 0.0))
        excess["one_third"] = float(max(min(fx, fw) - 1.0 / 3.0, 0.0))

    report = CertificateReport(excess, witness, tol, P.shape[0])
    if raise_on_violation and not report.ok:
        name = max(excess, key=excess.get)
        raise CertificateViolation(name, excess[name], witness.get(name))
    return report


@dataclass(frozen=True)
class PairwiseReport:
    ok: bool
    gap: float
    quadratic: float
    spectral: Optional[float]


def pairwise_bound_check(A, r1: StationaryResult, r2: StationaryResult,
                         positive: Optional[PositivePart] = None,
                         tol: float = DELTA_CERT) -> PairwiseReport:
    """``|f(x1) - f(x2)|`` against ``(x1-x2) A (x1-x2)`` and, given the
    positive part, against half the squared spectral distance."""
    A = as_matrix(A)
    d = r1.x_star - r2.x_star
    gap = abs(regret_f(A, r1.x_star) - regret_f(A, r2.x_star))
    quad = float(d @ A @ d)
    ok = gap <= quad + tol
    spec = None
    if positive is not None:
        spec = 0.5 * float(d @ positive.A_plus @ d)
        ok = ok and gap <= spec + tol
    return PairwiseReport(bool(ok), gap, quad, spec)

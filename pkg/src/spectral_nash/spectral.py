"""Spectral decomposition of ``A + A^T`` and the geometry of its positive part."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, sqrt

import numpy as np

from .errors import (BoundViolation, ConvergenceFailure, DimensionMismatch,
                     EmptyPositiveSpectrum, NotSymmetric, NumericalError,
                     TooLarge)
from .games import as_matrix

SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
SIGN_TOL = 1e-10
PINV_CUTOFF = 1e-10
COVERING_CAP = 2_000_000


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and matching orthonormal eigenvectors.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``.  ``m`` counts the
    eigenvalues above ``threshold``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    m: int
    threshold: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def positive(self) -> np.ndarray:
        return self.eigenvalues[:self.m]

    @property
    def xi(self) -> float:
        return xi_value(self, self.n)

    def reconstruct(self) -> np.ndarray:
        Z = self.eigenvectors
        return (Z * self.eigenvalues) @ Z.T


def _jacobi(M, tol, max_sweeps):
    a = np.array(M, dtype=float)
    n = a.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), V
    negligible = 1e-18 * scale
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            return np.diag(a).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= negligible:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e100:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")


def eig_sym(M, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Each eigenvector is signed so that its first non-negligible entry is
    positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {M.shape}")
    if np.abs(M - M.T).max(initial=0.0) > SYMMETRY_TOL:
        raise NotSymmetric("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    vals, vecs = _jacobi(M, tol, max_sweeps)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        nz = np.flatnonzero(np.abs(vecs[:, i]) > SIGN_TOL)
        if nz.size and vecs[nz[0], i] < 0:
            vecs[:, i] = -vecs[:, i]
    threshold = 1e-9 * max(1.0, vals[0] if vals.size else 0.0)
    m = int(np.sum(vals > threshold))
    return Spectrum(vals, vecs, m, threshold)


def spectrum_of(A) -> Spectrum:
    """Spectrum of the symmetrized matrix ``A + A^T``."""
    A = as_matrix(A)
    return eig_sym(A + A.T)


def xi_value(s: Spectrum, n: int) -> float:
    return float(s.positive.sum() / n)


def check_spectrum(M, s: Spectrum, recon_tol=1e-8, ortho_tol=1e-10):
    """Reconstruction error, orthonormality defect and trace of ``s``.

    Raises NumericalError when the first two exceed their tolerances.
    """
    M = np.asarray(M, dtype=float)
    recon = float(np.abs(M - s.reconstruct()).max(initial=0.0))
    Z = s.eigenvectors
    ortho = float(np.abs(Z.T @ Z - np.eye(s.n)).max(initial=0.0))
    if recon > recon_tol:
        raise NumericalError(f"reconstruction error {recon:.3e}")
    if ortho > ortho_tol:
        raise NumericalError(f"orthonormality error {ortho:.3e}")
    return {"reconstruction": recon, "orthonormality": ortho,
            "eigenvalue_sum": float(s.eigenvalues.sum()),
            "trace": float(np.trace(M))}


def regret_from_spectrum(A, s: Spectrum, x) -> float:
    """The regret expressed through the eigenpairs of ``A + A^T``."""
    A = as_matrix(A)
    x = np.asarray(x, dtype=float)
    proj = s.eigenvectors.T @ x
    lam = s.eigenvalues
    pos = lam[:s.m] @ proj[:s.m] ** 2
    neg = np.abs(lam[s.m:]) @ proj[s.m:] ** 2
    return float((A @ x).max() + 0.5 * neg - 0.5 * pos)


@dataclass(frozen=True)
class PositivePart:
    """``A_plus = sum_i lambda_i z_i z_i^T`` over the positive eigenvalues."""

    A_plus: np.ndarray
    lambdas: np.ndarray
    Z: np.ndarray

    @classmethod
    def from_spectrum(cls, s: Spectrum) -> "PositivePart":
        lam = s.positive
        Z = s.eigenvectors[:, :s.m]
        return cls((Z * lam) @ Z.T, lam, Z)

    @property
    def n(self) -> int:
        return self.A_plus.shape[0]


def metric_d2(p: PositivePart, a, b, tol: float = 1e-10) -> float:
    """Squared distance in the positive eigenspace.

    Evaluated both as an eigen-sum and as a quadratic form; the two must agree.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (p.n,) or b.shape != (p.n,):
        raise DimensionMismatch("vectors do not match the matrix dimension")
    d = a - b
    eig_form = float(p.lambdas @ (p.Z.T @ d) ** 2)
    quad_form = float(d @ p.A_plus @ d)
    if abs(eig_form - quad_form) > tol * max(1.0, eig_form):
        raise NumericalError(
            f"metric forms disagree: {eig_form!r} vs {quad_form!r}")
    return max(eig_form, 0.0)


def project_pm(s: Spectrum, x) -> np.ndarray:
    if s.m == 0:
        raise EmptyPositiveSpectrum("no positive eigenvalues; the regret is convex")
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,):
        raise DimensionMismatch("vector does not match the spectrum dimension")
    return s.eigenvectors[:, :s.m].T @ x


def shifted_matrix(p: PositivePart, y) -> np.ndarray:
    """``(I - e y^T) A_plus (I - y e^T)``: for probability vectors ``x`` its
    quadratic form equals ``d^2(x, y)``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (p.n,):
        raise DimensionMismatch("vector does not match the matrix dimension")
    n = p.n
    L = np.eye(n) - np.outer(np.ones(n), y)
    return L @ p.A_plus @ L.T


def shifted_trace_audit(p: PositivePart, y) -> dict:
    """Compare ``tr(A'_plus)`` with ``tr(A_plus)``; ``ok`` is False on excess."""
    t_shift = float(np.trace(shifted_matrix(p, y)))
    t_plus = float(p.lambdas.sum())
    return {"shifted_trace": t_shift, "positive_trace": t_plus,
            "ok": t_shift <= t_plus + 1e-9}


def trace_chain_audit(p: PositivePart, y, k: int) -> dict:
    """Averaging link behind the covering radius.

    Over all supports ``S`` of size ``k`` the mean of ``tr(G_S) / k`` is
    ``tr(G) / n`` for ``G = shifted_matrix(p, y)``, so the smallest ratio is
    at most ``tr(G) / n``.  Also reports ``tr(G) / m`` for comparison.
    """
    G = shifted_matrix(p, y)
    n = p.n
    if not 1 <= k <= n:
        raise ValueError(f"support size {k} outside [1, {n}]")
    diag = np.diag(G)
    # the k smallest diagonal entries give the smallest face trace
    best = float(np.sort(diag)[:k].sum() / k)
    tr = float(diag.sum())
    m = p.lambdas.size
    return {"min_face_ratio": best, "trace_over_n": tr / n,
            "trace_over_m": tr / m if m else None,
            "ok": best <= tr / n + 1e-12}


def _face_minima(G, subsets):
    """Minimize ``x^T G x`` over the simplex restricted to each index set.

    Solves the equality-constrained KKT system of every set at once with a
    pseudo-inverse; for an invertible block this is the closed form
    ``x = G^-1 e / (e^T G^-1 e)`` with value ``1 / (e^T G^-1 e)``.  Results
    with negative weights are discarded: their faces are covered by the
    smaller sets that are enumerated alongside.
    """
    idx = np.asarray(subsets)
    B, k = idx.shape
    blocks = G[idx[:, :, None], idx[:, None, :]]
    kkt = np.zeros((B, k + 1, k + 1))
    kkt[:, :k, :k] = 2.0 * blocks
    kkt[:, :k, k] = 1.0
    kkt[:, k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.pinv(kkt, rcond=PINV_CUTOFF) @ rhs
    x = sol[:, :k]
    resid = np.abs(np.einsum("bij,bj->bi", kkt, sol) - rhs).max(axis=1)
    feasible = (x.min(axis=1) >= -1e-12) & (resid <= 1e-8)
    x = np.maximum(x, 0.0)
    x /= x.sum(axis=1, keepdims=True)
    vals = np.einsum("bi,bij,bj->b", x, blocks, x)
    vals[~feasible] = np.inf
    return vals, x


def face_minimum(G, support) -> tuple[float, np.ndarray]:
    """Exact minimum of ``x^T G x`` over probability vectors supported on
    ``support`` (G positive semidefinite).  Returns ``(value, x)`` with ``x``
    of full length."""
    G = np.asarray(G, dtype=float)
    support = sorted(support)
    best_val, best_x = np.inf, None
    for size in range(1, len(support) + 1):
        subs = list(itertools.combinations(support, size))
        vals, xs = _face_minima(G, subs)
        i = int(np.argmin(vals))
        if vals[i] < best_val - 1e-15:
            best_val = float(vals[i])
            best_x = np.zeros(G.shape[0])
            best_x[list(subs[i])] = xs[i]
    return max(best_val, 0.0), best_x


@dataclass(frozen=True)
class CoveringResult:
    min_d2: float
    bound: float
    ok: bool
    support: tuple
    x: np.ndarray


def covering_check(p: PositivePart, s: Spectrum, y, eps: float,
                   cap: int = COVERING_CAP) -> CoveringResult:
    """Distance from ``y`` to the nearest point with support at most ``1/eps``.

    Every support of size up to ``k = 1/eps`` is enumerated exactly and
    compared with the covering radius ``eps * xi``.
    """
    k = int(round(1.0 / eps))
    if abs(k * eps - 1.0) > 1e-9 or k < 1:
        raise ValueError(f"1/eps must be an integer, got eps={eps!r}")
    n = p.n
    k = min(k, n)
    total = sum(comb(n, j) for j in range(1, k + 1))
    if total > cap:
        raise TooLarge(f"{total} supports exceed the enumeration cap {cap}")
    G = shifted_matrix(p, y)
    G = 0.5 * (G + G.T)
    best_val, best_sub, best_x = np.inf, None, None
    for size in range(1, k + 1):
        subs = list(itertools.combinations(range(n), size))
        vals, xs = _face_minima(G, subs)
        i = int(np.argmin(vals))
        if vals[i] < best_val - 1e-15:
            best_val, best_sub = float(vals[i]), subs[i]
            best_x = np.zeros(n)
            best_x[list(subs[i])] = xs[i]
    best_val = max(best_val, 0.0)
    bound = eps * xi_value(s, n)
    return CoveringResult(best_val, bound, best_val <= bound + 1e-9,
                          best_sub, best_x)


@dataclass(frozen=True)
class SqrtBoundReport:
    xi: float
    sqrt_m: float
    sum_positive_sq: float
    sum_squares: float
    edge_count: int
    links: dict


def sqrt_m_bound_check(s: Spectrum, edge_count: int) -> SqrtBoundReport:
    """Verify ``xi <= sqrt(m)`` together with the inequality chain behind it.

    Raises BoundViolation naming the first failing link.
    """
    n, m = s.n, s.m
    lam = s.eigenvalues
    pos = s.positive
    sum_pos = float(pos.sum())
    sum_pos_sq = float(pos @ pos)
    sum_sq = float(lam @ lam)
    xi = sum_pos / n
    links = {
        "xi <= sqrt(m)": (xi, sqrt(m) + 1e-9),
        "(sum pos)^2 <= m * sum pos^2": (sum_pos ** 2, m * sum_pos_sq + 1e-9),
        "m * sum pos^2 <= m * sum all^2": (m * sum_pos_sq, m * sum_sq + 1e-9),
        "m * sum all^2 <= m * n^2": (m * sum_sq, m * n * n + 1e-9),
    }
    for name, (lhs, rhs) in links.items():
        if lhs > rhs:
            raise BoundViolation(name, lhs, rhs)
    if abs(sum_sq - 2 * edge_count) > 1e-6:
        raise BoundViolation("sum of squares == 2|E|", sum_sq, 2 * edge_count)
    return SqrtBoundReport(xi, sqrt(m), sum_pos_sq, sum_sq, edge_count,
                           {k: [float(a), float(b)] for k, (a, b) in links.items()})

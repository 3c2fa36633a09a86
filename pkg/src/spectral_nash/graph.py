"""Induced graphs of win-lose games: property checks, components, bipartiteness."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import PerronViolation
from .games import SymmetricGame, as_matrix
from .spectral import Spectrum, eig_sym

PERRON_TOL = 1e-8


@dataclass(frozen=True)
class InducedGraph:
    """Directed edges run from a row to a column of the game matrix."""

    n: int
    directed_edges: frozenset
    undirected_adjacency: np.ndarray

    @classmethod
    def from_matrix(cls, A) -> "InducedGraph":
        A = as_matrix(A)
        edges = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(A)))
        U = ((A != 0) | (A.T != 0)).astype(float)
        np.fill_diagonal(U, 0.0)
        return cls(A.shape[0], edges, U)

    @property
    def edge_count(self) -> int:
        return int(np.triu(self.undirected_adjacency, 1).sum())


class Violation(NamedTuple):
    prop: int
    detail: str


def connected_components(adj) -> list[list[int]]:
    """Components of the undirected pattern of ``adj``, sorted by first node."""
    adj = np.asarray(adj)
    n = adj.shape[0]
    pattern = (adj != 0) | (adj.T != 0)
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        comp, queue = [], deque([start])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in np.flatnonzero(pattern[u] & ~seen):
                seen[v] = True
                queue.append(int(v))
        comps.append(sorted(comp))
    return comps


def validate_winlose(A) -> list[Violation]:
    """All breaches of the five standing win-lose assumptions (empty if none)."""
    A = as_matrix(A)
    n = A.shape[0]
    out = []
    if not np.all((A == 0) | (A == 1)):
        out.append(Violation(1, "entries outside {0,1}"))
    for j in np.flatnonzero(~(A == 1).any(axis=0)):
        out.append(Violation(1, f"column {j} has no 1"))
    for i in np.flatnonzero(np.diag(A) != 0):
        out.append(Violation(2, f"nonzero diagonal entry at {i}"))
    both = np.argwhere(np.triu((A == 1) & (A.T == 1), 1))
    for i, j in both:
        out.append(Violation(3, f"A[{i},{j}] and A[{j},{i}] are both 1"))
    rows = A == 1
    for i in range(n):
        for k in range(n):
            if i != k and not np.any(rows[i] & ~rows[k]):
                out.append(Violation(4, f"neighbors of row {i} lie within those of row {k}"))
                break
    if len(connected_components(A)) > 1:
        out.append(Violation(5, "undirected graph is disconnected"))
    return out


class Component(NamedTuple):
    nodes: list
    game: SymmetricGame


def decompose(A) -> list[Component]:
    A = as_matrix(A)
    comps = []
    for nodes in connected_components(A):
        sub = A[np.ix_(nodes, nodes)]
        comps.append(Component(nodes, SymmetricGame.from_matrix(sub, check_dominance=False)))
    return comps


def lift(x_sub, nodes, n: int) -> np.ndarray:
    x = np.zeros(n)
    x[list(nodes)] = x_sub
    return x


class BipartiteReport(NamedTuple):
    bipartite: bool
    partition: Optional[tuple]
    spectrum_symmetric: Optional[bool]


def is_bipartite(g: InducedGraph, s: Optional[Spectrum] = None) -> BipartiteReport:
    """Two-color the undirected graph; on success audit spectral symmetry."""
    U = g.undirected_adjacency
    color = -np.ones(g.n, dtype=int)
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(U[u]):
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(int(v))
                elif color[v] == color[u]:
                    return BipartiteReport(False, None, None)
    if s is None:
        s = eig_sym(U)
    lam = s.eigenvalues
    symmetric = bool(np.all(np.abs(lam + lam[::-1]) <= 1e-8))
    part = (tuple(np.flatnonzero(color == 0).tolist()),
            tuple(np.flatnonzero(color == 1).tolist()))
    return BipartiteReport(True, part, symmetric)


@dataclass(frozen=True)
class PerronReport:
    lambda1: float
    dominant: bool
    connected: bool
    simple: Optional[bool]
    positive_vector: Optional[bool]


def perron_check(g: InducedGraph, s: Spectrum) -> PerronReport:
    """Check the Perron-Frobenius facts about ``s``; for connected graphs the
    top eigenvalue must be simple with a strictly positive eigenvector."""
    lam = s.eigenvalues
    lam1 = float(lam[0])
    if lam1 < -PERRON_TOL or lam1 < abs(lam[-1]) - PERRON_TOL:
        raise PerronViolation(f"top eigenvalue {lam1} is not dominant")
    connected = len(connected_components(g.undirected_adjacency)) == 1
    simple = positive = None
    if connected and g.n > 1:
        simple = bool(lam1 - lam[1] > PERRON_TOL)
        positive = bool(np.all(s.eigenvectors[:, 0] > 0))
        if not simple:
            raise PerronViolation("top eigenvalue of a connected graph is repeated")
        if not positive:
            raise PerronViolation("Perron vector of a connected graph has a nonpositive entry")
    return PerronReport(lam1, True, connected, simple, positive)

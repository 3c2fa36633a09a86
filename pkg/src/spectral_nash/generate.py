"""Random instance generators.

Win-lose instances start from a random simple digraph (each unordered pair
gets no edge with probability ``1 - p``, otherwise one of its two directions)
and are then repaired by edge insertion until the five standing properties
hold.  When a neighbour-set inclusion has no free pair to insert, an
existing edge is reversed instead (on every other attempt, since
reversals can also cycle).  After ten failed attempts the sampling density
is lowered geometrically.  Connectivity is repaired last in every
pass.
"""

from __future__ import annotations

import numpy as np

from .errors import GenerationFailure
from .games import BimatrixGame
from .graph import connected_components, validate_winlose

MAX_ATTEMPTS = 100
DENSE_RETRIES = 10


def _allowed_pairs(n, bipartite):
    allowed = ~np.eye(n, dtype=bool)
    if bipartite:
        side = np.zeros(n, dtype=bool)
        side[n // 2:] = True
        allowed &= side[:, None] != side[None, :]
    return allowed


def _can_add(A, allowed, i, j):
    return allowed[i, j] and A[i, j] == 0 and A[j, i] == 0


def _repair_pass(A, allowed, rng, flip_ok):
    n = A.shape[0]
    rows = A == 1
    for j in range(n):
        if not rows[:, j].any():
            cand = [i for i in range(n) if _can_add(A, allowed, i, j)]
            if not cand:
                return False
            A[rng.choice(cand), j] = 1
            rows = A == 1
    for i in range(n):
        for k in range(n):
            if i != k and not np.any(rows[i] & ~rows[k]):
                cand = [j for j in range(n)
                        if not rows[k, j] and _can_add(A, allowed, i, j)]
                if cand:
                    A[i, rng.choice(cand)] = 1
                else:
                    # no free pair left: reverse an edge j -> i instead
                    flip = [j for j in range(n)
                            if flip_ok and not rows[k, j] and A[j, i] == 1]
                    if not flip:
                        return False
                    j = rng.choice(flip)
                    A[j, i], A[i, j] = 0, 1
                rows = A == 1
                break
    comps = connected_components(A)
    while len(comps) > 1:
        first, other = comps[0], comps[int(rng.integers(1, len(comps)))]
        pairs = [(u, v) for u in first for v in other
                 if allowed[u, v] and A[u, v] == 0 and A[v, u] == 0]
        if not pairs:
            return False
        u, v = pairs[int(rng.integers(len(pairs)))]
        if rng.random() < 0.5:
            u, v = v, u
        A[u, v] = 1
        comps = connected_components(A)
    return True


def random_winlose(n: int, p: float = 0.5, seed=None, bipartite: bool = False) -> np.ndarray:
    """A random win-lose matrix satisfying all five standing properties.

    Raises GenerationFailure when repair keeps failing (for example ``n = 2``,
    where the properties cannot hold simultaneously).  Bipartite instances
    split the nodes into halves of sizes ``n // 2`` and ``n - n // 2``; for
    ``n`` in {3, 5, 7} the larger side cannot have pairwise incomparable
    neighbour sets, so those sizes always fail.
    """
    if not 0 < p < 1:
        raise ValueError("edge probability must lie strictly between 0 and 1")
    if n < 2:
        raise ValueError("need at least two strategies")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    allowed = _allowed_pairs(n, bipartite)
    for attempt in range(MAX_ATTEMPTS):
        A = np.zeros((n, n))
        iu, ju = np.nonzero(np.triu(allowed, 1))
        # dense samples can be beyond repair by insertion; thin them out
        # once the first attempts have failed
        q = p if attempt < DENSE_RETRIES else p * 0.8 ** (attempt - DENSE_RETRIES + 1)
        present = rng.random(iu.size) < q
        flip = rng.random(iu.size) < 0.5
        for i, j, e, f in zip(iu, ju, present, flip):
            if e:
                A[(j, i) if f else (i, j)] = 1
        for _ in range(4 * n):
            if not _repair_pass(A, allowed, rng, flip_ok=attempt % 2 == 1):
                break
            if not validate_winlose(A):
                return A
    raise GenerationFailure(f"could not repair a valid {n}-node win-lose game")


def random_bimatrix(l1: int, l2: int = None, seed=None) -> BimatrixGame:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    l2 = l1 if l2 is None else l2
    return BimatrixGame(rng.random((l1, l2)), rng.random((l1, l2)))


def winlose_pool(count: int, n_low: int, n_high: int, seed=0, p: float = 0.5):
    """``count`` valid win-lose matrices with sizes drawn from [n_low, n_high]."""
    rng = np.random.default_rng(seed)
    return [random_winlose(int(rng.integers(n_low, n_high + 1)), p, rng)
            for _ in range(count)]

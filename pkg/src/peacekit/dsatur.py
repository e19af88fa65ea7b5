"""Saturation-degree greedy colouring of a vertex subset."""
from __future__ import annotations

import numba
import numpy as np

from .graph import Graph
from .rng import make_rng

__all__ = ["dsatur_fill", "dsatur_with_restarts"]


@numba.njit(cache=True)
def _dsatur(indptr, indices, col, palette, todo, tiebreak):
    n = col.size
    k = todo.size
    pos = np.full(n, -1, dtype=np.int64)
    for j in range(k):
        pos[todo[j]] = j
    seen = np.zeros((k, palette), dtype=np.uint8)
    sat = np.zeros(k, dtype=np.int64)
    free_deg = np.zeros(k, dtype=np.int64)
    done = np.zeros(k, dtype=np.bool_)
    for j in range(k):
        v = todo[j]
        for a in range(indptr[v], indptr[v + 1]):
            w = indices[a]
            c = col[w]
            if c >= 0:
                if c < palette and seen[j, c] == 0:
                    seen[j, c] = 1
                    sat[j] += 1
            elif pos[w] >= 0:
                free_deg[j] += 1
    for _ in range(k):
        best = -1
        for j in range(k):
            if done[j]:
                continue
            if best < 0 or sat[j] > sat[best] or (
                sat[j] == sat[best]
                and (free_deg[j] > free_deg[best] or (free_deg[j] == free_deg[best] and tiebreak[j] < tiebreak[best]))
            ):
                best = j
        v = todo[best]
        chosen = -1
        for c in range(palette):
            if seen[best, c] == 0:
                chosen = c
                break
        if chosen < 0:
            return False
        # a precoloured neighbour may hold a colour outside the palette
        for a in range(indptr[v], indptr[v + 1]):
            if col[indices[a]] == chosen:
                return False
        col[v] = chosen
        done[best] = True
        for a in range(indptr[v], indptr[v + 1]):
            w = indices[a]
            j = pos[w]
            if j >= 0 and not done[j]:
                free_deg[j] -= 1
                if seen[j, chosen] == 0:
                    seen[j, chosen] = 1
                    sat[j] += 1
    return True


def dsatur_fill(g: Graph, col: np.ndarray, palette: int, todo, rng=None) -> bool:
    """Colour the vertices ``todo`` in place with colours below ``palette``,
    respecting every colour already in ``col``. Returns False (with ``col``
    partly written) when some vertex has no free colour."""
    todo = np.asarray(todo, dtype=np.int64)
    if todo.size == 0:
        return True
    if np.any(col[todo] >= 0):
        raise ValueError("todo contains coloured vertices")
    if rng is None:
        tiebreak = np.arange(todo.size, dtype=np.float64)
    else:
        tiebreak = make_rng(rng).random(todo.size)
    return bool(_dsatur(g.indptr, g.indices, col, int(palette), todo, tiebreak))


def dsatur_with_restarts(g: Graph, col: np.ndarray, palette: int, todo, restarts: int = 10, seed: int = 0) -> np.ndarray | None:
    """Deterministic pass first, then ``restarts`` randomized tie-breaks.
    Returns the filled colour array or None."""
    rng = make_rng(seed)
    for attempt in range(restarts + 1):
        trial = col.copy()
        if dsatur_fill(g, trial, palette, todo, rng=None if attempt == 0 else rng):
            return trial
    return None

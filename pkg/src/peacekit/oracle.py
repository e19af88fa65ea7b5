"""Exhaustive minimum peacefulness for tiny graphs.

Branch and bound over proper colourings. Disturbed counts only grow as more
vertices are coloured, so the running maximum is a valid lower bound.
"""
from __future__ import annotations

import math
import sys

import numpy as np

from .graph import Graph
from .peace import PartialColouring

__all__ = [
    "SearchCapExceeded",
    "NotColourableError",
    "min_peacefulness_exact",
    "certify_no_peaceful",
    "degeneracy_order",
]

DEFAULT_CAP = 10**8


class SearchCapExceeded(RuntimeError):
    pass


class NotColourableError(ValueError):
    pass


def degeneracy_order(g: Graph) -> list[int]:
    """Reverse smallest-last order: every vertex has at most ``degeneracy``
    neighbours earlier in the list."""
    deg = [int(d) for d in g.degree]
    removed = [False] * g.n
    elim = []
    for _ in range(g.n):
        v = min((u for u in range(g.n) if not removed[u]), key=lambda u: (deg[u], u))
        removed[v] = True
        elim.append(v)
        for w in g.neighbours(v):
            if not removed[w]:
                deg[w] -= 1
    return elim[::-1]


class _Search:
    def __init__(self, g: Graph, c: int, symmetry: bool):
        self.g = g
        self.c = c
        self.symmetry = symmetry
        self.order = degeneracy_order(g)
        self.nbrs = [[int(w) for w in g.neighbours(v)] for v in range(g.n)]
        self.cnt = [[0] * c for _ in range(g.n)]
        self.dist = [0] * g.n
        self.col = [-1] * g.n
        self.best = math.inf
        self.best_col: list[int] | None = None
        self.nodes = 0

    def run(self, bound: float) -> None:
        """Find the least peacefulness strictly below ``bound``."""
        self.best = bound
        limit = sys.getrecursionlimit()
        if self.g.n + 50 > limit:
            sys.setrecursionlimit(self.g.n + 100)
        self._go(0, 0, -1)

    def _go(self, k: int, curmax: int, maxcol: int) -> None:
        self.nodes += 1
        if k == len(self.order):
            self.best = curmax
            self.best_col = list(self.col)
            return
        w = self.order[k]
        top = self.c - 1
        if self.symmetry:
            top = min(top, maxcol + 1)
        cnt_w = self.cnt[w]
        for x in range(top + 1):
            if cnt_w[x]:
                continue
            newmax = curmax
            for v in self.nbrs[w]:
                cv = self.cnt[v]
                cv[x] += 1
                if cv[x] == 2:
                    self.dist[v] += 2
                elif cv[x] > 2:
                    self.dist[v] += 1
                if self.dist[v] > newmax:
                    newmax = self.dist[v]
            if newmax < self.best:
                self.col[w] = x
                self._go(k + 1, newmax, max(maxcol, x))
                self.col[w] = -1
            for v in self.nbrs[w]:
                cv = self.cnt[v]
                if cv[x] == 2:
                    self.dist[v] -= 2
                elif cv[x] > 2:
                    self.dist[v] -= 1
                cv[x] -= 1
            if self.best == 0:
                return


def _check_cap(g: Graph, c: int, cap: int) -> None:
    if c < 1 and g.n:
        raise NotColourableError("no colours")
    if g.n and g.n * math.log(max(c, 1)) > math.log(cap) + 1e-12:
        raise SearchCapExceeded(f"{c}^{g.n} states exceeds the cap {cap}")


def min_peacefulness_exact(g: Graph, c: int, *, cap: int = DEFAULT_CAP, symmetry: bool = True) -> tuple[int, PartialColouring]:
    """Least peacefulness over all proper ``c``-colourings, with a witness."""
    _check_cap(g, c, cap)
    if g.n == 0:
        return 0, PartialColouring.empty(0, c)
    s = _Search(g, c, symmetry)
    s.run(math.inf)
    if s.best_col is None:
        raise NotColourableError(f"graph is not {c}-colourable")
    return int(s.best), PartialColouring(np.asarray(s.best_col, dtype=np.int64), c)


def certify_no_peaceful(g: Graph, c: int, p, *, cap: int = DEFAULT_CAP) -> bool:
    """True iff every proper ``c``-colouring has peacefulness above ``p``."""
    _check_cap(g, c, cap)
    if g.n == 0:
        return 0 > p
    s = _Search(g, c, True)
    s.run(math.floor(p) + 1)
    if s.best_col is not None:
        return False
    probe = _Search(g, c, True)
    probe.run(g.delta + 1)
    if probe.best_col is None:
        raise NotColourableError(f"graph is not {c}-colourable")
    return True

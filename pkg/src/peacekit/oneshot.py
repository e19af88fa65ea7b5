"""One-shot random colouring with a large palette.

Every vertex draws a uniform colour, both ends of each monochromatic edge are
uncoloured, and a vertex ``v`` is *bad* when

    U_v < deg(v) - mu*Delta + |N(v) - dom f|.

Bad vertices are repaired Moser-Tardos style by redrawing the colours of
``N(v) + v``; whatever remains uncoloured is then filled greedily.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .graph import Graph
from .peace import Completion, PartialColouring, check_proper, greedy_complete, peace_report
from .rng import hash_uniform, make_rng

__all__ = ["as_fraction", "OneShotParams", "OneShotStats", "OneShotState", "oneshot_colour", "oneshot_palette"]


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read through their shortest repr,
    so ``0.1`` means one tenth; strings such as ``"1/40"`` are parsed."""
    if isinstance(x, (int, Fraction, str)):
        return Fraction(x)
    return Fraction(repr(float(x)))


def oneshot_palette(mu, delta: int) -> int:
    return math.floor(5 * delta / as_fraction(mu))


@dataclass(frozen=True)
class OneShotParams:
    mu: float | Fraction = Fraction(1, 2)
    seed: int = 0
    max_resample_rounds: int = 10_000
    palette_size: int | None = None  # default floor(5 * delta / mu)


@dataclass(frozen=True)
class OneShotStats:
    palette: int
    initial_bad: int
    rounds: int
    residual_bad: int
    best_effort: bool
    peacefulness: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@numba.njit(cache=True)
def _uncolour_conflicts(vertices, indptr, indices, gcol, f):
    for v in vertices:
        f[v] = gcol[v]
        for a in range(indptr[v], indptr[v + 1]):
            if gcol[indices[a]] == gcol[v]:
                f[v] = -1
                break


@numba.njit(cache=True)
def _bad_flags(vertices, indptr, indices, f, count, threshold, bad):
    for v in vertices:
        lo, hi = indptr[v], indptr[v + 1]
        unc = 0
        for a in range(lo, hi):
            c = f[indices[a]]
            if c >= 0:
                count[c] += 1
            else:
                unc += 1
        und = 0
        for a in range(lo, hi):
            c = f[indices[a]]
            if c >= 0 and count[c] == 1:
                und += 1
        for a in range(lo, hi):
            c = f[indices[a]]
            if c >= 0:
                count[c] = 0
        bad[v] = (hi - lo) + unc - und > threshold


@numba.njit(cache=True)
def _ball(v, radius, indptr, indices, stamp, tag):
    out = [v]
    stamp[v] = tag
    start = 0
    for _ in range(radius):
        end = len(out)
        for i in range(start, end):
            u = out[i]
            for a in range(indptr[u], indptr[u + 1]):
                w = indices[a]
                if stamp[w] != tag:
                    stamp[w] = tag
                    out.append(w)
        start = end
    return np.asarray(out, dtype=np.int64)


class OneShotState:
    """Phase 1-3 state: raw draws ``gcol``, the partial colouring ``f`` and
    the bad-vertex flags."""

    def __init__(self, g: Graph, palette: int, mu, key: int):
        self.g = g
        self.palette = palette
        self.key = key
        self.threshold = math.floor(as_fraction(mu) * g.delta)
        self.round = 0
        rng = make_rng(key)
        self.gcol = rng.integers(0, palette, size=g.n).astype(np.int64)
        self.f = np.empty(g.n, dtype=np.int64)
        self.bad = np.zeros(g.n, dtype=np.bool_)
        self._count = np.zeros(palette, dtype=np.int64)
        self._stamp = np.zeros(g.n, dtype=np.int64)
        allv = np.arange(g.n, dtype=np.int64)
        _uncolour_conflicts(allv, g.indptr, g.indices, self.gcol, self.f)
        _bad_flags(allv, g.indptr, g.indices, self.f, self._count, self.threshold, self.bad)

    def partial(self) -> PartialColouring:
        return PartialColouring(self.f.copy(), self.palette)

    def bad_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.bad)

    def resample(self, v: int) -> None:
        """Redraw the colours of ``N(v) + v`` and refresh every quantity that
        can depend on them (``f`` within distance 2, flags within 3)."""
        self.round += 1
        g = self.g
        targets = _ball(v, 1, g.indptr, g.indices, self._stamp, 3 * self.round)
        for u in targets:
            x = hash_uniform(self.key, self.round, int(u), 0)
            self.gcol[u] = min(int(x * self.palette), self.palette - 1)
        ring2 = _ball(v, 2, g.indptr, g.indices, self._stamp, 3 * self.round + 1)
        _uncolour_conflicts(ring2, g.indptr, g.indices, self.gcol, self.f)
        ring3 = _ball(v, 3, g.indptr, g.indices, self._stamp, 3 * self.round + 2)
        _bad_flags(ring3, g.indptr, g.indices, self.f, self._count, self.threshold, self.bad)


def oneshot_colour(g: Graph, params: OneShotParams = OneShotParams()) -> tuple[PartialColouring, OneShotStats]:
    if g.delta < 2:
        raise ValueError("one-shot colouring needs maximum degree at least 2")
    palette = params.palette_size if params.palette_size is not None else oneshot_palette(params.mu, g.delta)
    if palette < g.delta + 1:
        raise ValueError(f"palette {palette} below delta + 1; decrease mu")
    state = OneShotState(g, palette, params.mu, params.seed)
    check_proper(g, state.partial())
    initial_bad = int(state.bad.sum())
    while state.round < params.max_resample_rounds:
        bad = state.bad_vertices()
        if bad.size == 0:
            break
        state.resample(int(bad[0]))
    residual = int(state.bad.sum())
    done: Completion = greedy_complete(g, state.partial(), p=as_fraction(params.mu) * g.delta)
    colouring = done.colouring
    stats = OneShotStats(
        palette=palette,
        initial_bad=initial_bad,
        rounds=state.round,
        residual_bad=residual,
        best_effort=residual > 0,
        peacefulness=peace_report(g, colouring).peacefulness,
    )
    return colouring, stats

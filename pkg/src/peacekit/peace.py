"""Partial colourings, the peacefulness verifier and greedy completion."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np

from .graph import Graph, is_clique

__all__ = [
    "PartialColouring",
    "PeaceReport",
    "Completion",
    "ImproperColouringError",
    "check_proper",
    "peace_report",
    "is_p_peaceful",
    "greedy_complete",
    "completion_violations",
    "smallest_free_colour",
    "save_colouring",
    "load_colouring",
]

UNCOLOURED = -1


class ImproperColouringError(ValueError):
    """An edge has both endpoints coloured identically."""

    def __init__(self, u: int, v: int, colour: int):
        super().__init__(f"edge ({u}, {v}) is monochromatic with colour {colour}")
        self.edge = (u, v)
        self.colour = colour


@dataclass(frozen=True, eq=False)
class PartialColouring:
    """Vertex colours in ``[0, palette)``; ``-1`` marks an uncoloured vertex."""

    colours: np.ndarray
    palette: int

    def __post_init__(self):
        c = np.array(self.colours, dtype=np.int64, copy=True).reshape(-1)
        if c.size and (c.min() < UNCOLOURED or c.max() >= self.palette):
            raise ValueError(f"colour outside [0, {self.palette})")
        c.setflags(write=False)
        object.__setattr__(self, "colours", c)
        object.__setattr__(self, "palette", int(self.palette))

    @classmethod
    def empty(cls, n: int, palette: int) -> "PartialColouring":
        return cls(np.full(n, UNCOLOURED, dtype=np.int64), palette)

    @classmethod
    def from_list(cls, colours: Sequence[int | None], palette: int) -> "PartialColouring":
        return cls(np.array([UNCOLOURED if c is None else c for c in colours], dtype=np.int64), palette)

    @property
    def n(self) -> int:
        return int(self.colours.size)

    @property
    def domain(self) -> np.ndarray:
        return self.colours >= 0

    @property
    def is_total(self) -> bool:
        return bool(np.all(self.colours >= 0))

    def colours_used(self) -> int:
        c = self.colours[self.colours >= 0]
        return int(np.unique(c).size)

    def to_list(self) -> list[int | None]:
        return [None if c < 0 else int(c) for c in self.colours]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialColouring):
            return NotImplemented
        return self.palette == other.palette and np.array_equal(self.colours, other.colours)

    __hash__ = None

    def to_json(self) -> dict:
        return {"palette": self.palette, "colours": self.to_list()}

    @classmethod
    def from_json(cls, data: dict) -> "PartialColouring":
        return cls.from_list(data["colours"], data["palette"])


def save_colouring(f: PartialColouring, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(f.to_json(), fh, separators=(",", ":"))
        fh.write("\n")


def load_colouring(path) -> PartialColouring:
    with open(path, encoding="utf-8") as fh:
        return PartialColouring.from_json(json.load(fh))


@numba.njit(cache=True)
def _first_conflict(n, indptr, indices, col):
    for u in range(n):
        cu = col[u]
        if cu < 0:
            continue
        for a in range(indptr[u], indptr[u + 1]):
            v = indices[a]
            if v > u and col[v] == cu:
                return u, v
    return -1, -1


def check_proper(g: Graph, f: PartialColouring) -> None:
    if f.n != g.n:
        raise ValueError(f"colouring has {f.n} entries for a graph on {g.n} vertices")
    u, v = _first_conflict(g.n, g.indptr, g.indices, f.colours)
    if u >= 0:
        raise ImproperColouringError(int(u), int(v), int(f.colours[u]))


@dataclass(frozen=True, eq=False)
class PeaceReport:
    """Per-vertex neighbourhood counts.

    ``undisturbed[v]`` counts coloured neighbours whose colour appears once in
    ``N(v)``, ``disturbed[v]`` coloured neighbours whose colour repeats, and
    ``uncoloured_neighbours[v]`` the rest.
    """

    undisturbed: np.ndarray
    disturbed: np.ndarray
    uncoloured_neighbours: np.ndarray

    @property
    def peacefulness(self) -> int:
        return int(self.disturbed.max()) if self.disturbed.size else 0

    def to_json(self) -> dict:
        return {
            "peacefulness": self.peacefulness,
            "undisturbed": self.undisturbed.tolist(),
            "disturbed": self.disturbed.tolist(),
            "uncoloured_neighbours": self.uncoloured_neighbours.tolist(),
        }


@numba.njit(cache=True)
def _neighbourhood_counts(n, indptr, indices, col, palette):
    count = np.zeros(max(palette, 1), dtype=np.int64)
    und = np.zeros(n, dtype=np.int64)
    dis = np.zeros(n, dtype=np.int64)
    unc = np.zeros(n, dtype=np.int64)
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        for a in range(lo, hi):
            c = col[indices[a]]
            if c >= 0:
                count[c] += 1
            else:
                unc[v] += 1
        for a in range(lo, hi):
            c = col[indices[a]]
            if c >= 0:
                if count[c] == 1:
                    und[v] += 1
                else:
                    dis[v] += 1
        for a in range(lo, hi):
            c = col[indices[a]]
            if c >= 0:
                count[c] = 0
    return und, dis, unc


def peace_report(g: Graph, f: PartialColouring, *, check: bool = True) -> PeaceReport:
    """Exact undisturbed / disturbed / uncoloured counts for every vertex."""
    if check:
        check_proper(g, f)
    und, dis, unc = _neighbourhood_counts(g.n, g.indptr, g.indices, f.colours, f.palette)
    return PeaceReport(und, dis, unc)


def is_p_peaceful(g: Graph, f: PartialColouring, p) -> bool:
    """True iff ``f`` is a total proper colouring with every disturbed count
    at most ``p`` (``p`` may be a float or a :class:`fractions.Fraction`)."""
    if not f.is_total:
        raise ValueError("is_p_peaceful needs a total colouring")
    return peace_report(g, f).peacefulness <= p


# -- greedy completion ----------------------------------------------------------------

@numba.njit(cache=True)
def _greedy_fill(n, indptr, indices, col, palette, order):
    stamp = np.full(palette, -1, dtype=np.int64)
    for v in order:
        if col[v] >= 0:
            continue
        for a in range(indptr[v], indptr[v + 1]):
            c = col[indices[a]]
            if c >= 0:
                stamp[c] = v
        chosen = -1
        for c in range(palette):
            if stamp[c] != v:
                chosen = c
                break
        if chosen < 0:
            return v
        col[v] = chosen
    return -1


def smallest_free_colour(g: Graph, f: PartialColouring, v: int) -> int:
    used = {int(c) for c in f.colours[g.neighbours(v)] if c >= 0}
    for c in range(f.palette):
        if c not in used:
            return c
    return -1


@dataclass(frozen=True)
class Completion:
    """Result of :func:`greedy_complete`.

    ``violations`` lists the non-exempt vertices that failed the completion
    precondition; when it is empty the colouring is ``p``-peaceful.
    """

    colouring: PartialColouring
    violations: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def _exempt_mask(g: Graph, exempt: Iterable[Iterable[int]], p) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for clique in exempt:
        members = np.asarray(sorted(int(v) for v in clique), dtype=np.int64)
        if p is not None and members.size < g.delta + 1 - p / 2:
            raise ValueError(f"exempt clique of size {members.size} is below delta + 1 - p/2")
        if not is_clique(g, members):
            raise ValueError("exempt set is not a clique")
        mask[members] = True
    return mask


def completion_violations(g: Graph, f: PartialColouring, p, exempt: Iterable[Iterable[int]] = ()) -> tuple[int, ...]:
    """Vertices outside the exempt cliques with
    ``U_v - |N(v) - dom f| < deg(v) - p``."""
    rep = peace_report(g, f)
    mask = _exempt_mask(g, exempt, p)
    slack = rep.undisturbed - rep.uncoloured_neighbours - (g.degree - p)
    bad = np.flatnonzero((slack < 0) & ~mask)
    return tuple(int(v) for v in bad)


def greedy_complete(g: Graph, f: PartialColouring, p=None, exempt: Iterable[Iterable[int]] = ()) -> Completion:
    """Extend ``f`` to a total proper colouring, visiting uncoloured vertices
    in ascending order and giving each the smallest colour missing from its
    neighbourhood.

    With ``p`` given, the completion precondition is checked first and any
    offending vertices are returned in ``Completion.violations``; the
    colouring is produced either way.
    """
    if f.palette < g.delta + 1:
        raise ValueError(f"palette {f.palette} is smaller than delta + 1 = {g.delta + 1}")
    check_proper(g, f)
    violations = completion_violations(g, f, p, exempt) if p is not None else ()
    col = f.colours.copy()
    stuck = _greedy_fill(g.n, g.indptr, g.indices, col, f.palette, np.arange(g.n, dtype=np.int64))
    assert stuck < 0, "greedy completion ran out of colours"
    return Completion(PartialColouring(col, f.palette), violations)

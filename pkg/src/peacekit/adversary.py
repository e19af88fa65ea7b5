"""Audits for the random bipartite lower-bound construction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Bipartition, Graph
from .logs import plog
from .peace import PartialColouring, check_proper, peace_report
from .rng import make_rng

__all__ = [
    "UniquenessAudit",
    "audit_uniqueness",
    "unique_counts_by_sorting",
    "subset_bound",
    "default_subset_size",
    "SubsetAudit",
    "audit_subsets",
]


@dataclass(frozen=True)
class UniquenessAudit:
    M: int
    M_sorted: int
    min_cb: int
    witness_b: int
    witness_disturbed: int
    c_b: np.ndarray

    @property
    def averaging_holds(self) -> bool:
        """``min c_b <= M / |B|``, compared without rounding."""
        return self.min_cb * self.c_b.size <= self.M

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "M_sorted": self.M_sorted,
            "min_cb": self.min_cb,
            "witness_b": self.witness_b,
            "witness_disturbed": self.witness_disturbed,
            "averaging_holds": self.averaging_holds,
        }


def unique_counts_by_sorting(g: Graph, f: PartialColouring, vertices) -> np.ndarray:
    """Number of colours met exactly once in ``N(b)``, via sorted runs."""
    out = np.zeros(len(vertices), dtype=np.int64)
    for j, b in enumerate(vertices):
        c = np.sort(f.colours[g.neighbours(b)])
        c = c[c >= 0]
        if c.size == 0:
            continue
        starts = np.flatnonzero(np.r_[True, c[1:] != c[:-1]])
        lengths = np.diff(np.r_[starts, c.size])
        out[j] = int(np.sum(lengths == 1))
    return out


def audit_uniqueness(g: Graph, bip: Bipartition, f: PartialColouring) -> UniquenessAudit:
    """``c_b`` (classes meeting ``N(b)`` exactly once) for every ``b`` in B,
    their sum ``M`` computed two ways, and a vertex attaining the minimum."""
    bip.check(g)
    if not f.is_total:
        raise ValueError("audit_uniqueness needs a total colouring")
    check_proper(g, f)
    rep = peace_report(g, f)
    B = bip.side_b
    c_b = rep.undisturbed[B]
    sorted_counts = unique_counts_by_sorting(g, f, B)
    j = int(np.argmin(c_b))
    return UniquenessAudit(
        M=int(c_b.sum()),
        M_sorted=int(sorted_counts.sum()),
        min_cb=int(c_b[j]),
        witness_b=int(B[j]),
        witness_disturbed=int(rep.disturbed[B[j]]),
        c_b=c_b,
    )


def subset_bound(delta: int, size_b: int) -> float:
    return (math.exp(-1) + 1 / (3 * plog(delta) ** (1 / 9))) * size_b


def default_subset_size(delta: int) -> int:
    return max(1, math.floor(delta / plog(delta) ** 1.25))


@dataclass(frozen=True)
class SubsetAudit:
    sizes: tuple[int, ...]
    samples: int
    bound: float
    max_count: tuple[int, ...]
    mean_count: tuple[float, ...]
    frac_exceeding: tuple[float, ...]

    def to_json(self) -> dict:
        return dict(self.__dict__)


def exactly_one_counts(g: Graph, bip: Bipartition, S) -> int:
    """B vertices with exactly one neighbour in ``S``."""
    mark = np.zeros(g.n, dtype=bool)
    mark[np.asarray(S, dtype=np.int64)] = True
    B = bip.side_b
    deg = g.degree[B]
    src = np.repeat(np.arange(B.size), deg)
    idx = np.concatenate([g.neighbours(b) for b in B]) if B.size else np.zeros(0, dtype=np.int64)
    hits = np.bincount(src, weights=mark[idx], minlength=B.size)
    return int(np.sum(hits == 1))


def audit_subsets(g: Graph, bip: Bipartition, max_size: int, samples: int, seed=0, *, sizes=None) -> SubsetAudit:
    """Sample uniform subsets of A for each size and count B vertices with
    exactly one neighbour in the subset."""
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    rng = make_rng(seed)
    A = bip.side_a
    delta = g.delta
    bound = subset_bound(delta, bip.side_b.size)
    if sizes is None:
        sizes = sorted({max(1, int(round(x))) for x in np.geomspace(1, max_size, num=min(max_size, 8))})
    mx, mean, frac = [], [], []
    for s in sizes:
        counts = np.array([exactly_one_counts(g, bip, rng.choice(A, size=s, replace=False)) for _ in range(samples)])
        mx.append(int(counts.max()))
        mean.append(float(counts.mean()))
        frac.append(float(np.mean(counts > bound)))
    return SubsetAudit(tuple(int(s) for s in sizes), samples, bound, tuple(mx), tuple(mean), tuple(frac))

"""Undirected simple graphs, the edge-list file format, generators and
structural queries (codegree, large cliques)."""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

from .logs import plog
from .rng import make_rng

log = logging.getLogger(__name__)

__all__ = [
    "Graph",
    "Bipartition",
    "GraphFormatError",
    "MalformedHeaderError",
    "EdgeListError",
    "VertexIndexError",
    "GenerationError",
    "load_graph",
    "save_graph",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "star_graph",
    "empty_graph",
    "complete_bipartite",
    "petersen_graph",
    "disjoint_union",
    "random_regular",
    "regularize_by_doubling",
    "adversarial_bipartite",
    "adversarial_sizes",
    "max_codegree",
    "find_large_cliques",
    "is_clique",
]


class GraphFormatError(ValueError):
    """Base class for edge-list parse errors."""


class MalformedHeaderError(GraphFormatError):
    pass


class EdgeListError(GraphFormatError):
    """Edge lines that are not strictly ascending pairs ``u < v``, or whose
    count disagrees with the header."""


class VertexIndexError(GraphFormatError):
    pass


class GenerationError(RuntimeError):
    pass


class Graph:
    """Immutable simple graph stored as CSR arrays.

    ``indices[indptr[v]:indptr[v + 1]]`` are the neighbours of ``v`` in
    ascending order.
    """

    __slots__ = ("n", "indptr", "indices", "delta", "degree")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, *, validate: bool = True):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.degree = np.diff(self.indptr).astype(np.int64)
        self.degree.setflags(write=False)
        self.delta = int(self.degree.max()) if self.n else 0
        if validate:
            self.check()

    # -- construction -----------------------------------------------------
    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an iterable or ``(m, 2)`` array of vertex pairs.

        Loops and repeated edges are rejected rather than silently merged.
        """
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise VertexIndexError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise EdgeListError("self-loop")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * n + hi)
        if keys.size != e.shape[0]:
            raise EdgeListError("repeated edge")
        return cls._from_sorted_keys(n, keys)

    @classmethod
    def _from_sorted_keys(cls, n: int, keys: np.ndarray) -> "Graph":
        lo, hi = np.divmod(keys, n)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, validate=False)

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "Graph":
        n = len(adjacency)
        pairs = [(u, v) for u, nb in enumerate(adjacency) for v in nb]
        for u, v in pairs:
            if not 0 <= v < n:
                raise VertexIndexError(f"neighbour {v} of {u} out of range")
        forward = set(pairs)
        if len(forward) != len(pairs):
            raise EdgeListError("repeated neighbour entry")
        for u, v in forward:
            if (v, u) not in forward:
                raise EdgeListError(f"adjacency not symmetric at ({u}, {v})")
        return cls.from_edges(n, sorted((u, v) for u, v in forward if u <= v))

    # -- queries -----------------------------------------------------------
    def neighbours(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def m(self) -> int:
        return int(self.indptr[-1] // 2)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(x) for x in self.neighbours(v)) for v in range(self.n))

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degree)
        dst = self.indices.astype(np.int64)
        keep = src < dst
        return np.stack([src[keep], dst[keep]], axis=1)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbours(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def induced_subgraph(self, vertices) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on ``vertices``; returns it with the old labels
        (new vertex ``i`` is old vertex ``labels[i]``)."""
        labels = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices, dtype=np.int64))
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[labels] = np.arange(labels.size)
        e = self.edges()
        keep = (new_id[e[:, 0]] >= 0) & (new_id[e[:, 1]] >= 0)
        sub = new_id[e[keep]]
        keys = np.sort(sub[:, 0] * labels.size + sub[:, 1])
        return Graph._from_sorted_keys(labels.size, keys), labels

    def check(self) -> None:
        """Full scan of the symmetry and simplicity invariants."""
        if self.indptr.size != self.n + 1 or self.indptr[0] != 0:
            raise EdgeListError("bad indptr")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.n):
            raise VertexIndexError("neighbour index out of range")
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degree)
        dst = self.indices.astype(np.int64)
        if np.any(src == dst):
            raise EdgeListError("self-loop")
        fwd = src * self.n + dst
        if fwd.size > 1 and np.any(np.diff(fwd) <= 0):
            raise EdgeListError("neighbour lists not strictly ascending")
        back = np.sort(dst * self.n + src)
        if not np.array_equal(fwd, back):
            raise EdgeListError("adjacency not symmetric")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, delta={self.delta})"


@dataclass(frozen=True)
class Bipartition:
    side_a: np.ndarray
    side_b: np.ndarray

    def check(self, g: Graph) -> None:
        side = np.full(g.n, -1, dtype=np.int8)
        side[self.side_a] = 0
        if np.any(side[self.side_b] == 0):
            raise ValueError("sides overlap")
        side[self.side_b] = 1
        if np.any(side < 0):
            raise ValueError("sides do not cover the vertex set")
        e = g.edges()
        if np.any(side[e[:, 0]] == side[e[:, 1]]):
            raise ValueError("edge inside one side")


# -- file format --------------------------------------------------------------

def save_graph(g: Graph, path) -> None:
    e = g.edges()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{g.n} {e.shape[0]}\n")
        if e.size:
            np.savetxt(fh, e, fmt="%d", delimiter=" ")


def _parse_int_line(line: str, lineno: int, exc: type[GraphFormatError]) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise exc(f"line {lineno}: expected two integers, got {line!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise exc(f"line {lineno}: expected two integers, got {line!r}") from None


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise MalformedHeaderError("empty file")
    n, m = _parse_int_line(lines[0], 1, MalformedHeaderError)
    if n < 0 or m < 0:
        raise MalformedHeaderError("negative vertex or edge count")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise EdgeListError(f"header announces {m} edges, found {len(body)}")
    if m == 0:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32))
    try:
        e = np.array([ln.split() for ln in body], dtype=np.int64)
    except ValueError:
        for i, ln in enumerate(body):
            _parse_int_line(ln, i + 2, EdgeListError)
        raise
    if e.ndim != 2 or e.shape[1] != 2:
        raise EdgeListError("edge lines must hold exactly two integers")
    if e.min() < 0 or e.max() >= n:
        raise VertexIndexError("edge endpoint out of range")
    if np.any(e[:, 0] >= e[:, 1]):
        bad = int(np.argmax(e[:, 0] >= e[:, 1]))
        raise EdgeListError(f"line {bad + 2}: edge must be written as u < v")
    keys = e[:, 0] * n + e[:, 1]
    if np.any(np.diff(keys) <= 0):
        raise EdgeListError("edges not in strictly ascending lexicographic order")
    return Graph._from_sorted_keys(n, keys)


# -- small families -----------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32))


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, 1)
    return Graph.from_edges(n, np.stack(iu, axis=1))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    offset = 0
    parts = []
    for g in graphs:
        parts.append(g.edges() + offset)
        offset += g.n
    e = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    return Graph.from_edges(offset, e)


# -- random regular graphs ----------------------------------------------------

def _pair_stubs(n: int, delta: int, rng: np.random.Generator) -> np.ndarray:
    stubs = np.repeat(np.arange(n, dtype=np.int64), delta)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    return np.sort(pairs, axis=1)


class _EdgeSet:
    """Membership test for edge keys ``lo * n + hi``; a dense bitmap when the
    vertex count allows it, otherwise a sorted key array."""

    def __init__(self, n: int, keys: np.ndarray):
        self.n = n
        self.dense = n <= 12_000
        if self.dense:
            self.bits = np.zeros(n * n, dtype=bool)
            self.bits[keys] = True
        else:
            self.keys = np.sort(keys)

    def contains(self, keys: np.ndarray) -> np.ndarray:
        if self.dense:
            return self.bits[keys]
        i = np.searchsorted(self.keys, keys)
        i = np.minimum(i, self.keys.size - 1)
        return self.keys[i] == keys

    def replace(self, remove: np.ndarray, add: np.ndarray) -> None:
        if self.dense:
            self.bits[remove] = False
            self.bits[add] = True
        else:
            keep = ~np.isin(self.keys, remove)
            self.keys = np.sort(np.concatenate([self.keys[keep], add]))


def _repair_by_switching(n: int, pairs: np.ndarray, rng: np.random.Generator, max_rounds: int) -> np.ndarray | None:
    """Remove loops and repeated edges from a stub pairing with degree-preserving
    switches ``{a,b},{c,d} -> {a,c},{b,d}``. Returns ``None`` on stagnation."""
    lo, hi = pairs[:, 0].copy(), pairs[:, 1].copy()
    keys = lo * n + hi
    order = np.argsort(keys, kind="stable")
    dup = np.zeros(keys.size, dtype=bool)
    dup[order[1:]] = keys[order[1:]] == keys[order[:-1]]
    bad = (lo == hi) | dup
    good_keys = keys[~bad]
    present = _EdgeSet(n, good_keys)
    stalled = 0
    for _ in range(max_rounds):
        bad_idx = np.flatnonzero(bad)
        if bad_idx.size == 0:
            return np.stack([lo, hi], axis=1)
        good_idx = np.flatnonzero(~bad)
        if good_idx.size == 0:
            return None
        partner = good_idx[rng.integers(0, good_idx.size, size=bad_idx.size)]
        flip = rng.random(bad_idx.size) < 0.5
        a, b = lo[bad_idx], hi[bad_idx]
        c = np.where(flip, hi[partner], lo[partner])
        d = np.where(flip, lo[partner], hi[partner])
        e1 = np.sort(np.stack([a, c], axis=1), axis=1)
        e2 = np.sort(np.stack([b, d], axis=1), axis=1)
        k1 = e1[:, 0] * n + e1[:, 1]
        k2 = e2[:, 0] * n + e2[:, 1]
        ok = (a != c) & (b != d) & (k1 != k2)
        ok &= ~present.contains(k1) & ~present.contains(k2)
        # no two accepted switches may share a partner edge or create the same edge
        cand = np.flatnonzero(ok)
        _, first = np.unique(partner[cand], return_index=True)
        cand = cand[np.sort(first)]
        new_keys = np.concatenate([k1[cand], k2[cand]])
        _, cnt = np.unique(new_keys, return_counts=True)
        if np.any(cnt > 1):
            seen: set[int] = set()
            keep = []
            for j in cand:
                if k1[j] in seen or k2[j] in seen:
                    continue
                seen.add(int(k1[j]))
                seen.add(int(k2[j]))
                keep.append(j)
            cand = np.asarray(keep, dtype=np.int64)
        if cand.size == 0:
            stalled += 1
            if stalled > 50:
                return None
            continue
        stalled = 0
        p = partner[cand]
        removed = lo[p] * n + hi[p]
        bi = bad_idx[cand]
        lo[bi], hi[bi] = e1[cand, 0], e1[cand, 1]
        lo[p], hi[p] = e2[cand, 0], e2[cand, 1]
        bad[bi] = False
        present.replace(removed, np.concatenate([k1[cand], k2[cand]]))
    return None


_DENSE_COMPLEMENT_MAX_N = 20_000


def _complement(g: Graph) -> Graph:
    adj = np.ones((g.n, g.n), dtype=bool)
    np.fill_diagonal(adj, False)
    e = g.edges()
    adj[e[:, 0], e[:, 1]] = False
    u, v = np.nonzero(np.triu(adj, 1))
    return Graph._from_sorted_keys(g.n, u.astype(np.int64) * g.n + v)


def random_regular(n: int, delta: int, seed=None, *, max_retries: int = 1000) -> Graph:
    """Random ``delta``-regular simple graph on ``n`` vertices.

    Stubs are paired uniformly (configuration model); loops and repeated
    edges are then switched away. A pairing whose repair stalls is discarded
    and redrawn, at most ``max_retries`` times. Above half density the
    complement of a random ``(n - 1 - delta)``-regular graph is returned.
    """
    if not 0 <= delta < n:
        raise ValueError("need 0 <= delta < n")
    if (n * delta) % 2:
        raise ValueError("n * delta must be even")
    if delta == 0:
        return empty_graph(n)
    rng = make_rng(seed)
    if 2 * delta > n - 1 and n <= _DENSE_COMPLEMENT_MAX_N:
        return _complement(random_regular(n, n - 1 - delta, rng, max_retries=max_retries))
    for attempt in range(max_retries):
        pairs = _pair_stubs(n, delta, rng)
        fixed = _repair_by_switching(n, pairs, rng, max_rounds=10_000)
        if fixed is not None:
            g = Graph._from_sorted_keys(n, np.sort(fixed[:, 0] * n + fixed[:, 1]))
            if attempt:
                log.debug("random_regular(%d, %d) needed %d redraws", n, delta, attempt)
            return g
    raise GenerationError(f"no simple {delta}-regular graph on {n} vertices after {max_retries} attempts")


# -- regularization by doubling -------------------------------------------------

def regularize_by_doubling(g: Graph, delta: int, *, max_vertices: int = 2_000_000) -> Graph:
    """Embed ``g`` as an induced subgraph of a ``delta``-regular graph.

    Each round takes two copies of the current host and joins the two copies
    of every vertex whose degree is still below ``delta``. The original graph
    sits on vertices ``0..g.n-1``.
    """
    if delta < g.delta:
        raise ValueError(f"delta={delta} is below the maximum degree {g.delta}")
    host_n = g.n
    edges = g.edges()
    deg = g.degree.copy()
    while host_n and np.any(deg < delta):
        if 2 * host_n > max_vertices:
            raise ValueError(f"doubling would exceed {max_vertices} vertices")
        low = np.flatnonzero(deg < delta)
        cross = np.stack([low, low + host_n], axis=1)
        edges = np.concatenate([edges, edges + host_n, cross])
        deg = np.concatenate([deg, deg])
        deg[low] += 1
        deg[low + host_n] += 1
        host_n *= 2
    e = np.sort(edges, axis=1)
    return Graph._from_sorted_keys(host_n, np.sort(e[:, 0] * host_n + e[:, 1]))


# -- adversarial bipartite construction ---------------------------------------------

def adversarial_sizes(delta: int) -> tuple[int, int]:
    """``(|A|, |B|)`` for the lower-bound construction."""
    return int(math.floor(delta * delta / plog(delta) ** 1.5)), delta


def adversarial_bipartite(delta: int, seed=None) -> tuple[Graph, Bipartition]:
    """Each of the ``delta`` vertices of B picks ``delta`` neighbours uniformly
    from A. Vertices ``0..|A|-1`` form A, the rest form B."""
    if delta < 16:
        raise ValueError("delta must be at least 16")
    size_a, size_b = adversarial_sizes(delta)
    if size_a <= delta:
        raise ValueError("|A| must exceed delta; increase delta")
    rng = make_rng(seed)
    rows = [np.sort(rng.choice(size_a, size=delta, replace=False)) for _ in range(size_b)]
    b_ids = size_a + np.arange(size_b, dtype=np.int64)
    a_ids = np.concatenate(rows).astype(np.int64)
    keys = np.sort(a_ids * (size_a + size_b) + np.repeat(b_ids, delta))
    g = Graph._from_sorted_keys(size_a + size_b, keys)
    return g, Bipartition(np.arange(size_a, dtype=np.int64), b_ids)


# -- codegree -------------------------------------------------------------------------

@numba.njit(cache=True)
def _max_codegree(n, indptr, indices):
    cnt = np.zeros(n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    best = 0
    for u in range(n):
        nt = 0
        for a in range(indptr[u], indptr[u + 1]):
            w = indices[a]
            for b in range(indptr[w], indptr[w + 1]):
                x = indices[b]
                if x > u:
                    if cnt[x] == 0:
                        touched[nt] = x
                        nt += 1
                    cnt[x] += 1
        for t in range(nt):
            x = touched[t]
            if cnt[x] > best:
                best = cnt[x]
            cnt[x] = 0
    return best


def max_codegree(g: Graph) -> int:
    """Largest number of common neighbours over distinct vertex pairs."""
    if g.n < 2:
        return 0
    return int(_max_codegree(g.n, g.indptr, g.indices))


# -- cliques ----------------------------------------------------------------------------

def is_clique(g: Graph, vertices) -> bool:
    vs = sorted(set(int(v) for v in vertices))
    for i, u in enumerate(vs):
        nb = g.neighbours(u)
        rest = np.asarray(vs[i + 1 :], dtype=np.int64)
        if rest.size and not np.all(np.isin(rest, nb, assume_unique=True)):
            return False
    return True


@numba.njit(cache=True)
def _grow_clique(seed, indptr, indices, blocked, threshold, mark):
    # candidates: unblocked neighbours of seed, ranked by adjacency inside N[seed]
    deg0 = indptr[seed + 1] - indptr[seed]
    cand = np.empty(deg0, dtype=np.int64)
    nc = 0
    mark[seed] = 1
    for a in range(indptr[seed], indptr[seed + 1]):
        w = indices[a]
        mark[w] = 1
        if not blocked[w]:
            cand[nc] = w
            nc += 1
    score = np.zeros(nc, dtype=np.int64)
    for i in range(nc):
        w = cand[i]
        s = 0
        for b in range(indptr[w], indptr[w + 1]):
            s += mark[indices[b]]
        score[i] = s
    mark[seed] = 0
    for a in range(indptr[seed], indptr[seed + 1]):
        mark[indices[a]] = 0
    order = np.argsort(-score, kind="mergesort")
    clique = np.empty(nc + 1, dtype=np.int64)
    clique[0] = seed
    size = 1
    # alive[x] counts clique members adjacent to x
    alive = mark
    for a in range(indptr[seed], indptr[seed + 1]):
        alive[indices[a]] += 1
    for k in range(nc):
        if size + (nc - k) < threshold:
            break
        w = cand[order[k]]
        if alive[w] == size:
            clique[size] = w
            size += 1
            for b in range(indptr[w], indptr[w + 1]):
                alive[indices[b]] += 1
    # reset scratch
    for a in range(indptr[seed], indptr[seed + 1]):
        alive[indices[a]] = 0
    for t in range(1, size):
        w = clique[t]
        for b in range(indptr[w], indptr[w + 1]):
            alive[indices[b]] = 0
    return clique[:size]


def find_large_cliques(g: Graph, threshold: int, seeds: Iterable[int] | None = None) -> list[np.ndarray]:
    """Disjoint verified cliques of size at least ``threshold``.

    Greedy expansion from each seed vertex (given ``seeds`` first, then all
    vertices by decreasing degree). Heuristic: a clique may be missed.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    blocked = np.zeros(g.n, dtype=np.bool_)
    mark = np.zeros(g.n, dtype=np.int64)
    order = list(seeds or []) + list(np.lexsort((np.arange(g.n), -g.degree)))
    found: list[np.ndarray] = []
    for v in order:
        v = int(v)
        if blocked[v] or g.degree[v] + 1 < threshold:
            continue
        clique = _grow_clique(v, g.indptr, g.indices, blocked, threshold, mark)
        if clique.size >= threshold:
            clique = np.sort(clique)
            if not is_clique(g, clique):  # pragma: no cover - kernel bug guard
                raise AssertionError("clique search returned a non-clique")
            found.append(clique)
            blocked[clique] = True
    return found


def cache_dir() -> str | None:
    return os.environ.get("PEACEKIT_CACHE_DIR")

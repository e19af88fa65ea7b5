"""Dense/sparse vertex decompositions and colourings of the dense sets.

A vertex is *d-dense* when its neighbourhood spans at least
``C(delta, 2) - d*delta`` edges. A decomposition partitions the vertices into
dense sets (each close to a clique of size ``delta + 1``) and a remainder of
d-sparse vertices.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numba
import numpy as np

from .dsatur import dsatur_fill
from .graph import Graph, is_clique

__all__ = [
    "DenseDecomposition",
    "DecompositionError",
    "SuitableColouring",
    "SuitabilityError",
    "ExtensionError",
    "neighbourhood_edge_counts",
    "dense_decompose",
    "validate_decomposition",
    "suitable_colouring",
    "validate_suitable",
    "is_very_suitable",
    "extend_over_very_suitable",
    "extend_over_not_very_suitable",
    "save_decomposition",
    "load_decomposition",
]


@numba.njit(cache=True)
def _nbhd_edges(n, indptr, indices):
    mark = np.full(n, -1, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        for a in range(indptr[v], indptr[v + 1]):
            mark[indices[a]] = v
        t = 0
        for a in range(indptr[v], indptr[v + 1]):
            u = indices[a]
            for b in range(indptr[u], indptr[u + 1]):
                if mark[indices[b]] == v:
                    t += 1
        out[v] = t // 2
    return out


def neighbourhood_edge_counts(g: Graph) -> np.ndarray:
    """``|E(G[N(v)])|`` for every vertex."""
    return _nbhd_edges(g.n, g.indptr, g.indices)


def _dense_threshold(delta: int, d: int) -> int:
    return delta * (delta - 1) // 2 - d * delta


@dataclass(frozen=True, eq=False)
class DenseDecomposition:
    dense_sets: tuple[np.ndarray, ...]
    sparse_set: np.ndarray
    d: int

    def to_json(self) -> dict:
        return {
            "dense_sets": [s.tolist() for s in self.dense_sets],
            "sparse_set": self.sparse_set.tolist(),
            "d": self.d,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DenseDecomposition":
        return cls(
            tuple(np.asarray(s, dtype=np.int64) for s in data["dense_sets"]),
            np.asarray(data["sparse_set"], dtype=np.int64),
            int(data["d"]),
        )


def save_decomposition(dec: DenseDecomposition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dec.to_json(), fh)


def load_decomposition(path) -> DenseDecomposition:
    with open(path, encoding="utf-8") as fh:
        return DenseDecomposition.from_json(json.load(fh))


class DecompositionError(RuntimeError):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


def validate_decomposition(g: Graph, dec: DenseDecomposition, delta: int | None = None) -> dict[str, list]:
    """Exact check of the size, membership and sparsity conditions; returns
    the offending sets / vertices per condition (all lists empty = valid)."""
    delta = g.delta if delta is None else delta
    d = dec.d
    report: dict[str, list] = {"partition": [], "a": [], "b": [], "c": []}
    seen = np.zeros(g.n, dtype=np.int64)
    for s in dec.dense_sets:
        seen[s] += 1
    seen[dec.sparse_set] += 1
    report["partition"] = np.flatnonzero(seen != 1).tolist()
    src = np.repeat(np.arange(g.n), g.degree)
    for i, s in enumerate(dec.dense_sets):
        if not delta + 1 - 8 * d <= s.size <= delta + 4 * d:
            report["a"].append(i)
        member = np.zeros(g.n, dtype=bool)
        member[s] = True
        inside = np.bincount(src, weights=member[g.indices], minlength=g.n)
        heavy = 4 * inside >= 3 * delta
        wrong = np.flatnonzero(heavy != member)
        report["b"].extend((i, int(v)) for v in wrong)
    if dec.sparse_set.size:
        t = neighbourhood_edge_counts(g)[dec.sparse_set]
        report["c"] = dec.sparse_set[t >= _dense_threshold(delta, d)].tolist()
    return report


def dense_decompose(g: Graph, d: int, *, max_steps: int | None = None) -> DenseDecomposition:
    """Grow each dense set from a dense vertex's closed neighbourhood, then
    add and drop vertices by the 3/4-adjacency rule until nothing changes.
    Raises :class:`DecompositionError` if the result fails validation."""
    delta = g.delta
    if not 1 <= d <= delta / 100:
        raise ValueError(f"d = {d} outside [1, delta/100] for delta = {delta}")
    t = neighbourhood_edge_counts(g)
    dense = t >= _dense_threshold(delta, d)
    free = np.ones(g.n, dtype=bool)
    sets = []
    max_steps = 4 * g.n if max_steps is None else max_steps
    for seed in np.flatnonzero(dense):
        if not free[seed]:
            continue
        member = np.zeros(g.n, dtype=bool)
        member[seed] = True
        member[g.neighbours(seed)] = True
        member &= free
        for _ in range(max_steps):
            inside = np.zeros(g.n, dtype=np.int64)
            for v in np.flatnonzero(member):
                inside[g.neighbours(v)] += 1
            heavy = (4 * inside >= 3 * delta) & free
            if np.array_equal(heavy, member):
                break
            member = heavy
        if member.any() and delta + 1 - 8 * d <= member.sum() <= delta + 4 * d:
            sets.append(np.flatnonzero(member))
            free &= ~member
    dec = DenseDecomposition(tuple(sets), np.flatnonzero(free), d)
    report = validate_decomposition(g, dec, delta)
    if any(report.values()):
        raise DecompositionError("decomposition failed validation", report)
    return dec


# -- suitable colourings -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SuitableColouring:
    classes: tuple[tuple[int, ...], ...]

    @property
    def singletons(self) -> np.ndarray:
        return np.asarray(sorted(c[0] for c in self.classes if len(c) == 1), dtype=np.int64)

    @property
    def singleton_clique(self) -> np.ndarray:
        return self.singletons

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


class SuitabilityError(RuntimeError):
    def __init__(self, message: str, failing: list[str]):
        super().__init__(message)
        self.failing = failing


class ExtensionError(RuntimeError):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


def validate_suitable(g: Graph, dense_set, colouring: SuitableColouring, delta: int | None = None) -> list[str]:
    """Names of the failing conditions: ``partition``, ``proper``,
    ``class_count``, ``singleton_clique``, ``max_class``, ``triples``."""
    delta = g.delta if delta is None else delta
    fails = []
    members = sorted(int(v) for v in dense_set)
    flat = sorted(v for c in colouring.classes for v in c)
    if flat != members:
        fails.append("partition")
    if any(not _independent(g, c) for c in colouring.classes):
        fails.append("proper")
    if len(colouring.classes) > delta + 1:
        fails.append("class_count")
    singles = colouring.singletons
    if not is_clique(g, singles):
        fails.append("singleton_clique")
    sizes = colouring.sizes()
    if sizes and max(sizes) > 3:
        fails.append("max_class")
    triples = [c for c in colouring.classes if len(c) == 3]
    if triples:
        ok = len(colouring.classes) == delta + 1
        for c in triples:
            for v in c:
                nb = set(g.neighbours(v).tolist())
                if any(int(s) not in nb for s in singles):
                    ok = False
        if not ok:
            fails.append("triples")
    return fails


def _independent(g: Graph, cls) -> bool:
    cls = list(cls)
    for i, u in enumerate(cls):
        for w in cls[i + 1:]:
            if g.has_edge(u, w):
                return False
    return True


def suitable_colouring(g: Graph, dense_set, *, max_moves: int | None = None) -> SuitableColouring:
    """Local search on the sum of squared class sizes, followed by pairing
    of nonadjacent singletons. Ties go to the lowest vertex, then the lowest
    class."""
    delta = g.delta
    members = np.asarray(sorted(int(v) for v in dense_set), dtype=np.int64)
    h, labels = g.induced_subgraph(members)
    col = np.full(h.n, -1, dtype=np.int64)
    if not dsatur_fill(h, col, delta + 1, np.arange(h.n)):
        raise SuitabilityError("no proper (delta+1)-colouring found for the dense set", ["proper"])
    adj = [set(h.neighbours(v).tolist()) for v in range(h.n)]
    classes: list[list[int]] = [sorted(np.flatnonzero(col == c).tolist()) for c in range(delta + 1)]
    classes = [c for c in classes if c]
    max_moves = h.n**2 if max_moves is None else max_moves

    def fits(x, cls):
        return all(y not in adj[x] for y in cls)

    def improve() -> bool:
        classes.sort(key=lambda c: c[0])
        largest = max(range(len(classes)), key=lambda i: (len(classes[i]), -i))
        big = len(classes[largest])
        # split off a vertex while colours are spare
        if len(classes) < delta + 1:
            for c in classes:
                if len(c) >= 2:
                    x = c.pop(0)
                    classes.append([x])
                    return True
        # move a vertex into a class at least two smaller
        for a, ca in enumerate(classes):
            for x in ca:
                for b, cb in enumerate(classes):
                    if b != a and len(cb) + 1 < len(ca) and fits(x, cb):
                        ca.remove(x)
                        cb.append(x)
                        cb.sort()
                        return True
        singles = [i for i, c in enumerate(classes) if len(c) == 1]
        if big >= 3:
            # merge two singletons and free a vertex of the largest class
            for i in singles:
                for j in singles:
                    if j > i and fits(classes[i][0], classes[j]):
                        x = classes[largest].pop(0)
                        classes[i].append(classes[j][0])
                        classes[i].sort()
                        classes[j] = [x]
                        return True
        if big >= 4:
            # grow a pair to a triple and free a vertex of the largest class
            for i in singles:
                for b, cb in enumerate(classes):
                    if len(cb) == 2 and fits(classes[i][0], cb):
                        x = classes[largest].pop(0)
                        cb.append(classes[i][0])
                        cb.sort()
                        classes[i] = [x]
                        return True
        return False

    moves = 0
    while improve():
        moves += 1
        if moves > max_moves:
            raise SuitabilityError("local search did not settle", validate_suitable(g, members, _lift(classes, labels)))
    if max(len(c) for c in classes) <= 2:
        merged = True
        while merged:
            merged = False
            singles = sorted((c[0], i) for i, c in enumerate(classes) if len(c) == 1)
            for p, (x, i) in enumerate(singles):
                for y, j in singles[p + 1:]:
                    if y not in adj[x]:
                        classes[i] = sorted([x, y])
                        classes[j] = []
                        merged = True
                        break
                if merged:
                    break
            classes = [c for c in classes if c]
    out = _lift(classes, labels)
    fails = validate_suitable(g, members, out, delta)
    if fails:
        raise SuitabilityError(f"local search ended unsuitable: {fails}", fails)
    return out


def _lift(classes, labels) -> SuitableColouring:
    lifted = [tuple(sorted(int(labels[v]) for v in c)) for c in classes if c]
    lifted.sort()
    return SuitableColouring(tuple(lifted))


def is_very_suitable(colouring: SuitableColouring, delta: int, k: int) -> bool:
    """At least ``delta - 40*k`` singleton classes."""
    return int(colouring.singletons.size) >= delta - 40 * k


# -- extensions -------------------------------------------------------------------------

def _free_colour(g: Graph, col: np.ndarray, vertices, palette: int) -> int:
    used = np.zeros(palette, dtype=bool)
    for v in vertices:
        c = col[g.neighbours(v)]
        used[c[(c >= 0) & (c < palette)]] = True
    free = np.flatnonzero(~used)
    return int(free[0]) if free.size else -1


def _check_uncoloured(col, dense_set):
    if np.any(col[np.asarray(dense_set, dtype=np.int64)] >= 0):
        raise ValueError("the dense set must be uncoloured before extension")


def extend_over_very_suitable(g: Graph, col: np.ndarray, dense_set, colouring: SuitableColouring, J, palette: int) -> np.ndarray:
    """Colour ``D - J`` with colours below ``palette``: non-singleton classes
    first, each as one block, then the remaining singletons. ``col`` is not
    modified; the extended array is returned."""
    J = {int(v) for v in J}
    if not J <= set(colouring.singletons.tolist()):
        raise ValueError("J must consist of singleton-class vertices")
    col = np.asarray(col, dtype=np.int64).copy()
    _check_uncoloured(col, dense_set)
    blocks = [c for c in colouring.classes if len(c) > 1]
    singles = [c[0] for c in colouring.classes if len(c) == 1 and c[0] not in J]
    for block in blocks + [(v,) for v in sorted(singles)]:
        c = _free_colour(g, col, block, palette)
        if c < 0:
            raise ExtensionError(f"no free colour for {block}", {"block": list(block)})
        col[list(block)] = c
    return col


def extend_over_not_very_suitable(g: Graph, col: np.ndarray, dense_set, colouring: SuitableColouring, k: int, palette: int) -> tuple[np.ndarray, dict]:
    """Pairs of nonadjacent vertices get one colour each, then the rest of
    the dense set is coloured so that the last vertices coloured (``Z'``)
    each see ``k`` monochromatic pairs and the ones before (``Y'``) each see
    ``k`` vertices of ``Z'``. Returns the extended array and the selection."""
    delta = g.delta
    col = np.asarray(col, dtype=np.int64).copy()
    _check_uncoloured(col, dense_set)
    members = np.asarray(sorted(int(v) for v in dense_set), dtype=np.int64)
    want = math.ceil(8 * k / 3)
    pairs = []
    for cls in colouring.classes:
        cls = list(cls)
        while len(cls) >= 2 and len(pairs) < want:
            pairs.append((cls[0], cls[1]))
            cls = cls[2:]
    report = {"pairs_wanted": want, "pairs_found": len(pairs)}
    if len(pairs) < want:
        raise ExtensionError("not enough nonadjacent pairs", report)
    in_pair = {v for p in pairs for v in p}
    rest = [int(v) for v in members if int(v) not in in_pair]
    adjsets = {int(v): set(g.neighbours(v).tolist()) for v in members}
    sees_pairs = {v: sum(1 for a, b in pairs if a in adjsets[v] and b in adjsets[v]) for v in rest}
    z_size = math.ceil(delta / 30)
    z_sel = sorted(rest, key=lambda v: (-sees_pairs[v], v))[:z_size]
    report["z_size"] = z_size
    if len(z_sel) < z_size or any(sees_pairs[v] < k for v in z_sel):
        raise ExtensionError("could not find enough vertices seeing k pairs", report)
    zset = set(z_sel)
    rest2 = [v for v in rest if v not in zset]
    sees_z = {v: len(adjsets[v] & zset) for v in rest2}
    y_size = math.ceil(delta / 3)
    y_sel = sorted(rest2, key=lambda v: (-sees_z[v], v))[:y_size]
    report["y_size"] = y_size
    if len(y_sel) < y_size or any(sees_z[v] < k for v in y_sel):
        raise ExtensionError("could not find enough vertices seeing k of Z'", report)
    yset = set(y_sel)
    order = [p for p in pairs]
    order += [(v,) for v in rest2 if v not in yset]
    order += [(v,) for v in sorted(y_sel)]
    order += [(v,) for v in sorted(z_sel)]
    for block in order:
        c = _free_colour(g, col, block, palette)
        if c < 0:
            raise ExtensionError(f"no free colour for {block}", report)
        col[list(block)] = c
    report.update(pairs=[list(p) for p in pairs], z=sorted(z_sel), y=sorted(y_sel))
    return col, report

"""Two-phase colouring through a sampled set Z.

``G - Z`` is coloured with ``P = delta + 1 - k`` colours (``k = ceil(20 eps delta)``),
then ``Z`` draws from the ``k`` spare colours: each clique part ``K_i`` takes a
random permutation of the spare palette and every vertex of ``Y`` takes a
uniform colour. Monochromatic edges inside ``Y`` lose both ends; monochromatic
edges meeting ``K`` lose only their ``K`` ends. The rest is greedy.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dense import (
    DecompositionError,
    DenseDecomposition,
    ExtensionError,
    SuitabilityError,
    dense_decompose,
    extend_over_not_very_suitable,
    extend_over_very_suitable,
    is_very_suitable,
    suitable_colouring,
)
from .dsatur import dsatur_with_restarts
from .graph import Graph, find_large_cliques
from .logs import plog
from .oneshot import as_fraction
from .peace import PartialColouring, check_proper, greedy_complete, peace_report
from .rng import make_rng

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_EPSILON",
    "ZParams",
    "UsableZ",
    "DenseData",
    "ZBadEventReport",
    "ZColourResult",
    "ZSamplingError",
    "ComplementColouringError",
    "z_params",
    "prepare_dense_data",
    "validate_usable",
    "sample_usable_Z",
    "colour_complement",
    "assign_z_colours",
    "uncolour_z_conflicts",
    "z_bad_events",
    "colour_Z",
    "z_pipeline",
]

DEFAULT_EPSILON = Fraction(1, 8001)


@dataclass(frozen=True)
class ZParams:
    delta: int
    epsilon: Fraction
    k: int
    y_prob: float
    big_clique: Fraction  # 2*delta/3 + 1

    @property
    def complement_palette(self) -> int:
        return self.delta + 1 - self.k


def z_params(delta: int, epsilon=DEFAULT_EPSILON) -> ZParams:
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    k = math.ceil(20 * eps * delta)
    if k > delta:
        raise ValueError("ceil(20 eps delta) exceeds delta")
    return ZParams(delta, eps, k, float(7 * eps / 4), Fraction(2 * delta, 3) + 1)


@dataclass(frozen=True, eq=False)
class DenseData:
    """A decomposition plus, for every dense set, its suitable colouring
    (or None when none was found) and whether it is very suitable."""

    decomposition: DenseDecomposition
    colourings: tuple
    very: tuple[bool, ...]

    @property
    def cliques(self) -> list[np.ndarray]:
        return [c.singletons for c, v in zip(self.colourings, self.very) if v]


def prepare_dense_data(g: Graph, params: ZParams, d: int | None = None) -> DenseData:
    """Decompose with ``d = 4k`` clipped to ``delta // 100``; graphs with
    ``delta < 100`` get the all-sparse decomposition when every vertex is
    sparse for ``d = 1``."""
    delta = g.delta
    if d is None:
        d = min(4 * params.k, delta // 100)
    if d >= 1:
        dec = dense_decompose(g, d)
    else:
        from .dense import neighbourhood_edge_counts

        t = neighbourhood_edge_counts(g)
        if np.any(t >= delta * (delta - 1) // 2 - delta):
            raise DecompositionError("delta < 100 and some vertex is dense", {"c": np.flatnonzero(t >= delta * (delta - 1) // 2 - delta).tolist()})
        dec = DenseDecomposition((), np.arange(g.n, dtype=np.int64), 1)
    cols, very = [], []
    for s in dec.dense_sets:
        try:
            sc = suitable_colouring(g, s)
        except SuitabilityError as exc:
            log.warning("no suitable colouring for a dense set: %s", exc)
            cols.append(None)
            very.append(False)
            continue
        cols.append(sc)
        very.append(is_very_suitable(sc, delta, params.k))
    return DenseData(dec, tuple(cols), tuple(very))


@dataclass(frozen=True, eq=False)
class UsableZ:
    k_sets: tuple[np.ndarray, ...]
    cliques: tuple[np.ndarray, ...]
    y_set: np.ndarray
    epsilon: Fraction
    rounds: int = 0
    residual: dict = field(default_factory=dict)

    def members(self, n: int) -> np.ndarray:
        z = np.zeros(n, dtype=bool)
        for K in self.k_sets:
            z[K] = True
        z[self.y_set] = True
        return z

    @property
    def ok(self) -> bool:
        return not any(self.residual.values())

    def to_json(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "k_sets": [K.tolist() for K in self.k_sets],
            "cliques": [C.tolist() for C in self.cliques],
            "y_set": self.y_set.tolist(),
            "rounds": self.rounds,
            "residual": self.residual,
        }


class ZSamplingError(RuntimeError):
    def __init__(self, message: str, z: UsableZ):
        super().__init__(message)
        self.z = z


class ComplementColouringError(RuntimeError):
    pass


def _exempt_mask(g: Graph, params: ZParams, cliques) -> np.ndarray:
    """Vertices of known cliques with more than ``2 delta/3 + 1`` vertices."""
    mask = np.zeros(g.n, dtype=bool)
    for C in cliques:
        if C.size > params.big_clique:
            mask[C] = True
    return mask


def _known_cliques(g: Graph, params: ZParams, cliques) -> list[np.ndarray]:
    known = [np.asarray(C, dtype=np.int64) for C in cliques]
    taken = np.zeros(g.n, dtype=bool)
    for C in known:
        taken[C] = True
    threshold = math.floor(params.big_clique) + 1
    for C in find_large_cliques(g, threshold):
        if not taken[C].any():
            known.append(C)
            taken[C] = True
    return known


class _ZCounts:
    """Incremental neighbour counts for Z membership."""

    def __init__(self, g: Graph, params: ZParams, k_sets, cliques, in_y, exempt):
        self.g = g
        self.p = params
        self.exempt = exempt
        self.part = np.full(g.n, -1, dtype=np.int64)  # index of K_i, -1 for Y / outside
        self.in_y = in_y
        self.in_k = np.zeros(g.n, dtype=bool)
        for i, K in enumerate(k_sets):
            self.in_k[K] = True
            self.part[K] = i
        src = np.repeat(np.arange(g.n), g.degree)
        z = self.in_k | in_y
        self.nz = np.bincount(src, weights=z[g.indices], minlength=g.n).astype(np.int64)
        self.ny = np.bincount(src, weights=in_y[g.indices], minlength=g.n).astype(np.int64)
        self.nk_own = np.zeros(g.n, dtype=np.int64)  # neighbours in own K_i
        for K in k_sets:
            m = np.zeros(g.n, dtype=bool)
            m[K] = True
            for v in K:
                self.nk_own[v] = int(m[g.neighbours(v)].sum())

    def flip_y(self, u: int, value: bool):
        if self.in_y[u] == value:
            return
        s = 1 if value else -1
        self.in_y[u] = value
        nb = self.g.neighbours(u)
        self.nz[nb] += s
        self.ny[nb] += s

    def set_k(self, i: int, old: np.ndarray, new: np.ndarray):
        for v in old:
            self.in_k[v] = False
            self.part[v] = -1
            self.nz[self.g.neighbours(v)] -= 1
        self.nk_own[old] = 0
        for v in new:
            self.in_k[v] = True
            self.part[v] = i
            self.nz[self.g.neighbours(v)] += 1
        m = np.zeros(self.g.n, dtype=bool)
        m[new] = True
        for v in new:
            self.nk_own[v] = int(m[self.g.neighbours(v)].sum())

    def violations(self) -> dict[str, np.ndarray]:
        p = self.p
        eps, delta = p.epsilon, p.delta
        iii = np.flatnonzero(self.in_k & (9 * (self.nz - self.nk_own) > 20 * eps * delta))
        test4 = self.in_y | ~self.exempt
        iv_z = np.flatnonzero(test4 & (9 * self.nz > 200 * eps * delta))
        iv_y = np.flatnonzero(test4 & (self.ny > 2 * eps * delta))
        v_ = np.flatnonzero(~self.exempt & (2 * self.nz < 3 * eps * delta))
        return {"iii": iii, "iv_z": iv_z, "iv_y": iv_y, "v": v_}


def validate_usable(g: Graph, z: UsableZ, params: ZParams, known_cliques=None) -> dict[str, list[int]]:
    """Offending vertices for conditions (ii)-(v); (ii) lists K indices."""
    k_sets = [np.asarray(K, dtype=np.int64) for K in z.k_sets]
    bad_ii = []
    used = np.zeros(g.n, dtype=bool)
    from .graph import is_clique

    for i, (K, C) in enumerate(zip(k_sets, z.cliques)):
        C = np.asarray(C, dtype=np.int64)
        ok = K.size == params.k and np.isin(K, C).all() and is_clique(g, C) and C.size >= params.big_clique
        ok = ok and not used[C].any()
        used[C] = True
        if not ok:
            bad_ii.append(i)
    known = z.cliques if known_cliques is None else known_cliques
    in_y = np.zeros(g.n, dtype=bool)
    in_y[z.y_set] = True
    counts = _ZCounts(g, params, k_sets, z.cliques, in_y, _exempt_mask(g, params, known))
    out = {"ii": bad_ii}
    out.update({k: v.tolist() for k, v in counts.violations().items()})
    return out


def sample_usable_Z(
    g: Graph,
    params: ZParams,
    cliques=(),
    *,
    seed: int = 0,
    max_rounds: int = 100_000,
    strategy: str = "partial",
    strict: bool = False,
) -> UsableZ:
    """Sample ``K_i`` (first ``k`` of a random permutation of ``C_i``) and
    ``Y`` (independent membership outside the cliques), then repair.

    ``strategy="partial"`` redraws one random variable that pushes the
    lowest-index violated count the wrong way; ``strategy="local"`` redraws
    every ``K_i`` and ``Y`` choice within distance 2 of that vertex.
    """
    if strategy not in ("partial", "local"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = make_rng(seed)
    cliques = [np.asarray(C, dtype=np.int64) for C in cliques]
    for C in cliques:
        if C.size < params.k:
            raise ValueError("clique smaller than k")
    known = _known_cliques(g, params, cliques)
    exempt = _exempt_mask(g, params, known)
    in_clique = np.zeros(g.n, dtype=bool)
    for C in cliques:
        in_clique[C] = True
    eligible = ~in_clique
    k_sets = [rng.permutation(C)[: params.k] for C in cliques]
    in_y = eligible & (rng.random(g.n) < params.y_prob)
    counts = _ZCounts(g, params, k_sets, cliques, in_y, exempt)
    rounds = 0
    while rounds < max_rounds:
        viol = counts.violations()
        firsts = [(int(a[0]), name) for name, a in viol.items() if a.size]
        if not firsts:
            break
        v, kind = min(firsts)
        rounds += 1
        nb = g.neighbours(v)
        if strategy == "local":
            ball = np.unique(np.concatenate([g.neighbours(u) for u in nb] + [nb, [v]]))
            touched = {int(counts.part[u]) for u in ball if counts.part[u] >= 0 or in_clique[u]}
            for u in ball:
                if eligible[u]:
                    counts.flip_y(int(u), bool(rng.random() < params.y_prob))
            for i, C in enumerate(cliques):
                if i in touched or np.isin(C, ball).any():
                    new = rng.permutation(C)[: params.k]
                    counts.set_k(i, k_sets[i], new)
                    k_sets[i] = new
            continue
        # partial: pick a neighbour whose variable causes the violation
        if kind == "v":
            cand = nb[~counts.in_k[nb] & ~counts.in_y[nb] & (eligible[nb] | in_clique[nb])]
        elif kind == "iv_y":
            cand = nb[counts.in_y[nb]]
        elif kind == "iii":
            own = counts.part[v]
            cand = nb[(counts.in_y[nb]) | (counts.in_k[nb] & (counts.part[nb] != own))]
        else:
            cand = nb[counts.in_y[nb] | counts.in_k[nb]]
        if cand.size == 0:
            continue
        u = int(cand[rng.integers(cand.size)])
        if eligible[u]:
            counts.flip_y(u, bool(rng.random() < params.y_prob))
        else:
            i = next(j for j, C in enumerate(cliques) if u in set(C.tolist()))
            new = rng.permutation(cliques[i])[: params.k]
            counts.set_k(i, k_sets[i], new)
            k_sets[i] = new
    residual = {k: v.tolist() for k, v in counts.violations().items()}
    z = UsableZ(tuple(np.sort(K) for K in k_sets), tuple(cliques), np.flatnonzero(counts.in_y), params.epsilon, rounds, residual)
    if strict and not z.ok:
        raise ZSamplingError(f"validators still failing after {rounds} rounds", z)
    return z


def colour_complement(g: Graph, z: UsableZ, params: ZParams, dense: DenseData, *, seed: int = 0, restarts: int = 20) -> tuple[PartialColouring, dict]:
    """Proper colouring of ``G - Z`` with colours below ``delta + 1 - k``.

    Sparse vertices go first (saturation greedy with restarts), then every
    dense set is extended; dense sets whose extension procedure cannot make
    its selections fall back to the saturation greedy.
    """
    P = params.complement_palette
    zmask = z.members(g.n)
    kmask = np.zeros(g.n, dtype=bool)
    for K in z.k_sets:
        kmask[K] = True
    col = np.full(g.n, -1, dtype=np.int64)
    info = {"fallback_sets": [], "restarts_used": 0}
    todo = dense.decomposition.sparse_set[~zmask[dense.decomposition.sparse_set]]
    filled = dsatur_with_restarts(g, col, P, todo, restarts=restarts, seed=seed)
    if filled is None:
        raise ComplementColouringError(f"sparse part not coloured with {P} colours")
    col = filled
    vs = iter(range(len(z.k_sets)))
    for i, (D, sc, very) in enumerate(zip(dense.decomposition.dense_sets, dense.colourings, dense.very)):
        try:
            if very:
                j = next(vs)
                col = extend_over_very_suitable(g, col, D, sc, z.k_sets[j], P)
                continue
            if sc is None:
                raise ExtensionError("no suitable colouring")
            col, _ = extend_over_not_very_suitable(g, col, D, sc, params.k, P)
        except ExtensionError as exc:
            info["fallback_sets"].append(i)
            log.info("dense set %d: %s; falling back to greedy", i, exc)
            rest = np.asarray([v for v in D if not kmask[v] and col[v] < 0], dtype=np.int64)
            filled = dsatur_with_restarts(g, col, P, rest, restarts=restarts, seed=seed + i + 1)
            if filled is None:
                raise ComplementColouringError(f"dense set {i} not coloured with {P} colours") from exc
            col = filled
    col[zmask] = -1
    f = PartialColouring(col, params.delta + 1)
    check_proper(g, f)
    if np.any(col >= P) or np.any(col[~zmask] < 0):
        raise ComplementColouringError("complement colouring incomplete or outside its palette")
    return f, info


def assign_z_colours(g_n: int, z: UsableZ, params: ZParams, rng) -> np.ndarray:
    """Raw spare-palette assignment (before uncolouring): the ``j``-th vertex
    of a random ordering of ``K_i`` gets spare colour ``j``."""
    P = params.complement_palette
    assigned = np.full(g_n, -1, dtype=np.int64)
    for K in z.k_sets:
        assigned[rng.permutation(K)] = P + np.arange(K.size)
    assigned[z.y_set] = P + rng.integers(0, params.k, size=z.y_set.size)
    return assigned


def uncolour_z_conflicts(g: Graph, z: UsableZ, assigned: np.ndarray) -> np.ndarray:
    """Apply the asymmetric rule; returns the colours kept (-1 = dropped)."""
    kmask = np.zeros(g.n, dtype=bool)
    for K in z.k_sets:
        kmask[K] = True
    e = g.edges()
    u, v = e[:, 0], e[:, 1]
    mono = (assigned[u] >= 0) & (assigned[u] == assigned[v])
    kept = assigned.copy()
    uu, vv = u[mono], v[mono]
    both_y = ~kmask[uu] & ~kmask[vv]
    drop = np.concatenate([uu[both_y], vv[both_y], uu[kmask[uu]], vv[kmask[vv]]])
    kept[drop] = -1
    return kept


@dataclass(frozen=True, eq=False)
class ZBadEventReport:
    """Counts for every tested vertex (those outside known big cliques)."""

    vertices: np.ndarray
    s: np.ndarray
    s_prime: np.ndarray
    s_double_prime: np.ndarray
    union: np.ndarray
    x: np.ndarray
    threshold: int
    bad: np.ndarray

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "s_v": self.s.tolist(),
            "s_v_prime": self.s_prime.tolist(),
            "s_v_double_prime": self.s_double_prime.tolist(),
            "x_v": self.x.tolist(),
            "bad": self.bad.tolist(),
        }


def z_bad_events(g: Graph, z: UsableZ, params: ZParams, assigned: np.ndarray, kept: np.ndarray, tested: np.ndarray) -> ZBadEventReport:
    """``S_v``: Z-neighbours whose assigned colour is unique in ``N(v)`` and
    kept; ``S'_v``: uncoloured Z-neighbours; ``S''_v``: Z-neighbours whose
    assigned colour occurs at least ``ceil(ln^2 delta)`` times in ``N(v) & Z``."""
    zmask = z.members(g.n)
    thr = math.ceil(math.log(params.delta) ** 2)
    verts = np.flatnonzero(tested)
    s = np.zeros(verts.size, dtype=np.int64)
    s1 = np.zeros_like(s)
    s2 = np.zeros_like(s)
    un = np.zeros_like(s)
    for j, v in enumerate(verts):
        nb = g.neighbours(v)
        nz = nb[zmask[nb]]
        a = assigned[nz]
        vals, inv, cnt = np.unique(a, return_inverse=True, return_counts=True)
        mult = cnt[inv]
        unc = kept[nz] < 0
        many = mult >= thr
        s[j] = int(np.sum((mult == 1) & ~unc))
        s1[j] = int(unc.sum())
        s2[j] = int(many.sum())
        un[j] = int(np.sum(unc | many))
    x = s - un
    bad = x < params.epsilon * params.delta
    return ZBadEventReport(verts, s, s1, s2, un, x, thr, verts[bad])


@dataclass
class ZColourResult:
    colouring: PartialColouring
    report: ZBadEventReport
    rounds: int
    residual_bad: int
    best_effort: bool
    peacefulness: int
    completion_violations: int
    tested_in_found_cliques: int

    def to_json(self) -> dict:
        return {
            "colouring": self.colouring.to_json(),
            "report": self.report.to_json(),
            "rounds": self.rounds,
            "residual_bad": self.residual_bad,
            "best_effort": self.best_effort,
            "peacefulness": self.peacefulness,
            "completion_violations": self.completion_violations,
            "tested_in_found_cliques": self.tested_in_found_cliques,
        }


def colour_Z(g: Graph, z: UsableZ, base: PartialColouring, params: ZParams, *, seed: int = 0, max_rounds: int = 1000, known_cliques=None) -> ZColourResult:
    """Colour ``Z`` from the spare palette, resample around bad events, then
    complete greedily at ``p = (1 - eps) delta`` with big cliques exempt."""
    P = params.complement_palette
    zmask = z.members(g.n)
    if np.any(base.colours[zmask] >= 0) or np.any(base.colours >= P):
        raise ValueError("base must leave Z uncoloured and use colours below delta + 1 - k")
    check_proper(g, base)
    rng = make_rng(seed)
    known = list(z.cliques) if known_cliques is None else list(known_cliques)
    big = [C for C in known if C.size >= params.big_clique]
    exempt = np.zeros(g.n, dtype=bool)
    for C in big:
        exempt[C] = True
    tested = ~exempt
    heur = [C for C in known if not any(C is D for D in z.cliques)]
    in_heur = np.zeros(g.n, dtype=bool)
    for C in heur:
        in_heur[C] = True
    kmask = np.zeros(g.n, dtype=bool)
    which_k = np.full(g.n, -1, dtype=np.int64)
    for i, K in enumerate(z.k_sets):
        kmask[K] = True
        which_k[K] = i
    assigned = assign_z_colours(g.n, z, params, rng)
    kept = uncolour_z_conflicts(g, z, assigned)
    rep = z_bad_events(g, z, params, assigned, kept, tested)
    rounds = 0
    while rep.bad.size and rounds < max_rounds:
        rounds += 1
        v = int(rep.bad[0])
        nb = g.neighbours(v)
        ball = np.unique(np.concatenate([g.neighbours(u) for u in nb] + [nb, [v]]))
        for u in ball[zmask[ball] & ~kmask[ball]]:
            assigned[u] = P + rng.integers(0, params.k)
        for i in np.unique(which_k[ball][which_k[ball] >= 0]):
            K = z.k_sets[i]
            assigned[rng.permutation(K)] = P + np.arange(K.size)
        kept = uncolour_z_conflicts(g, z, assigned)
        rep = z_bad_events(g, z, params, assigned, kept, tested)
    col = base.colours.copy()
    col[zmask] = kept[zmask]
    f = PartialColouring(col, params.delta + 1)
    check_proper(g, f)
    p = (1 - params.epsilon) * params.delta
    exempt_sets = [C for C in big if C.size >= params.delta + 1 - p / 2]
    done = greedy_complete(g, f, p=p, exempt=exempt_sets)
    final = done.colouring
    return ZColourResult(
        colouring=final,
        report=rep,
        rounds=rounds,
        residual_bad=int(rep.bad.size),
        best_effort=bool(rep.bad.size),
        peacefulness=peace_report(g, final).peacefulness,
        completion_violations=len(done.violations),
        tested_in_found_cliques=int(np.sum(tested & in_heur)),
    )


@dataclass
class ZPipelineResult:
    z: UsableZ
    complement_info: dict
    result: ZColourResult


def z_pipeline(g: Graph, epsilon=DEFAULT_EPSILON, *, seed: int = 0, max_rounds: int = 100_000, colour_rounds: int = 1000, strategy: str = "partial") -> ZPipelineResult:
    params = z_params(g.delta, epsilon)
    dense = prepare_dense_data(g, params)
    cliques = dense.cliques
    known = _known_cliques(g, params, cliques)
    z = sample_usable_Z(g, params, cliques, seed=seed, max_rounds=max_rounds, strategy=strategy)
    base, info = colour_complement(g, z, params, dense, seed=seed)
    res = colour_Z(g, z, base, params, seed=seed + 1, max_rounds=colour_rounds, known_cliques=known)
    return ZPipelineResult(z, info, res)

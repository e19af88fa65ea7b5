"""Iterative nibble colouring for graphs of small codegree.

Each iteration activates uncoloured vertices with probability ``alpha``, gives
each activated vertex a uniform colour from its list, applies equalizing coin
flips so that every listed colour survives with the common probability
``p*_i``, and truncates every list to the scheduled size. After the last
iteration the vertices of monochromatic edges are uncoloured.

The deterministic recurrences the procedure tracks (``l_i``, ``g_i``, ``D_i``,
``n_i``) are computed by :func:`idealized_trace`; :func:`simulate_star` runs
the same random process on a star.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .dsatur import dsatur_fill
from .graph import Graph, max_codegree
from .logs import plog
from .peace import PartialColouring, check_proper, peace_report
from .rng import hash_uniform, make_rng, split_seed

log = logging.getLogger(__name__)

__all__ = [
    "IdealizedTrace",
    "idealized_trace",
    "StarStats",
    "simulate_star",
    "NibbleState",
    "NibbleStats",
    "NibbleRestartError",
    "PostprocessError",
    "nibble_colour",
    "postprocess_recolour",
    "default_low_band",
    "audit_bookkeeping",
    "flip_probability",
    "retention_frequency",
    "MONITORS",
]

MONITORS = ("A", "B", "C", "D", "E")


# -- idealized recurrences -------------------------------------------------------------------

@dataclass(frozen=True)
class IdealizedTrace:
    """Recurrence values indexed from iteration 1: ``l[i - 1]`` is ``l_i``
    for ``i = 1 .. i_star + 1``."""

    delta: int
    b_const: float
    alpha: float
    i_star: int
    palette: int
    l: np.ndarray
    g: np.ndarray
    D: np.ndarray
    n: np.ndarray
    l_prime: np.ndarray

    def list_size(self, i: int) -> int:
        """Integer list length after truncation into iteration ``i``."""
        if i == 1:
            return self.palette
        return math.floor(self.l_prime[i - 1])

    def p_star(self, i: int) -> float:
        return (self.l_prime[i] + self.delta ** (2 / 3)) / self.l_prime[i - 1]

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "b_const": self.b_const,
            "alpha": self.alpha,
            "i_star": self.i_star,
            "palette": self.palette,
            "l": self.l.tolist(),
            "g": self.g.tolist(),
            "D": self.D.tolist(),
            "n": self.n.tolist(),
            "l_prime": self.l_prime.tolist(),
        }


def _check_delta(delta: int) -> None:
    if delta < 16 or plog(plog(delta)) <= 0:
        raise ValueError("delta must be at least 16 (and log log delta positive)")


def idealized_trace(delta: int, b_const: float = 4.0) -> IdealizedTrace:
    _check_delta(delta)
    L = plog(delta)
    LL = plog(L)
    alpha = 1.0 / L**2
    i_star = math.ceil(L**2 * LL)
    palette = delta + math.ceil(b_const * delta / LL)
    size = i_star + 1
    l = np.empty(size)
    g = np.empty(size)
    D = np.empty(size)
    n = np.empty(size)
    l[0], g[0], D[0] = palette, 0.0, float(delta)
    n[0] = alpha * D[0]
    shrink = 1.0 - 1.0 / palette
    for k in range(size - 1):
        factor = shrink ** n[k]
        l[k + 1] = l[k] * factor
        g[k + 1] = g[k] * factor + n[k] * l[k] / palette
        D[k + 1] = D[k] - n[k]
        n[k + 1] = alpha * D[k + 1]
    i = np.arange(1, size + 1)
    l_prime = l - np.ceil(i * delta / L**5)
    l_prime[0] = l[0]
    return IdealizedTrace(delta, float(b_const), alpha, i_star, palette, l, g, D, n, l_prime)


# -- star process -------------------------------------------------------------------------------

@numba.njit(cache=True)
def _star_trial(key, delta, palette, alpha, i_star, L, G, Dst, N):
    count = np.zeros(palette, dtype=np.int64)
    coloured = np.zeros(delta + 1, dtype=np.bool_)
    zeros = palette
    ones = 0
    unc = delta
    for it in range(1, i_star + 2):
        L[it - 1] = zeros
        G[it - 1] = ones
        Dst[it - 1] = unc
        if it == i_star + 1:
            break
        active = 0
        for w in range(1, delta + 1):
            if coloured[w]:
                continue
            if hash_uniform(key, it, w, 0) < alpha:
                c = int(hash_uniform(key, it, w, 1) * palette)
                if c >= palette:
                    c = palette - 1
                coloured[w] = True
                active += 1
                unc -= 1
                k = count[c]
                if k == 0:
                    zeros -= 1
                    ones += 1
                elif k == 1:
                    ones -= 1
                count[c] = k + 1
        N[it - 1] = active


@dataclass(frozen=True)
class StarStats:
    """Per-iteration samples (rows = trials) for the star process; column
    ``i - 1`` holds the values at the start of iteration ``i``."""

    trace: IdealizedTrace
    L: np.ndarray
    good: np.ndarray
    D: np.ndarray
    n: np.ndarray

    def summary(self) -> dict:
        out = {}
        for name in ("L", "good", "D", "n"):
            a = getattr(self, name)
            out[name] = {"mean": a.mean(axis=0).tolist(), "std": a.std(axis=0, ddof=1 if a.shape[0] > 1 else 0).tolist()}
        return out


def simulate_star(delta: int, b_const: float = 4.0, seed: int = 0, trials: int = 1) -> StarStats:
    """Run the idealized process on a star with ``delta`` leaves (leaf ids
    ``1..delta``, centre 0). Trial ``t`` uses stream ``split_seed(seed, t)``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tr = idealized_trace(delta, b_const)
    size = tr.i_star + 1
    L = np.zeros((trials, size), dtype=np.int64)
    G = np.zeros((trials, size), dtype=np.int64)
    D = np.zeros((trials, size), dtype=np.int64)
    N = np.zeros((trials, tr.i_star), dtype=np.int64)
    for t in range(trials):
        _star_trial(split_seed(seed, t), delta, tr.palette, tr.alpha, tr.i_star, L[t], G[t], D[t], N[t])
    return StarStats(tr, L, G, D, N)


# -- the iterative procedure -------------------------------------------------------------------

@numba.njit(cache=True)
def _kth_in_row(row, k):
    seen = 0
    for c in range(row.size):
        if row[c]:
            if seen == k:
                return c
            seen += 1
    return -1


@numba.njit(cache=True)
def _choose(key, it, alpha, col, inL, Lsize, hold):
    n = col.size
    chosen = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if col[v] >= 0 or hold[v] or Lsize[v] == 0:
            continue
        if hash_uniform(key, it, v, 0) < alpha:
            k = int(hash_uniform(key, it, v, 1) * Lsize[v])
            if k >= Lsize[v]:
                k = Lsize[v] - 1
            chosen[v] = _kth_in_row(inL[v], k)
    return chosen


@numba.njit(cache=True)
def flip_probability(q, p_star):
    """``x`` with ``q * (1 - x) = p_star``, clamped at 0."""
    if q <= p_star:
        return 0.0
    return 1.0 - p_star / q


def retention_frequency(delta: int, i: int, u: int, trials: int, b_const: float = 4.0, seed: int = 0) -> tuple[float, float, float]:
    """Monte Carlo survival rate of one listed colour through assignment and
    the equalizing flip, when ``u`` uncoloured neighbours may take it.
    Returns ``(frequency, p_star, q)``."""
    tr = idealized_trace(delta, b_const)
    size = tr.list_size(i)
    p_star = tr.p_star(i)
    q = (1.0 - tr.alpha / size) ** u
    x = flip_probability(q, p_star)
    rng = make_rng(seed)
    taken = rng.binomial(u, tr.alpha / size, size=trials) > 0
    flipped = rng.random(trials) < x
    return float(np.mean(~taken & ~flipped)), float(p_star), float(q)


@numba.njit(cache=True)
def _flips(key, it, inL, Lsize, Dv, M, qtable, p_star, ev_v, ev_c, n_ev):
    """Equalizing coin flips; returns (events, clamped pairs)."""
    n, P = inL.shape
    clamped = 0
    for v in range(n):
        row = inL[v]
        mrow = M[v]
        d = Dv[v]
        for c in range(P):
            if row[c] == 0:
                continue
            q = qtable[d - mrow[c]]
            if q <= p_star:
                clamped += 1
                continue
            x = flip_probability(q, p_star)
            if hash_uniform(key, it, v, 2 + c) < x:
                row[c] = 0
                Lsize[v] -= 1
                ev_v[n_ev] = v
                ev_c[n_ev] = c
                n_ev += 1
    return n_ev, clamped


@numba.njit(cache=True)
def _assign(it, chosen, col, assigned_at, indptr, indices, inL, Lsize, badflag, newbad, ev_v, ev_c, n_ev):
    n = col.size
    for w in range(n):
        c = chosen[w]
        if c < 0:
            continue
        col[w] = c
        assigned_at[w] = it
        for a in range(indptr[w], indptr[w + 1]):
            x = indices[a]
            if chosen[x] == c:
                if not badflag[w]:
                    badflag[w] = True
                    newbad[w] = True
            if inL[x, c]:
                inL[x, c] = 0
                Lsize[x] -= 1
                ev_v[n_ev] = x
                ev_c[n_ev] = c
                n_ev += 1
    return n_ev


@numba.njit(cache=True)
def _truncate(key, it, target, inL, Lsize, slot0, ev_v, ev_c, n_ev):
    """Remove a uniform random subset so that every list has ``target``
    colours; returns (events, number of short lists)."""
    n, P = inL.shape
    short = 0
    for v in range(n):
        excess = Lsize[v] - target
        if excess < 0:
            short += 1
            continue
        if excess == 0:
            continue
        m = Lsize[v]
        # Floyd's algorithm: `excess` distinct positions in [0, m)
        picked = np.zeros(m, dtype=np.bool_)
        for j in range(m - excess, m):
            t = int(hash_uniform(key, it, v, slot0 + j) * (j + 1))
            if t > j:
                t = j
            if picked[t]:
                picked[j] = True
            else:
                picked[t] = True
        pos = 0
        row = inL[v]
        for c in range(P):
            if row[c]:
                if picked[pos]:
                    row[c] = 0
                    ev_v[n_ev] = v
                    ev_c[n_ev] = c
                    n_ev += 1
                pos += 1
        Lsize[v] = target
    return n_ev, short


@numba.njit(cache=True)
def _bookkeep(indptr, indices, newly, col, inL, ev_ptr, ev_cols, Dv, M, cnt, good, badflag, newbad, bad_count, newbad_count):
    """Vertex-major update of D, M, colour counts, Good and Bad counts."""
    n, P = inL.shape
    # complement of the list each newly coloured vertex held at the start
    # of the iteration: colours absent now and not removed this iteration
    comp_ptr = np.zeros(n + 1, dtype=np.int64)
    stamp = np.full(P, -1, dtype=np.int64)
    total = 0
    for w in range(n):
        if newly[w]:
            for e in range(ev_ptr[w], ev_ptr[w + 1]):
                stamp[ev_cols[e]] = w
            for c in range(P):
                if inL[w, c] == 0 and stamp[c] != w:
                    total += 1
        comp_ptr[w + 1] = total
    comp = np.empty(total, dtype=np.int64)
    pos = 0
    stamp[:] = -1
    for w in range(n):
        if newly[w]:
            for e in range(ev_ptr[w], ev_ptr[w + 1]):
                stamp[ev_cols[e]] = w
            for c in range(P):
                if inL[w, c] == 0 and stamp[c] != w:
                    comp[pos] = c
                    pos += 1
    for v in range(n):
        mrow = M[v]
        crow = cnt[v]
        nb_new = 0
        for a in range(indptr[v], indptr[v + 1]):
            w = indices[a]
            if newly[w]:
                Dv[v] -= 1
                for k in range(comp_ptr[w], comp_ptr[w + 1]):
                    mrow[comp[k]] -= 1
                c = col[w]
                crow[c] += 1
                if crow[c] == 1:
                    good[v] += 1
                elif crow[c] == 2:
                    good[v] -= 1
                if newbad[w]:
                    bad_count[v] += 1
                    nb_new += 1
            elif col[w] < 0:
                for e in range(ev_ptr[w], ev_ptr[w + 1]):
                    mrow[ev_cols[e]] += 1
        newbad_count[v] = nb_new


def _events_csr(n, ev_v, ev_c, n_ev):
    v = ev_v[:n_ev]
    order = np.argsort(v, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(v, minlength=n), out=ptr[1:])
    return ptr, ev_c[:n_ev][order]


@dataclass
class NibbleState:
    """Live state of one run. ``M[v, c]`` counts uncoloured neighbours of
    ``v`` whose list lacks ``c``, so ``U_{v,c} = D[v] - M[v, c]``."""

    graph: Graph
    trace: IdealizedTrace
    key: int
    iteration: int
    colours: np.ndarray
    assigned_at: np.ndarray
    in_list: np.ndarray
    list_size: np.ndarray
    D: np.ndarray
    M: np.ndarray
    count: np.ndarray
    good: np.ndarray
    bad_flag: np.ndarray
    bad_count: np.ndarray
    new_bad_count: np.ndarray

    def U(self, v: int, c: int) -> int:
        return int(self.D[v] - self.M[v, c])


@dataclass
class NibbleStats:
    palette: int
    i_star: int
    restarts: int
    anomalies: int
    short_lists: int
    monitor_violations: dict[str, int]
    uncoloured_bad: int
    coloured: int
    unique_neighbours: np.ndarray
    codegree_checked: int | None
    trace: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["unique_neighbours"] = self.unique_neighbours.tolist()
        return d


class NibbleRestartError(RuntimeError):
    def __init__(self, message: str, stats: NibbleStats):
        super().__init__(message)
        self.stats = stats


def _monitor(state: NibbleState, i: int, sample: np.ndarray) -> dict[str, int]:
    tr = state.trace
    delta = tr.delta
    L = plog(delta)
    viol = dict.fromkeys(MONITORS, 0)
    Dv = state.D[sample]
    viol["A"] = int(np.sum(np.abs(Dv - tr.D[i - 1]) > delta ** (2 / 3)))
    if i >= 2:
        viol["B"] = int(np.sum(state.new_bad_count[sample] > delta / L**3))
    U = Dv[:, None] - state.M[sample].astype(np.int64)
    own = state.colours[sample]
    mask = np.ones_like(U, dtype=bool)
    has = own >= 0
    mask[np.flatnonzero(has), own[has]] = False
    hi = np.where(mask, U, np.iinfo(np.int64).min).max(axis=1)
    lo = np.where(mask, U, np.iinfo(np.int64).max).min(axis=1)
    viol["C"] = int(np.sum(hi - lo > delta / L**4))
    viol["D"] = int(np.sum(state.list_size[sample] != tr.list_size(i)))
    viol["E"] = int(np.sum(state.good[sample] < tr.g[i - 1] - i * delta / L**3.5))
    return viol


def _run(g: Graph, tr: IdealizedTrace, key: int, *, equalize: bool, truncate: bool, hold: np.ndarray,
         sample: np.ndarray, stop_on_violation: bool, on_iteration: Callable | None):
    n, P = g.n, tr.palette
    small = np.int16 if tr.delta < 32_000 else np.int32
    state = NibbleState(
        graph=g,
        trace=tr,
        key=key,
        iteration=1,
        colours=np.full(n, -1, dtype=np.int64),
        assigned_at=np.zeros(n, dtype=np.int64),
        in_list=np.ones((n, P), dtype=np.uint8),
        list_size=np.full(n, P, dtype=np.int64),
        D=g.degree.astype(np.int64).copy(),
        M=np.zeros((n, P), dtype=small),
        count=np.zeros((n, P), dtype=small),
        good=np.zeros(n, dtype=np.int64),
        bad_flag=np.zeros(n, dtype=np.bool_),
        bad_count=np.zeros(n, dtype=np.int64),
        new_bad_count=np.zeros(n, dtype=np.int64),
    )
    cap = max(1, int(g.indptr[-1]) + 2 * n * 64)
    ev_v = np.empty(cap, dtype=np.int64)
    ev_c = np.empty(cap, dtype=np.int64)
    trace_rows = []
    totals = dict.fromkeys(MONITORS, 0)
    anomalies = 0
    short_total = 0
    violated = False
    for i in range(1, tr.i_star + 1):
        state.iteration = i
        viol = _monitor(state, i, sample) if sample.size else dict.fromkeys(MONITORS, 0)
        for k, x in viol.items():
            totals[k] += x
        target = tr.list_size(i)
        nxt = tr.list_size(i + 1)
        p_star = tr.p_star(i)
        chosen = _choose(key, i, tr.alpha, state.colours, state.in_list, state.list_size, hold)
        newly = chosen >= 0
        need = int(n * P) if equalize else 0
        if ev_v.size < need + int(g.indptr[-1]) + n * P // 4:
            size = need + int(g.indptr[-1]) + n * P // 4
            ev_v = np.empty(size, dtype=np.int64)
            ev_c = np.empty(size, dtype=np.int64)
        n_ev = 0
        clamped = 0
        if equalize:
            qtable = (1.0 - tr.alpha / target) ** np.arange(tr.delta + 1, dtype=np.float64)
            n_ev, clamped = _flips(key, i, state.in_list, state.list_size, state.D, state.M, qtable, p_star, ev_v, ev_c, n_ev)
        newbad = np.zeros(n, dtype=np.bool_)
        n_ev = _assign(i, chosen, state.colours, state.assigned_at, g.indptr, g.indices, state.in_list,
                       state.list_size, state.bad_flag, newbad, ev_v, ev_c, n_ev)
        short = 0
        if truncate:
            n_ev, short = _truncate(key, i, nxt, state.in_list, state.list_size, 2 + P, ev_v, ev_c, n_ev)
        ptr, cols = _events_csr(n, ev_v, ev_c, n_ev)
        _bookkeep(g.indptr, g.indices, newly, state.colours, state.in_list, ptr, cols, state.D, state.M,
                  state.count, state.good, state.bad_flag, newbad, state.bad_count, state.new_bad_count)
        anomalies += clamped
        short_total += short
        row = {
            "i": i,
            "l": float(tr.l[i - 1]),
            "l_prime": float(tr.l_prime[i - 1]),
            "list_size": target,
            "p_star": float(p_star),
            "activated": int(newly.sum()),
            "new_bad": int(newbad.sum()),
            "clamped_flips": int(clamped),
            "short_lists": int(short),
            "monitors": viol,
        }
        trace_rows.append(row)
        state.iteration = i + 1
        if on_iteration is not None:
            on_iteration(state)
        if any(viol.values()):
            violated = True
            if stop_on_violation:
                break
    if not violated or not stop_on_violation:
        viol = _monitor(state, tr.i_star + 1, sample) if sample.size else dict.fromkeys(MONITORS, 0)
        for k, x in viol.items():
            totals[k] += x
        if trace_rows:
            trace_rows[-1]["final_monitors"] = viol
        violated = violated or any(viol.values())
    return state, trace_rows, totals, anomalies, short_total, violated


def nibble_colour(
    g: Graph,
    b_const: float = 4.0,
    seed: int = 0,
    policy: str = "monitor-only",
    *,
    max_restarts: int = 5,
    monitor_sample: int = 64,
    equalize: bool = True,
    truncate: bool = True,
    hold=(),
    on_iteration: Callable[[NibbleState], None] | None = None,
) -> tuple[PartialColouring, NibbleStats]:
    """Run the iterative procedure and strip the colours of every vertex in a
    monochromatic edge.

    ``policy`` is ``"monitor-only"`` (log condition violations) or
    ``"restart-on-violation"`` (redraw everything, at most ``max_restarts``
    times). ``equalize``, ``truncate`` and ``hold`` (vertices never
    activated) exist for diagnostics.
    """
    if policy not in ("monitor-only", "restart-on-violation"):
        raise ValueError(f"unknown policy {policy!r}")
    tr = idealized_trace(g.delta, b_const)
    L = plog(g.delta)
    codeg = None
    if g.n * g.delta**2 <= 2 * 10**9:
        codeg = max_codegree(g)
        if codeg > math.sqrt(g.delta) / L**8:
            log.warning("max codegree %d exceeds sqrt(delta)/log^8(delta) = %.3g", codeg, math.sqrt(g.delta) / L**8)
    else:
        log.info("codegree check skipped for a graph of this size")
    hold_mask = np.zeros(g.n, dtype=np.bool_)
    hold_mask[np.asarray(list(hold), dtype=np.int64)] = True
    sample_rng = make_rng(split_seed(seed, 10**6))
    k = min(monitor_sample, g.n)
    sample = np.sort(sample_rng.choice(g.n, size=k, replace=False)) if k else np.zeros(0, dtype=np.int64)
    restarts = 0
    while True:
        key = seed if restarts == 0 else split_seed(seed, restarts)
        stop = policy == "restart-on-violation"
        state, rows, totals, anomalies, short, violated = _run(
            g, tr, key, equalize=equalize, truncate=truncate, hold=hold_mask, sample=sample,
            stop_on_violation=stop, on_iteration=on_iteration,
        )
        if anomalies:
            log.info("clamped %d equalizing flips (x would be negative)", anomalies)
        if not (stop and violated):
            break
        if restarts >= max_restarts:
            col = state.colours.copy()
            col[state.bad_flag] = -1
            stats = _stats(g, tr, col, state, restarts, anomalies, short, totals, codeg, rows)
            raise NibbleRestartError(f"monitors still violated after {restarts} restarts", stats)
        restarts += 1
    col = state.colours.copy()
    col[state.bad_flag] = -1
    f = PartialColouring(col, tr.palette)
    check_proper(g, f)
    return f, _stats(g, tr, col, state, restarts, anomalies, short, totals, codeg, rows)


def _stats(g, tr, col, state, restarts, anomalies, short, totals, codeg, rows) -> NibbleStats:
    f = PartialColouring(col, tr.palette)
    rep = peace_report(g, f, check=False)
    return NibbleStats(
        palette=tr.palette,
        i_star=tr.i_star,
        restarts=restarts,
        anomalies=int(anomalies),
        short_lists=int(short),
        monitor_violations=totals,
        uncoloured_bad=int(state.bad_flag.sum()),
        coloured=int(np.sum(col >= 0)),
        unique_neighbours=rep.undisturbed,
        codegree_checked=codeg,
        trace=rows,
    )


# -- from-scratch recomputation ---------------------------------------------------------------------

def audit_bookkeeping(state: NibbleState, samples: int = 100, seed: int = 0) -> list[str]:
    """Recompute Good, Bad, D, list sizes and ``samples`` values of
    ``U_{v,c}`` directly from colours and lists; return the mismatches."""
    g = state.graph
    n, P = state.in_list.shape
    problems = []
    col = state.colours
    src = np.repeat(np.arange(n), g.degree)
    dst = g.indices.astype(np.int64)
    uncol = col < 0
    D = np.bincount(src, weights=uncol[dst], minlength=n).astype(np.int64)
    if not np.array_equal(D, state.D):
        problems.append("D")
    sizes = state.in_list.sum(axis=1, dtype=np.int64)
    if not np.array_equal(sizes, state.list_size):
        problems.append("list_size")
    coloured_arc = col[dst] >= 0
    keys = src[coloured_arc] * P + col[dst][coloured_arc]
    uk, uc = np.unique(keys, return_counts=True)
    good = np.bincount(uk[uc == 1] // P, minlength=n)
    if not np.array_equal(good, state.good):
        problems.append("Good")
    mono = coloured_arc & (col[src] == col[dst])
    in_mono = np.zeros(n, dtype=bool)
    in_mono[src[mono]] = True
    if not np.array_equal(in_mono, state.bad_flag):
        problems.append("bad_flag")
    bad = np.bincount(src, weights=in_mono[dst], minlength=n).astype(np.int64)
    if not np.array_equal(bad, state.bad_count):
        problems.append("Bad")
    # lists never hold a colour already on a neighbour
    nb_col = np.flatnonzero(coloured_arc)
    if np.any(state.in_list[src[nb_col], col[dst[nb_col]]]):
        problems.append("list holds a neighbour's colour")
    rng = make_rng(seed)
    for v, c in zip(rng.integers(0, n, samples), rng.integers(0, P, samples)):
        nb = g.neighbours(v)
        direct = int(np.sum((col[nb] < 0) & (state.in_list[nb, c] == 1)))
        if direct != state.U(int(v), int(c)):
            problems.append(f"U[{v},{c}]")
    return problems


# -- postprocessing --------------------------------------------------------------------------------

class PostprocessError(RuntimeError):
    pass


def default_low_band(delta: int) -> int:
    """``ceil(4 delta / log delta)``, capped at the ``delta + 1`` colours available."""
    return min(delta + 1, math.ceil(4 * delta / plog(delta)))


def postprocess_recolour(g: Graph, f: PartialColouring, c_prime: int | None = None, *, delta: int | None = None) -> tuple[PartialColouring, dict]:
    """Uncolour the low band ``[0, c_prime)`` and every colour above
    ``delta``, then recolour all uncoloured vertices inside the low band.

    Returns a total colouring with palette ``delta + 1`` and a summary.
    """
    delta = g.delta if delta is None else delta
    c_prime = default_low_band(delta) if c_prime is None else c_prime
    if not 1 <= c_prime <= delta + 1:
        raise ValueError("low band must have between 1 and delta + 1 colours")
    check_proper(g, f)
    col = f.colours.copy()
    in_band = (col >= 0) & ((col < c_prime) | (col > delta))
    col[in_band] = -1
    todo = np.flatnonzero(col < 0)
    ok = dsatur_fill(g, col, c_prime, todo)
    if not ok:
        raise PostprocessError(
            f"greedy recolouring needs more than {c_prime} colours; pass a larger c_prime"
        )
    out = PartialColouring(col, delta + 1)
    return out, {"c_prime": c_prime, "band_removed": int(in_band.sum()), "recoloured": int(todo.size)}

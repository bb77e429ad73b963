"""Nested 2-path covers.

Level ``t + 1`` is built from level ``t`` in two steps: LR-deg picks the cover
vertices (every vertex outside the cover has all its neighbours inside it) and
every in/out edge pair through a non-cover vertex becomes a candidate cover
edge.  Cover edges keep enough provenance to be unpacked into base edges.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol, Union

import numpy as np

from .core import MAX_COST, CostOverflowError, CostVector, Graph

# prov_out value marking an edge copied verbatim from the level below
COPIED = -1

# (in_edge, out_edge) at a junction -> may a route continue from one to the other
PairPredicate = Callable[[int, int], bool]


class LevelGraph(Protocol):
    criterion_count: int
    src: list[int]
    dst: list[int]
    cost: list[CostVector]

    @property
    def edge_count(self) -> int: ...

    def vertices(self) -> Iterable[int]: ...

    def out_edges(self, v: int) -> list[int]: ...

    def in_edges(self, v: int) -> list[int]: ...


@dataclass(frozen=True)
class Copied:
    edge: int


@dataclass(frozen=True)
class Composed:
    in_edge: int
    out_edge: int


EdgeProvenance = Union[Copied, Composed]


@dataclass
class CoverLevel:
    level: int
    vertex_count: int
    members: set[int]
    criterion_count: int = 2
    src: list[int] = field(default_factory=list)
    dst: list[int] = field(default_factory=list)
    cost: list[CostVector] = field(default_factory=list)
    prov_in: list[int] = field(default_factory=list)
    prov_out: list[int] = field(default_factory=list)
    out_adj: dict[int, list[int]] = field(default_factory=dict)
    in_adj: dict[int, list[int]] = field(default_factory=dict)
    _arrays: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    def vertices(self) -> list[int]:
        return sorted(self.members)

    def out_edges(self, v: int) -> list[int]:
        return self.out_adj.get(v, [])

    def in_edges(self, v: int) -> list[int]:
        return self.in_adj.get(v, [])

    def provenance(self, e: int) -> EdgeProvenance:
        if self.prov_out[e] == COPIED:
            return Copied(self.prov_in[e])
        return Composed(self.prov_in[e], self.prov_out[e])

    def add_edge(self, u: int, w: int, cost: CostVector, prov_in: int, prov_out: int) -> int:
        e = len(self.src)
        self.src.append(u)
        self.dst.append(w)
        self.cost.append(cost)
        self.prov_in.append(prov_in)
        self.prov_out.append(prov_out)
        self.out_adj.setdefault(u, []).append(e)
        self.in_adj.setdefault(w, []).append(e)
        return e


def _weakly_dominates(a: CostVector, b: CostVector) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def lr_deg_select(g: LevelGraph) -> set[int]:
    """Pick a 2-path cover with the LR-deg rule.

    Vertices are visited by ascending total degree (ties by id); a vertex not
    yet in the cover pulls all of its in- and out-neighbours into it.
    """
    src, dst = g.src, g.dst
    order = sorted(g.vertices(), key=lambda v: (len(g.out_edges(v)) + len(g.in_edges(v)), v))
    cover: set[int] = set()
    for v in order:
        if v in cover:
            continue
        for e in g.out_edges(v):
            cover.add(dst[e])
        for e in g.in_edges(v):
            cover.add(src[e])
    return cover


def build_cover_edges(
    g: LevelGraph,
    cover: set[int],
    level: int,
    vertex_count: int,
    admissible: PairPredicate | None = None,
) -> CoverLevel:
    src, dst, cost = g.src, g.dst, g.cost
    buckets: dict[tuple[int, int], list[tuple[CostVector, int, int]]] = {}

    def offer(u: int, w: int, c: CostVector, a: int, b: int) -> None:
        key = (u, w)
        entries = buckets.get(key)
        if entries is None:
            buckets[key] = [(c, a, b)]
            return
        for other in entries:
            if _weakly_dominates(other[0], c):
                return
        kept = [o for o in entries if not _weakly_dominates(c, o[0])]
        kept.append((c, a, b))
        buckets[key] = kept

    for e in range(g.edge_count):
        if src[e] in cover and dst[e] in cover:
            offer(src[e], dst[e], cost[e], e, COPIED)

    for x in g.vertices():
        if x in cover:
            continue
        outs = g.out_edges(x)
        if not outs:
            continue
        for e_in in g.in_edges(x):
            u = src[e_in]
            c_in = cost[e_in]
            for e_out in outs:
                w = dst[e_out]
                if u == w:
                    continue
                if admissible is not None and not admissible(e_in, e_out):
                    continue
                c = tuple(p + r for p, r in zip(c_in, cost[e_out]))
                if max(c) > MAX_COST:
                    raise CostOverflowError(f"composed cost {c} exceeds int64 range")
                offer(u, w, c, e_in, e_out)

    out = CoverLevel(level=level, vertex_count=vertex_count, members=set(cover), criterion_count=g.criterion_count)
    # canonical order: by (from, to), then cost
    for u, w in sorted(buckets):
        for c, a, b in sorted(buckets[(u, w)]):
            out.add_edge(u, w, c, a, b)
    return out


def _level_arrays(g: LevelGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    cached = getattr(g, "_arrays", None)
    if cached is not None:
        return cached
    q = g.criterion_count
    src = np.asarray(g.src, dtype=np.int64)
    dst = np.asarray(g.dst, dtype=np.int64)
    cost = np.asarray(g.cost, dtype=np.int64).reshape(-1, q)
    return src, dst, cost


def _pareto_sweep(key: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Keep-mask for candidates sorted by (key, cost lexicographically, arrival).

    A candidate can only be weakly dominated by one sorted before it, so one
    forward pass per bucket suffices.
    """
    m, q = cost.shape
    if m == 0:
        return np.zeros(0, dtype=bool)
    start = np.ones(m, dtype=bool)
    start[1:] = key[1:] != key[:-1]
    if q == 2:
        seg = np.cumsum(start) - 1
        big = int(cost[:, 1].max()) + 1
        if int(seg[-1]) * big < 2**62:
            # per-bucket running minimum of the second criterion, reset by a
            # descending offset per bucket
            v = cost[:, 1] - seg * big
            prev = np.empty(m, dtype=np.int64)
            prev[0] = np.iinfo(np.int64).max
            prev[1:] = np.minimum.accumulate(v)[:-1]
            return v < prev
    keep = np.zeros(m, dtype=bool)
    rows = cost.tolist()
    kept: list[list[int]] = []
    for i, row in enumerate(rows):
        if start[i]:
            kept = []
        for other in kept:
            if _weakly_dominates(other, row):
                break
        else:
            kept.append(row)
            keep[i] = True
    return keep


def _fast_cover_edges(g: LevelGraph, cover: set[int], level: int, vertex_count: int) -> CoverLevel:
    """Vectorized twin of :func:`build_cover_edges` (same edges, same order)."""
    n = vertex_count
    q = g.criterion_count
    src, dst, cost = _level_arrays(g)
    in_cover = np.zeros(n, dtype=bool)
    if cover:
        in_cover[np.fromiter(cover, dtype=np.int64, count=len(cover))] = True

    copied = np.flatnonzero(in_cover[src] & in_cover[dst])

    # in-edges of non-cover vertices, grouped by vertex, edge ids ascending
    ein = np.flatnonzero(~in_cover[dst])
    ein = ein[np.argsort(dst[ein], kind="stable")]
    out_sorted = np.argsort(src, kind="stable")
    outdeg = np.bincount(src, minlength=n)
    out_start = np.cumsum(outdeg) - outdeg
    x = dst[ein]
    rep = outdeg[x]
    total = int(rep.sum())
    ein_rep = np.repeat(ein, rep)
    within = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(rep) - rep, rep)
    eout = out_sorted[np.repeat(out_start[x], rep) + within]
    u = src[ein_rep]
    w = dst[eout]
    ok = u != w
    ein_rep, eout, u, w = ein_rep[ok], eout[ok], u[ok], w[ok]
    composed_cost = cost[ein_rep] + cost[eout]
    if composed_cost.size and composed_cost.min() < 0:
        raise CostOverflowError(f"composed cost exceeds int64 range at level {level}")

    cu = np.concatenate([src[copied], u])
    cw = np.concatenate([dst[copied], w])
    cc = np.concatenate([cost[copied], composed_cost]).reshape(-1, q)
    pin = np.concatenate([copied, ein_rep])
    pout = np.concatenate([np.full(len(copied), COPIED, dtype=np.int64), eout])
    key = cu * n + cw
    sort_keys = [np.arange(len(key))] + [cc[:, j] for j in range(q - 1, -1, -1)] + [key]
    order = np.lexsort(sort_keys)
    cu, cw, cc, pin, pout, key = cu[order], cw[order], cc[order], pin[order], pout[order], key[order]
    keep = _pareto_sweep(key, cc)
    cu, cw, cc, pin, pout = cu[keep], cw[keep], cc[keep], pin[keep], pout[keep]

    out = CoverLevel(level=level, vertex_count=n, members=set(cover), criterion_count=q)
    out.src = cu.tolist()
    out.dst = cw.tolist()
    out.cost = list(zip(*(cc[:, j].tolist() for j in range(q)))) if len(cu) else []
    out.prov_in = pin.tolist()
    out.prov_out = pout.tolist()
    m = len(out.src)
    if m:
        # edges are grouped by source already
        bounds = np.flatnonzero(np.diff(cu)) + 1
        starts = [0] + bounds.tolist()
        ends = bounds.tolist() + [m]
        out.out_adj = {out.src[a]: list(range(a, b)) for a, b in zip(starts, ends)}
        by_dst = np.argsort(cw, kind="stable")
        sorted_dst = cw[by_dst]
        bounds = np.flatnonzero(np.diff(sorted_dst)) + 1
        ids = by_dst.tolist()
        starts = [0] + bounds.tolist()
        ends = bounds.tolist() + [m]
        dsts = sorted_dst[starts].tolist()
        out.in_adj = {v: ids[a:b] for v, a, b in zip(dsts, starts, ends)}
    out._arrays = (cu, cw, cc)
    return out


@dataclass
class LevelStats:
    level: int
    k: int
    vertices: int
    edges: int
    seconds: float
    cumulative_seconds: float


STATS_COLUMNS = ("level", "k", "vertices", "edges", "seconds", "cumulative_seconds")


@dataclass
class CoverStats:
    rows: list[LevelStats] = field(default_factory=list)

    def to_csv(self, target: str | Path | io.TextIOBase | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(STATS_COLUMNS)
        for r in self.rows:
            writer.writerow([r.level, r.k, r.vertices, r.edges, f"{r.seconds:.6f}", f"{r.cumulative_seconds:.6f}"])
        text = buf.getvalue()
        if isinstance(target, (str, Path)):
            Path(target).write_text(text)
        elif target is not None:
            target.write(text)
        return text

    def as_dicts(self) -> list[dict]:
        return [dict(zip(STATS_COLUMNS, (r.level, r.k, r.vertices, r.edges, r.seconds, r.cumulative_seconds))) for r in self.rows]


class HierarchicalCover:
    """Base graph plus cover levels ``1..T`` and the top level of every vertex."""

    def __init__(self, base: Graph, levels: list[CoverLevel], top_level: list[int] | None = None) -> None:
        self.base = base
        self.levels = levels
        if top_level is None:
            top_level = [0] * base.vertex_count
            for lvl in levels:
                for v in lvl.members:
                    if top_level[v] < lvl.level:
                        top_level[v] = lvl.level
        self.top_level_of = top_level
        self._up_out: list[list[tuple[int, CostVector, int, int]]] | None = None
        self._up_in: list[list[tuple[int, CostVector, int, int]]] | None = None

    @property
    def level_count(self) -> int:
        return len(self.levels)

    @property
    def vertex_count(self) -> int:
        return self.base.vertex_count

    @property
    def criterion_count(self) -> int:
        return self.base.criterion_count

    def level(self, t: int) -> Graph | CoverLevel:
        return self.base if t == 0 else self.levels[t - 1]

    def top_level(self, v: int) -> int:
        return self.top_level_of[v]

    def top_vertices(self) -> set[int]:
        if not self.levels:
            return set(range(self.vertex_count))
        return set(self.levels[-1].members)

    def truncated(self, top: int) -> "HierarchicalCover":
        """View of this hierarchy with only levels ``0..top``; shares level data."""
        if top >= self.level_count:
            return self
        if top < 0:
            raise ValueError("level must be non-negative")
        return HierarchicalCover(self.base, self.levels[:top], [min(t, top) for t in self.top_level_of])

    def unpack_edge(self, level: int, e: int) -> list[int]:
        out: list[int] = []
        stack = [(level, e)]
        while stack:
            t, e = stack.pop()
            if t == 0:
                out.append(e)
                continue
            lvl = self.levels[t - 1]
            a, b = lvl.prov_in[e], lvl.prov_out[e]
            if b == COPIED:
                stack.append((t - 1, a))
            else:
                stack.append((t - 1, b))
                stack.append((t - 1, a))
        return out

    def edge_cost(self, level: int, e: int) -> CostVector:
        return self.level(level).cost[e]

    def _upward(self, forward: bool) -> list[list[tuple[int, CostVector, int, int]]]:
        n = self.vertex_count
        adj: list[list[tuple[int, CostVector, int, int]]] = [[] for _ in range(n)]
        for v in range(n):
            t = self.top_level_of[v]
            g = self.level(t)
            if forward:
                far = g.dst
                eids = g.out_edges(v)
            else:
                far = g.src
                eids = g.in_edges(v)
            cost = g.cost
            adj[v] = [(far[e], cost[e], t, e) for e in eids]
        return adj

    def upward_out(self) -> list[list[tuple[int, CostVector, int, int]]]:
        """Per vertex ``v``: ``(target, cost, level, edge)`` for out-edges of ``v`` at level ``T(v)``."""
        if self._up_out is None:
            self._up_out = self._upward(True)
        return self._up_out

    def upward_in(self) -> list[list[tuple[int, CostVector, int, int]]]:
        """Per vertex ``v``: ``(source, cost, level, edge)`` for in-edges of ``v`` at level ``T(v)``."""
        if self._up_in is None:
            self._up_in = self._upward(False)
        return self._up_in


def top_level(h: HierarchicalCover, v: int) -> int:
    return h.top_level_of[v]


def unpack_edge(h: HierarchicalCover, level: int, e: int) -> list[int]:
    return h.unpack_edge(level, e)


def build_level(g: LevelGraph, level: int, vertex_count: int, admissible: PairPredicate | None = None) -> CoverLevel:
    cover = lr_deg_select(g)
    if admissible is None:
        return _fast_cover_edges(g, cover, level, vertex_count)
    return build_cover_edges(g, cover, level, vertex_count, admissible)


def _junction_edges(lvl: CoverLevel, first_below: list[int], last_below: list[int]) -> tuple[list[int], list[int]]:
    first = [first_below[a] for a in lvl.prov_in]
    last = [last_below[a if b == COPIED else b] for a, b in zip(lvl.prov_in, lvl.prov_out)]
    return first, last


def _lift_predicate(admissible: PairPredicate, first: list[int], last: list[int]) -> PairPredicate:
    def pred(e_in: int, e_out: int) -> bool:
        return admissible(last[e_in], first[e_out])

    return pred


def build_hierarchy(
    base: Graph,
    levels: int,
    admissible: PairPredicate | None = None,
) -> tuple[HierarchicalCover, CoverStats]:
    """Build ``levels`` nested covers on top of ``base``.

    ``admissible(base_in, base_out)`` can veto continuing from one base edge
    to the next at a junction (turn restrictions); it is consulted at every
    level with the base edges meeting at the non-cover vertex.
    """
    if levels < 0:
        raise ValueError("level count must be >= 0")
    stats = CoverStats([LevelStats(0, 1, base.vertex_count, base.edge_count, 0.0, 0.0)])
    built: list[CoverLevel] = []
    g: LevelGraph = base
    first = last = list(range(base.edge_count))
    cumulative = 0.0
    for t in range(1, levels + 1):
        started = time.perf_counter()
        pred = None
        if admissible is not None:
            pred = _lift_predicate(admissible, first, last)
        lvl = build_level(g, t, base.vertex_count, pred)
        if admissible is not None:
            first, last = _junction_edges(lvl, first, last)
        elapsed = time.perf_counter() - started
        cumulative += elapsed
        built.append(lvl)
        stats.rows.append(LevelStats(t, 2**t, len(lvl.members), lvl.edge_count, elapsed, cumulative))
        g = lvl
    return HierarchicalCover(base, built), stats

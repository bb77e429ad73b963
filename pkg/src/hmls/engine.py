"""Label-setting multicriteria searches.

All searches settle labels in lexicographic cost order from a binary heap with
lazy invalidation: a popped label is skipped when a dominating sibling has
evicted it from its vertex's temporary set.  Labels live in a per-query arena
(parallel lists indexed by label id); the id doubles as the heap tiebreak, so
runs are deterministic.

Hierarchical queries expand a vertex ``v`` only over the edges of level
``T(v)``.  With the independent-set property of 2-path covers every such step
climbs at least one level until the top level is reached, so the backward
stage is finite even without domination checks.
"""

from __future__ import annotations

import heapq
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import MAX_COST, CostOverflowError, CostVector, Graph, ParetoSet, zero_cost
from .cover import CoverLevel, HierarchicalCover

# (target, cost, level, edge id)
Arc = tuple[int, CostVector, int, int]
Hop = tuple[int, int]

CHECK_SETTLING = os.environ.get("HMLS_CHECK_SETTLING", "") not in ("", "0")

_DEADLINE_STRIDE = 2048


class QueryTimeout(RuntimeError):
    pass


class SettlingOrderError(AssertionError):
    pass


def truncate(c: CostVector) -> CostVector:
    if len(c) < 2:
        raise ValueError("truncation needs at least two criteria")
    return c[1:]


def _wd(a: CostVector, b: CostVector) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def t_discards(tset: Iterable[CostVector], cost: CostVector) -> bool:
    """True iff a settled truncated vector weakly dominates ``cost`` minus its first criterion."""
    tc = cost[1:]
    return any(_wd(t, tc) for t in tset)


def tset_update(tset: list[CostVector], settled_cost: CostVector) -> list[CostVector]:
    tc = settled_cost[1:]
    for t in tset:
        if _wd(t, tc):
            return tset
    tset[:] = [t for t in tset if not _wd(tc, t)]
    tset.append(tc)
    return tset


@dataclass
class Route:
    cost: CostVector
    hops: tuple[Hop, ...]

    def base_edges(self, h: HierarchicalCover) -> list[int]:
        out: list[int] = []
        for t, e in self.hops:
            out.extend(h.unpack_edge(t, e))
        return out


@dataclass
class QueryResult:
    routes: list[Route]
    labels_created: int = 0
    labels_kept: int = 0
    labels_settled: int = 0
    backward_labels: int = 0
    seconds: float = 0.0

    def cost_set(self) -> frozenset[CostVector]:
        return frozenset(r.cost for r in self.routes)

    def costs(self) -> list[CostVector]:
        return sorted(r.cost for r in self.routes)


@dataclass
class BoundsTable:
    lower: dict[int, CostVector] = field(default_factory=dict)
    source_upper: list[CostVector] = field(default_factory=list)
    unreachable: set[int] = field(default_factory=set)

    @property
    def enabled(self) -> bool:
        return bool(self.source_upper)


def bound_prune(cost: CostVector, vertex: int, bounds: BoundsTable) -> bool:
    """Discard iff ``cost`` plus the vertex's lower bound is strictly dominated by a known s-d path."""
    if not bounds.enabled:
        return False
    lb = bounds.lower.get(vertex)
    if lb is None:
        return vertex in bounds.unreachable
    est = tuple(a + b for a, b in zip(cost, lb))
    for up in bounds.source_upper:
        if up != est and _wd(up, est):
            return True
    return False


class LabelArena:
    __slots__ = ("vertex", "cost", "parent", "via")

    def __init__(self) -> None:
        self.vertex: list[int] = []
        self.cost: list[CostVector] = []
        self.parent: list[int] = []
        self.via: list[Hop | None] = []

    def new(self, vertex: int, cost: CostVector, parent: int, via: Hop | None) -> int:
        self.vertex.append(vertex)
        self.cost.append(cost)
        self.parent.append(parent)
        self.via.append(via)
        return len(self.vertex) - 1

    def __len__(self) -> int:
        return len(self.vertex)

    def hops(self, label: int) -> list[Hop]:
        """Edges along the parent chain, ordered from the label back to the root."""
        out = []
        parent, via = self.parent, self.via
        while parent[label] >= 0:
            out.append(via[label])
            label = parent[label]
        return out


class LabelSearch:
    """One MLS run over a fixed adjacency (forward or reverse).

    ``arcs(v)`` yields the arcs a label at ``v`` may follow; ``stop_at`` holds
    vertices whose labels are settled but never expanded.
    """

    def __init__(
        self,
        arcs: Callable[[int], Sequence[Arc]],
        q: int,
        *,
        use_tdiscard: bool = True,
        dominance: bool = True,
        bounds: BoundsTable | None = None,
        stop_at: set[int] | frozenset[int] = frozenset(),
        on_settle: Callable[[int], None] | None = None,
        check_order: bool | None = None,
        deadline: float | None = None,
    ) -> None:
        self.arcs = arcs
        self.q = q
        self.use_tdiscard = use_tdiscard
        self.dominance = dominance
        self.bounds = bounds if bounds is not None and bounds.enabled else None
        self.stop_at = stop_at
        self.on_settle = on_settle
        self.check_order = CHECK_SETTLING if check_order is None else check_order
        self.deadline = deadline
        self.arena = LabelArena()
        self.temp: dict[int, list[int]] = {}
        self.perm: dict[int, list[int]] = {}
        self.tsets: dict[int, list[CostVector]] = {}
        self._tmin: dict[int, int] = {}
        self.created = 0
        self.kept = 0
        self.settled = 0

    def tset(self, v: int) -> list[CostVector]:
        if self.q == 2 and self.use_tdiscard and self.dominance:
            m = self._tmin.get(v)
            return [] if m is None else [(m,)]
        return list(self.tsets.get(v, []))

    def run(self, source: int) -> "LabelSearch":
        if self.q == 2 and self.use_tdiscard and self.dominance:
            return self._run_bicriteria(source)
        arena = self.arena
        acost, avertex = arena.cost, arena.vertex
        temp, perm, tsets = self.temp, self.perm, self.tsets
        use_tdiscard, dominance = self.use_tdiscard, self.dominance
        bounds, stop_at, on_settle = self.bounds, self.stop_at, self.on_settle
        arcs = self.arcs
        check_order, deadline = self.check_order, self.deadline
        dead: set[int] = set()

        root = arena.new(source, zero_cost(self.q), -1, None)
        temp[source] = [root]
        heap: list[tuple[CostVector, int]] = [(acost[root], root)]
        self.created = self.kept = 1
        last: CostVector | None = None
        pops = 0

        while heap:
            cost, lab = heapq.heappop(heap)
            if lab in dead:
                continue
            pops += 1
            if deadline is not None and pops % _DEADLINE_STRIDE == 1 and time.perf_counter() > deadline:
                raise QueryTimeout(f"query exceeded its time limit after {pops} settled labels")
            if check_order:
                if last is not None and cost < last:
                    raise SettlingOrderError(f"settled {cost} after {last}")
                last = cost
            v = avertex[lab]
            if dominance:
                temp[v].remove(lab)
            perm.setdefault(v, []).append(lab)
            self.settled += 1
            if use_tdiscard:
                ts = tsets.get(v)
                tc = cost[1:]
                if ts is None:
                    tsets[v] = [tc]
                else:
                    for t in ts:
                        if _wd(t, tc):
                            break
                    else:
                        ts[:] = [t for t in ts if not _wd(tc, t)]
                        ts.append(tc)
            if on_settle is not None:
                on_settle(lab)
            if v in stop_at:
                continue

            for w, c, t, e in arcs(v):
                new = tuple(x + y for x, y in zip(cost, c))
                self.created += 1
                if dominance:
                    if use_tdiscard:
                        ts = tsets.get(w)
                        if ts:
                            tc = new[1:]
                            if any(_wd(x, tc) for x in ts):
                                continue
                    else:
                        ps = perm.get(w)
                        if ps and any(_wd(acost[p], new) for p in ps):
                            continue
                if bounds is not None and bound_prune(new, w, bounds):
                    continue
                if dominance:
                    tl = temp.get(w)
                    if tl:
                        if any(_wd(acost[o], new) for o in tl):
                            continue
                        keep = []
                        for o in tl:
                            if _wd(new, acost[o]):
                                dead.add(o)
                            else:
                                keep.append(o)
                        if len(keep) != len(tl):
                            tl[:] = keep
                    else:
                        tl = temp[w] = []
                    nid = arena.new(w, new, lab, (t, e))
                    tl.append(nid)
                else:
                    nid = arena.new(w, new, lab, (t, e))
                heapq.heappush(heap, (new, nid))
                self.kept += 1
        return self

    def _run_bicriteria(self, source: int) -> "LabelSearch":
        # same loop as run() for q == 2 with t-discarding: a tset collapses to
        # the smallest second criterion settled so far
        arena = self.arena
        acost, avertex, aparent, avia = arena.cost, arena.vertex, arena.parent, arena.via
        temp, perm = self.temp, self.perm
        tmin = self._tmin = {}
        bounds, stop_at, on_settle = self.bounds, self.stop_at, self.on_settle
        arcs = self.arcs
        check_order, deadline = self.check_order, self.deadline
        dead: set[int] = set()
        heappush, heappop = heapq.heappush, heapq.heappop

        root = arena.new(source, (0, 0), -1, None)
        temp[source] = [root]
        heap: list[tuple[CostVector, int]] = [((0, 0), root)]
        created = kept = 1
        settled = 0
        last: CostVector | None = None

        while heap:
            cost, lab = heappop(heap)
            if lab in dead:
                continue
            settled += 1
            if deadline is not None and settled % _DEADLINE_STRIDE == 1 and time.perf_counter() > deadline:
                raise QueryTimeout(f"query exceeded its time limit after {settled} settled labels")
            if check_order:
                if last is not None and cost < last:
                    raise SettlingOrderError(f"settled {cost} after {last}")
                last = cost
            v = avertex[lab]
            temp[v].remove(lab)
            pl = perm.get(v)
            if pl is None:
                perm[v] = [lab]
            else:
                pl.append(lab)
            c0, c1 = cost
            m = tmin.get(v)
            if m is None or c1 < m:
                tmin[v] = c1
            if on_settle is not None:
                on_settle(lab)
            if v in stop_at:
                continue

            for w, c, t, e in arcs(v):
                created += 1
                n1 = c1 + c[1]
                m = tmin.get(w)
                if m is not None and m <= n1:
                    continue
                new = (c0 + c[0], n1)
                if bounds is not None and bound_prune(new, w, bounds):
                    continue
                tl = temp.get(w)
                if tl:
                    n0 = new[0]
                    dominated = False
                    evict = False
                    for o in tl:
                        oc = acost[o]
                        if oc[0] <= n0 and oc[1] <= n1:
                            dominated = True
                            break
                        if n0 <= oc[0] and n1 <= oc[1]:
                            evict = True
                    if dominated:
                        continue
                    if evict:
                        keep = []
                        for o in tl:
                            oc = acost[o]
                            if n0 <= oc[0] and n1 <= oc[1]:
                                dead.add(o)
                            else:
                                keep.append(o)
                        tl[:] = keep
                else:
                    tl = temp[w] = []
                nid = len(avertex)
                avertex.append(w)
                acost.append(new)
                aparent.append(lab)
                avia.append((t, e))
                tl.append(nid)
                heappush(heap, (new, nid))
                kept += 1

        self.created, self.kept, self.settled = created, kept, settled
        return self

    def pareto_costs(self) -> dict[int, frozenset[CostVector]]:
        acost = self.arena.cost
        return {v: frozenset(acost[l] for l in labs) for v, labs in self.perm.items()}


def _level_arcs(g: Graph | CoverLevel) -> Callable[[int], list[Arc]]:
    level = getattr(g, "level", 0)
    dst, cost = g.dst, g.cost

    def arcs(v: int) -> list[Arc]:
        return [(dst[e], cost[e], level, e) for e in g.out_edges(v)]

    return arcs


def _check_cost_range(g: Graph | CoverLevel | HierarchicalCover) -> None:
    base = g.base if isinstance(g, HierarchicalCover) else g
    if not base.cost:
        return
    worst = max(max(c) for c in base.cost)
    if worst * max(1, base.vertex_count) > MAX_COST:
        raise CostOverflowError("path costs on this graph may exceed int64")


def mls_pareto_sets(g: Graph | CoverLevel, s: int, *, check_order: bool | None = None) -> dict[int, frozenset[CostVector]]:
    """One-to-all classic MLS: the Pareto set of path costs from ``s`` to every reached vertex."""
    search = LabelSearch(_level_arcs(g), g.criterion_count, use_tdiscard=False, check_order=check_order)
    return search.run(s).pareto_costs()


def classic_mls(
    g: Graph | CoverLevel,
    s: int,
    d: int,
    *,
    check_order: bool | None = None,
    deadline: float | None = None,
) -> QueryResult:
    """Plain MLS with full permanent-set dominance checks."""
    started = time.perf_counter()
    q = g.criterion_count
    _check_cost_range(g)
    search = LabelSearch(_level_arcs(g), q, use_tdiscard=False, check_order=check_order, deadline=deadline)
    search.run(s)
    arena = search.arena
    routes = []
    for lab in search.perm.get(d, []):
        routes.append(Route(arena.cost[lab], tuple(reversed(arena.hops(lab)))))
    routes.sort(key=lambda r: r.cost)
    return QueryResult(
        routes,
        labels_created=search.created,
        labels_kept=search.kept,
        labels_settled=search.settled,
        seconds=time.perf_counter() - started,
    )


@dataclass
class BackwardRoutes:
    """Backward labels (paths ``v -> d``) per settled vertex.

    ``hits`` are the top-level vertices, where the backward search stops; the
    remaining entries are lower-level vertices the forward stage may also meet.
    """

    arena: LabelArena
    labels: dict[int, list[int]]
    top: set[int]
    created: int = 0

    @property
    def hits(self) -> dict[int, list[CostVector]]:
        return {v: [self.arena.cost[l] for l in labs] for v, labs in self.labels.items() if v in self.top}

    def costs_at(self, v: int) -> list[CostVector]:
        return [self.arena.cost[l] for l in self.labels.get(v, [])]

    def hops(self, label: int) -> list[Hop]:
        # parent chain runs towards d, which is already route order
        return self.arena.hops(label)


def backward_mls(
    h: HierarchicalCover,
    d: int,
    *,
    dominance: bool = True,
    check_order: bool | None = None,
    deadline: float | None = None,
) -> BackwardRoutes:
    top = h.top_vertices()
    if h.top_level(d) == h.level_count:
        arena = LabelArena()
        root = arena.new(d, zero_cost(h.criterion_count), -1, None)
        return BackwardRoutes(arena, {d: [root]}, top, created=1)
    up_in = h.upward_in()
    search = LabelSearch(
        up_in.__getitem__,
        h.criterion_count,
        use_tdiscard=dominance,
        dominance=dominance,
        stop_at=top,
        check_order=check_order,
        deadline=deadline,
    )
    search.run(d)
    return BackwardRoutes(search.arena, search.perm, top, created=search.created)


def connect_routes(
    forward_cost: CostVector,
    backward_costs: Sequence[CostVector],
    routes: ParetoSet,
    payloads: Sequence | None = None,
) -> ParetoSet:
    for i, b in enumerate(backward_costs):
        cand = tuple(x + y for x, y in zip(forward_cost, b))
        routes.insert(cand, payloads[i] if payloads is not None else None)
    return routes


def _dijkstra(arcs: Sequence[Sequence[Arc]], source: int, crit: int, q: int) -> tuple[dict[int, int], dict[int, CostVector]]:
    dist = {source: 0}
    vec = {source: zero_cost(q)}
    done: set[int] = set()
    heap = [(0, source)]
    while heap:
        dv, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        base = vec[v]
        for w, c, _, _ in arcs[v]:
            nd = dv + c[crit]
            if nd < dist.get(w, MAX_COST + 1):
                dist[w] = nd
                vec[w] = tuple(x + y for x, y in zip(base, c))
                heapq.heappush(heap, (nd, w))
    return dist, vec


def compute_bounds(h: HierarchicalCover, s: int, d: int) -> BoundsTable:
    """Per-criterion lower bounds to ``d`` and full-vector upper paths from ``s``.

    Both single-criterion searches follow the same rule as the query: a vertex
    expands on its top level only.  The reverse search from ``d`` therefore
    gives exact distances for top-level vertices, and the forward search from
    ``s`` meets it wherever both reached a vertex.
    """
    q = h.criterion_count
    if s == d:
        z = zero_cost(q)
        return BoundsTable({s: z}, [z])
    top = h.top_vertices()
    up_out, up_in = h.upward_out(), h.upward_in()
    lower_parts: list[dict[int, int]] = []
    uppers: list[CostVector] = []
    best_scalar: list[int] = []
    for i in range(q):
        rdist, rvec = _dijkstra(up_in, d, i, q)
        fdist, fvec = _dijkstra(up_out, s, i, q)
        best = None
        for x, fx in fdist.items():
            rx = rdist.get(x)
            if rx is None:
                continue
            # ties on the scalar fall back to the full vector, then the vertex id
            key = (fx + rx, tuple(a + b for a, b in zip(fvec[x], rvec[x])), x)
            if best is None or key < best:
                best = key
        if best is None:
            return BoundsTable()
        best_scalar.append(best[0])
        uppers.append(best[1])
        lower_parts.append(rdist)
    table = BoundsTable(source_upper=list(dict.fromkeys(uppers)))
    for v in top:
        if all(v in part for part in lower_parts):
            table.lower[v] = tuple(part[v] for part in lower_parts)
        else:
            table.unreachable.add(v)
    table.lower[s] = tuple(best_scalar)
    table.unreachable.discard(s)
    return table


def hierarchical_mls(
    h: HierarchicalCover,
    s: int,
    d: int,
    *,
    use_tdiscard: bool = True,
    use_bounds: bool = False,
    backward_dominance: bool = True,
    check_order: bool | None = None,
    time_limit: float | None = None,
) -> QueryResult:
    """Exact Pareto set of ``s -> d`` routes over a hierarchy of covers."""
    started = time.perf_counter()
    deadline = started + time_limit if time_limit is not None else None
    q = h.criterion_count
    n = h.vertex_count
    if not (0 <= s < n and 0 <= d < n):
        raise IndexError(f"vertex out of range: s={s}, d={d}, n={n}")
    _check_cost_range(h)
    if s == d:
        return QueryResult([Route(zero_cost(q), ())], labels_created=1, labels_kept=1, labels_settled=1,
                           seconds=time.perf_counter() - started)

    backward = backward_mls(h, d, dominance=backward_dominance, check_order=check_order, deadline=deadline)
    bounds = compute_bounds(h, s, d) if use_bounds else None
    meet = backward.labels
    bcost = backward.arena.cost
    routes = ParetoSet()
    search: LabelSearch

    def on_settle(lab: int) -> None:
        v = search.arena.vertex[lab]
        blabs = meet.get(v)
        if blabs:
            fcost = search.arena.cost[lab]
            connect_routes(fcost, [bcost[b] for b in blabs], routes, [(lab, b) for b in blabs])

    search = LabelSearch(
        h.upward_out().__getitem__,
        q,
        use_tdiscard=use_tdiscard,
        bounds=bounds,
        on_settle=on_settle,
        check_order=check_order,
        deadline=deadline,
    )
    search.run(s)

    out = []
    for cost, (f, b) in routes:
        hops = list(reversed(search.arena.hops(f))) + backward.hops(b)
        out.append(Route(cost, tuple(hops)))
    out.sort(key=lambda r: r.cost)
    return QueryResult(
        out,
        labels_created=search.created + backward.created,
        labels_kept=search.kept,
        labels_settled=search.settled,
        backward_labels=backward.created,
        seconds=time.perf_counter() - started,
    )

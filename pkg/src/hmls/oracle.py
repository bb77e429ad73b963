"""Reference Pareto sets by depth-first enumeration of simple paths.

Deliberately shares nothing with the label-setting engine beyond the graph
container.  A partial path is pruned when its cost is weakly dominated by a
prefix already recorded at the same vertex, or by a finished s-d path.  The
pruning is exact when every edge cost vector is non-zero, which the generated
test graphs guarantee.
"""

from __future__ import annotations

import sys

from .core import CostVector, Graph


def _no_worse(a: CostVector, b: CostVector) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _record(front: list[CostVector], c: CostVector) -> bool:
    if any(_no_worse(f, c) for f in front):
        return False
    front[:] = [f for f in front if not _no_worse(c, f)]
    front.append(c)
    return True


def enumerate_pareto(g: Graph, s: int, d: int) -> frozenset[CostVector]:
    if s == d:
        return frozenset({(0,) * g.criterion_count})
    if any(not any(c) for c in g.cost):
        raise ValueError("enumeration oracle requires non-zero edge costs")
    seen: dict[int, list[CostVector]] = {s: [(0,) * g.criterion_count]}
    results: list[CostVector] = []
    on_path = [False] * g.vertex_count
    on_path[s] = True
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * g.vertex_count + 100))

    def dfs(v: int, cost: CostVector) -> None:
        for e in g.out_adj[v]:
            w = g.dst[e]
            if on_path[w]:
                continue
            nc = tuple(a + b for a, b in zip(cost, g.cost[e]))
            if any(_no_worse(r, nc) for r in results):
                continue
            if w == d:
                _record(results, nc)
                continue
            if not _record(seen.setdefault(w, []), nc):
                continue
            on_path[w] = True
            dfs(w, nc)
            on_path[w] = False

    try:
        dfs(s, (0,) * g.criterion_count)
    finally:
        sys.setrecursionlimit(limit)
    return frozenset(results)

"""Self-checks on generated graphs: cover invariants and oracle equivalence."""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field

from ..core import Graph
from ..cover import COPIED, HierarchicalCover, build_hierarchy
from ..engine import classic_mls, hierarchical_mls, mls_pareto_sets
from ..oracle import enumerate_pareto
from .generate import generate_random_graph

log = logging.getLogger(__name__)

FLAG_COMBOS = tuple(itertools.product((True, False), (False, True)))  # (tdiscard, bounds)


@dataclass
class Failure:
    invariant: str
    detail: str
    repro: dict = field(default_factory=dict)

    def __str__(self) -> str:
        extra = " ".join(f"{k}={v}" for k, v in self.repro.items())
        return f"{self.invariant}: {self.detail}" + (f" [{extra}]" if extra else "")


@dataclass
class VerifyConfig:
    graphs: int = 50
    pairs: int = 20
    levels: list[int] = field(default_factory=lambda: list(range(6)))
    seed: int = 0
    max_vertices: int = 300
    max_cost: int = 20
    suites: tuple[str, ...] = ("cover", "equivalence")
    check_order: bool = True


@dataclass
class VerifyReport:
    failures: list[Failure] = field(default_factory=list)
    graphs: int = 0
    queries: int = 0
    comparisons: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        lines = [f"{head}: {self.graphs} graphs, {self.queries} pairs, {self.comparisons} comparisons, {len(self.failures)} failures"]
        lines += [f"  {f}" for f in self.failures[:20]]
        return "\n".join(lines)


def graph_params(seed: int, index: int, max_vertices: int = 300, max_cost: int = 20) -> dict:
    rng = random.Random(seed * 1_000_003 + index)
    n = rng.randint(min(10, max_vertices), max_vertices)
    return {
        "n": n,
        "m": rng.randint(n, 3 * n),
        "q": 2 + index % 2,
        "max_cost": max_cost,
        "seed": seed * 1_000_003 + index,
    }


def check_cover_invariants(h: HierarchicalCover) -> list[Failure]:
    out: list[Failure] = []
    n = h.vertex_count
    prev_members: set[int] = set(range(n))
    for t in range(1, h.level_count + 1):
        lvl = h.levels[t - 1]
        below = h.level(t - 1)
        if not lvl.members <= prev_members:
            out.append(Failure("nesting", f"V_{t} not a subset of V_{t - 1}", {"level": t}))
        for e in range(below.edge_count):
            if below.src[e] not in lvl.members and below.dst[e] not in lvl.members:
                out.append(Failure("independent-set", f"edge {e} of level {t - 1} has no endpoint in V_{t}", {"level": t - 1, "edge": e}))
        buckets: dict[tuple[int, int], list[tuple]] = {}
        for e in range(lvl.edge_count):
            u, w = lvl.src[e], lvl.dst[e]
            if u == w:
                out.append(Failure("self-loop", f"cover edge {e} is a self-loop", {"level": t, "edge": e}))
            if u not in lvl.members or w not in lvl.members:
                out.append(Failure("membership", f"cover edge {e} leaves V_{t}", {"level": t, "edge": e}))
            buckets.setdefault((u, w), []).append(lvl.cost[e])
            a, b = lvl.prov_in[e], lvl.prov_out[e]
            if b == COPIED:
                ok = (below.src[a], below.dst[a]) == (u, w)
            else:
                ok = below.src[a] == u and below.dst[b] == w and below.dst[a] == below.src[b]
            if not ok:
                out.append(Failure("provenance", f"cover edge {e} does not match its parts", {"level": t, "edge": e}))
                continue
            base = h.unpack_edge(t, e)
            g = h.base
            if g.src[base[0]] != u or g.dst[base[-1]] != w or any(g.dst[x] != g.src[y] for x, y in zip(base, base[1:])):
                out.append(Failure("unpack-contiguity", f"cover edge {e} unpacks to a broken walk", {"level": t, "edge": e}))
            total = tuple(map(sum, zip(*(g.cost[x] for x in base))))
            if total != lvl.cost[e]:
                out.append(Failure("unpack-cost", f"cover edge {e} stores {lvl.cost[e]} but unpacks to {total}", {"level": t, "edge": e}))
        for (u, w), costs in buckets.items():
            for i, a in enumerate(costs):
                for b in costs[i + 1:]:
                    if all(x <= y for x, y in zip(a, b)) or all(y <= x for x, y in zip(a, b)):
                        out.append(Failure("pareto-bucket", f"cover edges {u}->{w} {a} and {b} are comparable", {"level": t}))
        prev_members = lvl.members
    for v in range(n):
        expect = max((t for t in range(1, h.level_count + 1) if v in h.levels[t - 1].members), default=0)
        if h.top_level_of[v] != expect:
            out.append(Failure("top-level", f"T({v}) = {h.top_level_of[v]}, expected {expect}", {"vertex": v}))
    return out


def check_pareto_preservation(h: HierarchicalCover, t: int, *, check_order: bool | None = None) -> list[Failure]:
    """Pareto sets between vertices of ``V_{t+1}`` agree on ``G_t`` and ``G_{t+1}``."""
    out = []
    upper = h.levels[t]
    targets = upper.members
    for u in sorted(targets):
        lower_sets = mls_pareto_sets(h.level(t), u, check_order=check_order)
        upper_sets = mls_pareto_sets(upper, u, check_order=check_order)
        for w in targets:
            a = lower_sets.get(w, frozenset())
            b = upper_sets.get(w, frozenset())
            if a != b:
                out.append(Failure("pareto-preservation", f"{u}->{w}: G_{t} {sorted(a)} vs G_{t + 1} {sorted(b)}", {"level": t}))
    return out


def check_equivalence(
    g: Graph,
    h: HierarchicalCover,
    pairs: list[tuple[int, int]],
    levels: list[int],
    *,
    repro: dict | None = None,
    check_order: bool = True,
    report: VerifyReport | None = None,
) -> list[Failure]:
    out = []
    for s, d in pairs:
        expected = enumerate_pareto(g, s, d)
        got = classic_mls(g, s, d, check_order=check_order).cost_set()
        if report is not None:
            report.queries += 1
            report.comparisons += 1
        if got != expected:
            out.append(Failure("classic-equivalence", f"{sorted(got)} != oracle {sorted(expected)}", {**(repro or {}), "s": s, "d": d}))
        first_bad = None
        for level in levels:
            view = h.truncated(level)
            for tdiscard, bounds in FLAG_COMBOS:
                res = hierarchical_mls(view, s, d, use_tdiscard=tdiscard, use_bounds=bounds, check_order=check_order)
                if report is not None:
                    report.comparisons += 1
                if res.cost_set() != expected and first_bad is None:
                    first_bad = Failure(
                        "hierarchical-equivalence",
                        f"{res.costs()} != oracle {sorted(expected)}",
                        {**(repro or {}), "s": s, "d": d, "level": level, "tdiscard": tdiscard, "bounds": bounds},
                    )
                for route in res.routes:
                    edges = route.base_edges(h)
                    walk_ok = not edges or (g.src[edges[0]] == s and g.dst[edges[-1]] == d and all(
                        g.dst[x] == g.src[y] for x, y in zip(edges, edges[1:])))
                    total = tuple(map(sum, zip(*(g.cost[x] for x in edges)))) if edges else (0,) * g.criterion_count
                    if not walk_ok or total != route.cost:
                        out.append(Failure("route-integrity", f"route {route.cost} unpacks to {total}",
                                           {**(repro or {}), "s": s, "d": d, "level": level}))
        if first_bad is not None:
            out.append(first_bad)
    return out


def run_verify(config: VerifyConfig) -> VerifyReport:
    report = VerifyReport()
    top = max(config.levels, default=0)
    for i in range(config.graphs):
        params = graph_params(config.seed, i, config.max_vertices, config.max_cost)
        g = generate_random_graph(**params)
        h, _ = build_hierarchy(g, top)
        report.graphs += 1
        repro = {"graph": i, **params}
        if "cover" in config.suites:
            for f in check_cover_invariants(h):
                f.repro = {**repro, **f.repro}
                report.failures.append(f)
        if "equivalence" in config.suites:
            rng = random.Random(params["seed"] + 7)
            pairs = [(rng.randrange(g.vertex_count), rng.randrange(g.vertex_count)) for _ in range(config.pairs)]
            report.failures.extend(
                check_equivalence(g, h, pairs, config.levels, repro=repro, check_order=config.check_order, report=report)
            )
        log.debug("graph %d done (%d failures so far)", i, len(report.failures))
    return report

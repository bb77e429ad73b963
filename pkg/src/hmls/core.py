"""Cost-vector algebra and the base graph type.

Cost vectors are plain tuples of non-negative ints; every criterion is
minimized internally (maximized criteria are flipped when a graph is loaded).
Python tuples already compare lexicographically, which the priority queues
rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

CostVector = tuple[int, ...]

# Costs are persisted as little-endian int64.
MAX_COST = 2**63 - 1


class CostOverflowError(ArithmeticError):
    """Accumulated cost no longer fits the int64 storage width."""


def _check_arity(a: CostVector, b: CostVector) -> None:
    if len(a) != len(b):
        raise ValueError(f"cost arity mismatch: {len(a)} vs {len(b)}")


def weakly_dominates(a: CostVector, b: CostVector) -> bool:
    """True iff ``a`` is no worse than ``b`` in every criterion."""
    _check_arity(a, b)
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def dominates(a: CostVector, b: CostVector) -> bool:
    """Weak dominance that is not mutual, i.e. ``a`` is strictly better somewhere."""
    return weakly_dominates(a, b) and a != b


def lex_precedes(a: CostVector, b: CostVector) -> bool:
    # reflexive: equal vectors precede each other
    _check_arity(a, b)
    return a <= b


def add_cost(a: CostVector, b: CostVector) -> CostVector:
    _check_arity(a, b)
    out = tuple(x + y for x, y in zip(a, b))
    for v in out:
        if v > MAX_COST:
            raise CostOverflowError(f"cost {out} exceeds int64 range")
    return out


def zero_cost(q: int) -> CostVector:
    return (0,) * q


class ParetoSet:
    """Mutually non-weakly-dominated ``(cost, payload)`` entries.

    Among exactly equal costs the entry inserted first is kept.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[tuple[CostVector, Any]] = ()) -> None:
        self.entries: list[tuple[CostVector, Any]] = []
        for cost, payload in entries:
            self.insert(cost, payload)

    def insert(self, cost: CostVector, payload: Any = None) -> bool:
        keep = []
        for entry in self.entries:
            other = entry[0]
            if weakly_dominates(other, cost):
                return False
            if not weakly_dominates(cost, other):
                keep.append(entry)
        keep.append((cost, payload))
        self.entries = keep
        return True

    def costs(self) -> list[CostVector]:
        return [c for c, _ in self.entries]

    def cost_set(self) -> frozenset[CostVector]:
        return frozenset(c for c, _ in self.entries)

    def is_valid(self) -> bool:
        costs = self.costs()
        for i, a in enumerate(costs):
            for b in costs[i + 1:]:
                if weakly_dominates(a, b) or weakly_dominates(b, a):
                    return False
        return True

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[CostVector, Any]]:
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"ParetoSet({sorted(self.costs())})"


def pareto_insert(pset: ParetoSet, cost: CostVector, payload: Any = None) -> tuple[ParetoSet, bool]:
    inserted = pset.insert(cost, payload)
    return pset, inserted


def pareto_filter(costs: Iterable[CostVector]) -> frozenset[CostVector]:
    pset = ParetoSet()
    for c in costs:
        pset.insert(c)
    return pset.cost_set()


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    cost: CostVector


@dataclass
class Graph:
    """Directed multigraph with per-edge cost vectors.

    Edges live in parallel arrays indexed by edge id; ``out_adj`` and
    ``in_adj`` hold edge ids per vertex.
    """

    vertex_count: int
    criterion_count: int
    src: list[int] = field(default_factory=list)
    dst: list[int] = field(default_factory=list)
    cost: list[CostVector] = field(default_factory=list)
    out_adj: list[list[int]] = field(default_factory=list)
    in_adj: list[list[int]] = field(default_factory=list)
    senses: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.criterion_count < 2:
            raise ValueError("at least two criteria are required")
        if not self.out_adj:
            self.out_adj = [[] for _ in range(self.vertex_count)]
            self.in_adj = [[] for _ in range(self.vertex_count)]
        if not self.senses:
            self.senses = ("min",) * self.criterion_count

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int, Sequence[int]]],
        criterion_count: int | None = None,
    ) -> "Graph":
        edges = list(edges)
        if criterion_count is None:
            if not edges:
                raise ValueError("criterion_count required for an edgeless graph")
            criterion_count = len(edges[0][2])
        g = cls(vertex_count, criterion_count)
        for u, v, c in edges:
            g.add_edge(u, v, c)
        return g

    def add_edge(self, u: int, v: int, cost: Sequence[int]) -> int:
        if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
            raise ValueError(f"edge ({u}, {v}) out of range for {self.vertex_count} vertices")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        cost = tuple(int(x) for x in cost)
        if len(cost) != self.criterion_count:
            raise ValueError(f"expected {self.criterion_count} criteria, got {len(cost)}")
        if any(x < 0 or x > MAX_COST for x in cost):
            raise ValueError(f"cost {cost} outside [0, 2^63)")
        eid = len(self.src)
        self.src.append(u)
        self.dst.append(v)
        self.cost.append(cost)
        self.out_adj[u].append(eid)
        self.in_adj[v].append(eid)
        return eid

    # level-graph protocol shared with cover levels
    @property
    def edge_count(self) -> int:
        return len(self.src)

    def vertices(self) -> range:
        return range(self.vertex_count)

    def out_edges(self, v: int) -> list[int]:
        return self.out_adj[v]

    def in_edges(self, v: int) -> list[int]:
        return self.in_adj[v]

    def edge(self, eid: int) -> Edge:
        return Edge(eid, self.src[eid], self.dst[eid], self.cost[eid])

    def edges(self) -> Iterator[Edge]:
        for eid in range(self.edge_count):
            yield self.edge(eid)

    def same_as(self, other: "Graph") -> bool:
        return (
            self.vertex_count == other.vertex_count
            and self.criterion_count == other.criterion_count
            and self.src == other.src
            and self.dst == other.dst
            and self.cost == other.cost
        )

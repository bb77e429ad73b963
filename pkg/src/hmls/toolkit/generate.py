"""Deterministic synthetic graphs."""

from __future__ import annotations

import random

from ..core import Graph


def generate_random_graph(n: int, m: int, q: int, max_cost: int, seed: int) -> Graph:
    """Random spanning arborescence plus uniform extra arcs; costs uniform in ``[1, max_cost]``."""
    if n <= 0:
        raise ValueError("n must be positive")
    if max_cost < 1:
        raise ValueError("max_cost must be >= 1")
    rng = random.Random(seed)
    g = Graph(n, q)

    def cost() -> tuple[int, ...]:
        return tuple(rng.randint(1, max_cost) for _ in range(q))

    order = list(range(n))
    rng.shuffle(order)
    tree = min(m, n - 1)
    for i in range(1, tree + 1):
        g.add_edge(order[rng.randrange(i)], order[i], cost())
    if n > 1:
        for _ in range(m - tree):
            u = rng.randrange(n)
            v = rng.randrange(n - 1)
            if v >= u:
                v += 1
            g.add_edge(u, v, cost())
    return g


def generate_grid_graph(rows: int, cols: int, seed: int, *, q: int = 2, drop: float = 0.1) -> Graph:
    """Road-like test network: a bidirectional grid with a few missing streets.

    The first criterion is a travel time, the second a length, correlated the
    way speed limits correlate them; further criteria are independent noise.
    """
    rng = random.Random(seed)
    n = rows * cols
    g = Graph(n, q)
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            for nr, nc in ((r, c + 1), (r + 1, c)):
                if nr >= rows or nc >= cols or rng.random() < drop:
                    continue
                w = nr * cols + nc
                length = rng.randint(50, 500)
                speed = rng.choice((30, 50, 50, 80, 100))
                extra = tuple(rng.randint(1, 20) for _ in range(q - 2))
                cost = (max(1, length * 36 // speed), length) + extra
                g.add_edge(v, w, cost)
                g.add_edge(w, v, cost)
    return g

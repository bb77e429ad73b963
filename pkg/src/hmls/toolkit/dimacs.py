"""DIMACS ``.gr`` shortest-path files, one file per criterion."""

from __future__ import annotations

import gzip
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

from ..core import Graph

log = logging.getLogger(__name__)


class DimacsFormatError(ValueError):
    pass


@dataclass
class DimacsSource:
    """Parallel ``.gr`` files; file ``j`` supplies criterion ``criteria[j]`` (1-based)."""

    paths: list[Path]
    criteria: list[int] = field(default_factory=list)
    senses: list[str] = field(default_factory=list)
    expected_vertices: int | None = None
    expected_edges: int | None = None

    def __post_init__(self) -> None:
        self.paths = [Path(p) for p in self.paths]
        if not self.criteria:
            self.criteria = list(range(1, len(self.paths) + 1))
        if sorted(self.criteria) != list(range(1, len(self.paths) + 1)):
            raise ValueError("criterion indices must cover 1..q exactly once")
        if not self.senses:
            self.senses = ["min"] * len(self.paths)


def _open(path: Path) -> IO[str]:
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="ascii")
    return open(path, "r", encoding="ascii")


def read_gr(path: str | Path) -> tuple[int, int, list[tuple[int, int, int]]]:
    """Return ``(n, m, arcs)`` with arcs as 1-based ``(u, v, w)`` in file order."""
    path = Path(path)
    n = m = None
    arcs: list[tuple[int, int, int]] = []
    with _open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line or line[0] == "c" or line[0] == "\n":
                continue
            parts = line.split()
            if not parts:
                continue
            tag = parts[0]
            if tag == "a":
                if n is None:
                    raise DimacsFormatError(f"{path}:{lineno}: arc before problem line")
                try:
                    arcs.append((int(parts[1]), int(parts[2]), int(parts[3])))
                except (IndexError, ValueError):
                    raise DimacsFormatError(f"{path}:{lineno}: malformed arc line") from None
            elif tag == "p":
                if n is not None:
                    raise DimacsFormatError(f"{path}:{lineno}: duplicate problem line")
                if len(parts) != 4 or parts[1] != "sp":
                    raise DimacsFormatError(f"{path}:{lineno}: expected 'p sp <n> <m>'")
                n, m = int(parts[2]), int(parts[3])
            else:
                raise DimacsFormatError(f"{path}:{lineno}: unknown line type {tag!r}")
    if n is None or m is None:
        raise DimacsFormatError(f"{path}: missing problem line")
    if len(arcs) != m:
        raise DimacsFormatError(f"{path}: header announces {m} arcs, found {len(arcs)}")
    return n, m, arcs


def load_dimacs(source: DimacsSource | Sequence[str | Path]) -> Graph:
    if not isinstance(source, DimacsSource):
        source = DimacsSource(list(source))
    parsed = [read_gr(p) for p in source.paths]
    n, m, first = parsed[0]
    for path, (n2, m2, _) in zip(source.paths[1:], parsed[1:]):
        if (n2, m2) != (n, m):
            raise DimacsFormatError(f"header mismatch: {source.paths[0]} has ({n}, {m}), {path} has ({n2}, {m2})")
    q = len(parsed)
    # column j of the cost matrix belongs to criterion criteria[j]
    columns: list[list[int]] = [[0] * m for _ in range(q)]
    for j, (path, (_, _, arcs)) in enumerate(zip(source.paths, parsed)):
        col = columns[source.criteria[j] - 1]
        for k, (u, v, w) in enumerate(arcs):
            fu, fv, _ = first[k]
            if u != fu or v != fv:
                raise DimacsFormatError(f"arc mismatch at position {k + 1}: ({fu}, {fv}) vs ({u}, {v}) in {path}")
            if w < 0:
                raise DimacsFormatError(f"{path}: negative weight at arc {k + 1}")
            col[k] = w
    senses = [source.senses[source.criteria.index(i + 1)] for i in range(q)]
    for i, sense in enumerate(senses):
        if sense == "max":
            top = max(columns[i], default=0)
            columns[i] = [top - w for w in columns[i]]
        elif sense != "min":
            raise ValueError(f"unknown optimization sense {sense!r}")

    g = Graph(n, q, senses=tuple(senses))
    loops = 0
    for k, (u, v, _) in enumerate(first):
        if not (1 <= u <= n and 1 <= v <= n):
            raise DimacsFormatError(f"arc {k + 1}: vertex id out of range 1..{n}: ({u}, {v})")
        if u == v:
            loops += 1
            continue
        g.add_edge(u - 1, v - 1, tuple(col[k] for col in columns))
    if loops:
        log.warning("dropped %d self-loop arcs", loops)
    if source.expected_vertices is not None and g.vertex_count != source.expected_vertices:
        raise DimacsFormatError(f"expected {source.expected_vertices} vertices, got {g.vertex_count}")
    if source.expected_edges is not None and g.edge_count != source.expected_edges:
        raise DimacsFormatError(f"expected {source.expected_edges} edges, got {g.edge_count}")
    return g


def write_dimacs(g: Graph, paths: Sequence[str | Path], comment: str | None = None) -> None:
    if len(paths) != g.criterion_count:
        raise ValueError(f"need one path per criterion ({g.criterion_count})")
    for i, path in enumerate(paths):
        path = Path(path)
        opener = gzip.open if path.suffix == ".gz" else open
        with opener(path, "wt", encoding="ascii") as fh:
            if comment:
                fh.write(f"c {comment}\n")
            fh.write(f"p sp {g.vertex_count} {g.edge_count}\n")
            fh.writelines(f"a {u + 1} {v + 1} {c[i]}\n" for u, v, c in zip(g.src, g.dst, g.cost))

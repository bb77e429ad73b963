"""Binary hierarchy files.

Layout, all little-endian::

    magic  b"HMLSHC\\0\\0"
    u32 version, u32 q, u32 levels, u64 vertices, u64 base edges
    u8[q] senses (0 = min, 1 = max)
    base:   u32 src[m], u32 dst[m], i64 cost[m * q]
    level:  u32 level, u8 members[ceil(n / 8)] (bit v of the little-endian
            bitset), u64 edges, u32 src[E], u32 dst[E], i64 prov_in[E],
            i64 prov_out[E], i64 cost[E * q]

``prov_out == -1`` marks an edge copied verbatim from the level below.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from ..core import Graph
from ..cover import CoverLevel, HierarchicalCover

MAGIC = b"HMLSHC\x00\x00"
VERSION = 1
_HEADER = struct.Struct("<IIIQQ")


class HierarchyFormatError(ValueError):
    pass


def _write_array(fh: BinaryIO, values, dtype: str) -> None:
    fh.write(np.asarray(values, dtype=dtype).tobytes())


def _read_array(fh: BinaryIO, count: int, dtype: str) -> np.ndarray:
    dt = np.dtype(dtype)
    raw = fh.read(count * dt.itemsize)
    if len(raw) != count * dt.itemsize:
        raise HierarchyFormatError("truncated hierarchy file")
    return np.frombuffer(raw, dtype=dt)


def save_hierarchy(h: HierarchicalCover, path: str | Path) -> None:
    base = h.base
    n, q = base.vertex_count, base.criterion_count
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(VERSION, q, h.level_count, n, base.edge_count))
        fh.write(bytes(1 if s == "max" else 0 for s in base.senses))
        _write_array(fh, base.src, "<u4")
        _write_array(fh, base.dst, "<u4")
        _write_array(fh, np.asarray(base.cost, dtype="<i8").reshape(-1), "<i8")
        for lvl in h.levels:
            fh.write(struct.pack("<I", lvl.level))
            bits = np.zeros(n, dtype=np.uint8)
            if lvl.members:
                bits[np.fromiter(lvl.members, dtype=np.int64)] = 1
            fh.write(np.packbits(bits, bitorder="little").tobytes())
            fh.write(struct.pack("<Q", lvl.edge_count))
            _write_array(fh, lvl.src, "<u4")
            _write_array(fh, lvl.dst, "<u4")
            _write_array(fh, lvl.prov_in, "<i8")
            _write_array(fh, lvl.prov_out, "<i8")
            _write_array(fh, np.asarray(lvl.cost, dtype="<i8").reshape(-1), "<i8")


def _costs(flat: np.ndarray, q: int) -> list[tuple[int, ...]]:
    return [tuple(row) for row in flat.reshape(-1, q).tolist()] if flat.size else []


def load_hierarchy(path: str | Path) -> HierarchicalCover:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise HierarchyFormatError(f"{path}: not a hierarchy file")
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise HierarchyFormatError("truncated header")
        version, q, levels, n, m = _HEADER.unpack(raw)
        if version != VERSION:
            raise HierarchyFormatError(f"unsupported hierarchy version {version}")
        senses = tuple("max" if b else "min" for b in fh.read(q))
        src = _read_array(fh, m, "<u4").tolist()
        dst = _read_array(fh, m, "<u4").tolist()
        cost = _costs(_read_array(fh, m * q, "<i8"), q)
        base = Graph(n, q, senses=senses)
        base.src, base.dst, base.cost = src, dst, cost
        for e, (u, v) in enumerate(zip(src, dst)):
            base.out_adj[u].append(e)
            base.in_adj[v].append(e)

        built: list[CoverLevel] = []
        nbytes = (n + 7) // 8
        for _ in range(levels):
            (t,) = struct.unpack("<I", fh.read(4))
            bits = np.unpackbits(_read_array(fh, nbytes, "u1"), bitorder="little")[:n]
            members = set(np.flatnonzero(bits).tolist())
            (count,) = struct.unpack("<Q", fh.read(8))
            lvl = CoverLevel(level=t, vertex_count=n, members=members, criterion_count=q)
            lsrc = _read_array(fh, count, "<u4").tolist()
            ldst = _read_array(fh, count, "<u4").tolist()
            pin = _read_array(fh, count, "<i8").tolist()
            pout = _read_array(fh, count, "<i8").tolist()
            lcost = _costs(_read_array(fh, count * q, "<i8"), q)
            for u, w, c, a, b in zip(lsrc, ldst, lcost, pin, pout):
                lvl.add_edge(u, w, c, a, b)
            built.append(lvl)
        if fh.read(1):
            raise HierarchyFormatError("trailing bytes after last level")
    return HierarchicalCover(base, built)

"""Per-level query benchmark over random origin-destination pairs."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import statistics
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..cover import HierarchicalCover
from ..engine import QueryTimeout, hierarchical_mls

log = logging.getLogger(__name__)

BENCH_COLUMNS = ("level", "mean_s", "max_s", "mean_labels_M", "max_labels_M", "pairs", "timeouts")
QUERY_COLUMNS = ("pair", "level", "source", "target", "status", "routes", "labels_created", "labels_kept", "seconds")
TIMING_COLUMNS = frozenset({"mean_s", "max_s", "seconds"})


@dataclass
class BenchConfig:
    pair_count: int = 100
    seed: int = 0
    levels: list[int] = field(default_factory=lambda: [0])
    tdiscard: bool = True
    bounds: bool = False
    time_limit: float | None = None
    check_order: bool | None = None

    def __post_init__(self) -> None:
        if self.pair_count < 1:
            raise ValueError("pair_count must be >= 1")


@dataclass
class QueryRecord:
    pair: int
    level: int
    source: int
    target: int
    status: str
    routes: int
    labels_created: int
    labels_kept: int
    seconds: float


@dataclass
class StatsRow:
    level: int
    mean_s: float
    max_s: float
    mean_labels_M: float
    max_labels_M: float
    pairs: int
    timeouts: int
    unreachable: int = 0


@dataclass
class BenchResult:
    rows: list[StatsRow]
    queries: list[QueryRecord]
    pairs: list[tuple[int, int]]

    def to_csv(self, target: str | Path | None = None) -> str:
        return _write_csv(BENCH_COLUMNS, [asdict(r) for r in self.rows], target)

    def queries_csv(self, target: str | Path | None = None) -> str:
        return _write_csv(QUERY_COLUMNS, [asdict(r) for r in self.queries], target)

    def to_json(self) -> str:
        return json.dumps(
            {"rows": [asdict(r) for r in self.rows], "queries": [asdict(r) for r in self.queries], "pairs": self.pairs},
            indent=2,
        )


def _fmt(value) -> str:
    return f"{value:.6f}" if isinstance(value, float) else str(value)


def _write_csv(columns, rows: list[dict], target) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


def sample_pairs(vertex_count: int, count: int, seed: int) -> list[tuple[int, int]]:
    """Uniform origin-destination pairs; unreachable pairs are kept, not resampled."""
    rng = random.Random(seed)
    return [(rng.randrange(vertex_count), rng.randrange(vertex_count)) for _ in range(count)]


def _summarize(level: int, records: list[QueryRecord]) -> StatsRow:
    done = [r for r in records if r.status != "timeout"]
    timeouts = len(records) - len(done)
    if not done:
        return StatsRow(level, float("nan"), float("nan"), float("nan"), float("nan"), len(records), timeouts)
    secs = [r.seconds for r in done]
    labels = [r.labels_created / 1e6 for r in done]
    return StatsRow(
        level=level,
        mean_s=statistics.fmean(secs),
        max_s=max(secs),
        mean_labels_M=statistics.fmean(labels),
        max_labels_M=max(labels),
        pairs=len(records),
        timeouts=timeouts,
        unreachable=sum(1 for r in done if r.routes == 0),
    )


def run_bench(h: HierarchicalCover, config: BenchConfig) -> BenchResult:
    """Query every sampled pair at every requested level.

    Level ``L`` queries the hierarchy truncated to ``L`` top levels, so all
    levels share one build and one pair set.
    """
    for level in config.levels:
        if not 0 <= level <= h.level_count:
            raise ValueError(f"level {level} outside built hierarchy (0..{h.level_count})")
    pairs = sample_pairs(h.vertex_count, config.pair_count, config.seed)
    rows: list[StatsRow] = []
    queries: list[QueryRecord] = []
    for level in config.levels:
        view = h.truncated(level)
        records = []
        for i, (s, d) in enumerate(pairs):
            try:
                res = hierarchical_mls(
                    view, s, d,
                    use_tdiscard=config.tdiscard,
                    use_bounds=config.bounds,
                    check_order=config.check_order,
                    time_limit=config.time_limit,
                )
            except QueryTimeout:
                records.append(QueryRecord(i, level, s, d, "timeout", 0, 0, 0, float(config.time_limit or 0.0)))
                continue
            records.append(
                QueryRecord(i, level, s, d, "ok", len(res.routes), res.labels_created, res.labels_kept, res.seconds)
            )
        row = _summarize(level, records)
        log.info("level %d: mean %.3fs, mean labels %.4fM, %d timeouts", level, row.mean_s, row.mean_labels_M, row.timeouts)
        rows.append(row)
        queries.extend(records)
    return BenchResult(rows, queries, pairs)


def strip_timing(csv_text: str) -> str:
    """Drop timing columns so two runs can be compared byte for byte."""
    reader = csv.reader(io.StringIO(csv_text))
    header = next(reader)
    keep = [i for i, c in enumerate(header) if c not in TIMING_COLUMNS]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([header[i] for i in keep])
    for row in reader:
        writer.writerow([row[i] for i in keep])
    return buf.getvalue()

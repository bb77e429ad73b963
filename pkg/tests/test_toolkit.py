import gzip
import logging

import pytest

from hmls.cover import build_hierarchy
from hmls.engine import hierarchical_mls
from hmls.toolkit.bench import BenchConfig, run_bench, strip_timing
from hmls.toolkit.cli import main, parse_levels
from hmls.toolkit.dimacs import DimacsFormatError, DimacsSource, load_dimacs, write_dimacs
from hmls.toolkit.generate import generate_grid_graph, generate_random_graph
from hmls.toolkit.storage import HierarchyFormatError, load_hierarchy, save_hierarchy
from hmls.toolkit.verify import VerifyConfig, check_cover_invariants, run_verify


def gr(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


# --- DIMACS ---

def test_dimacs_pair(tmp_path):
    d = gr(tmp_path, "d.gr", "c dist\np sp 2 1\na 1 2 7\n")
    t = gr(tmp_path, "t.gr", "p sp 2 1\na 1 2 9\n")
    g = load_dimacs([d, t])
    assert (g.vertex_count, g.edge_count, g.criterion_count) == (2, 1, 2)
    assert (g.src[0], g.dst[0], g.cost[0]) == (0, 1, (7, 9))


def test_dimacs_criterion_order(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 2 1\na 1 2 7\n")
    t = gr(tmp_path, "t.gr", "p sp 2 1\na 1 2 9\n")
    assert load_dimacs(DimacsSource([d, t], criteria=[2, 1])).cost[0] == (9, 7)


def test_dimacs_header_mismatch(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 2 1\na 1 2 7\n")
    t = gr(tmp_path, "t.gr", "p sp 3 1\na 1 2 9\n")
    with pytest.raises(DimacsFormatError, match="header mismatch"):
        load_dimacs([d, t])


def test_dimacs_arc_mismatch(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 3 2\na 1 2 7\na 2 3 1\n")
    t = gr(tmp_path, "t.gr", "p sp 3 2\na 1 2 9\na 3 2 1\n")
    with pytest.raises(DimacsFormatError, match="arc mismatch at position 2"):
        load_dimacs([d, t])


def test_dimacs_out_of_range(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 2 1\na 1 3 7\n")
    with pytest.raises(DimacsFormatError, match="out of range"):
        load_dimacs([d, d])


def test_dimacs_arc_count(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 2 2\na 1 2 7\n")
    with pytest.raises(DimacsFormatError, match="announces 2 arcs"):
        load_dimacs([d, d])


def test_dimacs_negative_weight(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 2 1\na 1 2 -1\n")
    with pytest.raises(DimacsFormatError, match="negative"):
        load_dimacs([d, d])


def test_dimacs_gzip(tmp_path):
    p = tmp_path / "d.gr.gz"
    with gzip.open(p, "wt") as fh:
        fh.write("p sp 2 1\na 2 1 4\n")
    assert load_dimacs([p, p]).cost[0] == (4, 4)


def test_dimacs_self_loops_dropped(tmp_path, caplog):
    d = gr(tmp_path, "d.gr", "p sp 2 2\na 1 1 3\na 1 2 7\n")
    with caplog.at_level(logging.WARNING):
        g = load_dimacs([d, d])
    assert g.edge_count == 1
    assert "dropped 1 self-loop" in caplog.text


def test_dimacs_max_sense(tmp_path):
    d = gr(tmp_path, "d.gr", "p sp 3 2\na 1 2 7\na 2 3 1\n")
    s = gr(tmp_path, "s.gr", "p sp 3 2\na 1 2 10\na 2 3 4\n")
    g = load_dimacs(DimacsSource([d, s], senses=["min", "max"]))
    assert g.cost == [(7, 0), (1, 6)]


def test_dimacs_round_trip(tmp_path):
    g = generate_random_graph(40, 100, 3, 50, 1)
    paths = [tmp_path / f"c{i}.gr" for i in range(3)]
    paths[2] = tmp_path / "c2.gr.gz"
    write_dimacs(g, paths, comment="round trip")
    assert load_dimacs(paths).same_as(g)


# --- generators ---

def test_generator_deterministic():
    a = generate_random_graph(100, 300, 2, 20, 5)
    assert a.same_as(generate_random_graph(100, 300, 2, 20, 5))
    assert not a.same_as(generate_random_graph(100, 300, 2, 20, 6))
    assert generate_grid_graph(10, 10, 3).same_as(generate_grid_graph(10, 10, 3))


def test_generator_edge_cases():
    g = generate_random_graph(1, 5, 2, 20, 0)
    assert (g.vertex_count, g.edge_count) == (1, 0)
    with pytest.raises(ValueError):
        generate_random_graph(0, 5, 2, 20, 0)
    g = generate_random_graph(50, 150, 3, 20, 0)
    assert all(1 <= x <= 20 for c in g.cost for x in c)
    assert all(u != v for u, v in zip(g.src, g.dst))


# --- storage ---

def test_storage_round_trip(tmp_path):
    g = generate_random_graph(120, 360, 2, 20, 11)
    h, _ = build_hierarchy(g, 4)
    path = tmp_path / "h.bin"
    save_hierarchy(h, path)
    h2 = load_hierarchy(path)
    assert h2.base.same_as(g)
    assert h2.top_level_of == h.top_level_of
    for a, b in zip(h.levels, h2.levels):
        assert (a.members, a.src, a.dst, a.cost, a.prov_in, a.prov_out) == (b.members, b.src, b.dst, b.cost, b.prov_in, b.prov_out)
    for s, d in [(0, 119), (5, 77), (60, 3)]:
        r1, r2 = hierarchical_mls(h, s, d), hierarchical_mls(h2, s, d)
        assert [(r.cost, r.base_edges(h)) for r in r1.routes] == [(r.cost, r.base_edges(h2)) for r in r2.routes]


def test_storage_rejects_garbage(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"not a hierarchy")
    with pytest.raises(HierarchyFormatError):
        load_hierarchy(p)
    g = generate_random_graph(20, 40, 2, 20, 1)
    h, _ = build_hierarchy(g, 2)
    save_hierarchy(h, p)
    p.write_bytes(p.read_bytes()[:-5])
    with pytest.raises(HierarchyFormatError):
        load_hierarchy(p)


# --- bench ---

@pytest.fixture(scope="module")
def small_h():
    h, _ = build_hierarchy(generate_grid_graph(12, 12, seed=2), 4)
    return h


def test_bench_single_pair(small_h):
    res = run_bench(small_h, BenchConfig(pair_count=1, seed=3, levels=[0, 2]))
    for row in res.rows:
        assert row.mean_s == row.max_s and row.mean_labels_M == row.max_labels_M
        assert row.pairs == 1


def test_bench_deterministic(small_h):
    cfg = BenchConfig(pair_count=8, seed=4, levels=[0, 1, 2, 3, 4])
    a, b = run_bench(small_h, cfg), run_bench(small_h, cfg)
    assert a.pairs == b.pairs
    assert strip_timing(a.to_csv()) == strip_timing(b.to_csv())
    assert strip_timing(a.queries_csv()) == strip_timing(b.queries_csv())
    assert "mean_s" not in strip_timing(a.to_csv())


def test_bench_rejects_bad_config(small_h):
    with pytest.raises(ValueError):
        BenchConfig(pair_count=0)
    with pytest.raises(ValueError):
        run_bench(small_h, BenchConfig(levels=[9]))


def test_bench_timeouts_excluded(small_h):
    res = run_bench(small_h, BenchConfig(pair_count=3, levels=[0], time_limit=0.0))
    assert res.rows[0].timeouts == 3


# --- verify ---

def test_verify_small_run():
    report = run_verify(VerifyConfig(graphs=3, pairs=3, levels=[0, 2], max_vertices=40))
    assert report.passed, report.summary()
    assert report.summary().startswith("PASS: 3 graphs")


def test_verify_catches_corrupt_cover_edge():
    g = generate_random_graph(60, 180, 2, 20, 3)
    h, _ = build_hierarchy(g, 3)
    lvl = h.levels[1]
    lvl.cost[0] = tuple(c + 1 for c in lvl.cost[0])
    names = {f.invariant for f in check_cover_invariants(h)}
    assert "unpack-cost" in names


def test_verify_catches_broken_nesting():
    g = generate_random_graph(60, 180, 2, 20, 3)
    h, _ = build_hierarchy(g, 3)
    extra = next(v for v in range(60) if v not in h.levels[0].members)
    h.levels[2].members.add(extra)
    names = {f.invariant for f in check_cover_invariants(h)}
    assert "nesting" in names


# --- CLI ---

def g5_files(tmp_path, g5):
    paths = [tmp_path / "d.gr", tmp_path / "t.gr"]
    write_dimacs(g5, paths)
    return [str(p) for p in paths]


def test_cli_build_and_query(tmp_path, capsys, g5):
    out = tmp_path / "g5.hmls"
    assert main(["build", "--gr", *g5_files(tmp_path, g5), "--levels", "1", "--out", str(out)]) == 0
    csv = capsys.readouterr().out
    assert csv.splitlines()[0] == "level,k,vertices,edges,seconds,cumulative_seconds"
    assert (tmp_path / "g5.hmls.csv").exists()
    assert main(["query", str(out), "0", "1"]) == 0
    text = capsys.readouterr().out.splitlines()
    assert text[0] == "1 routes"
    assert text[1] == "cost=(5, 5) path=0->2->4->3->1"
    assert text[2].startswith("labels_created=")


def test_cli_query_edge_cases(tmp_path, capsys, g5):
    out = tmp_path / "g5.hmls"
    main(["build", "--gr", *g5_files(tmp_path, g5), "--levels", "1", "--out", str(out)])
    capsys.readouterr()
    main(["query", str(out), "2", "2"])
    assert capsys.readouterr().out.splitlines()[:2] == ["1 routes", "cost=(0, 0) path=2"]
    main(["query", str(out), "1", "0", "--no-paths"])
    assert capsys.readouterr().out.splitlines()[0] == "0 routes"
    with pytest.raises(SystemExit) as exc:
        main(["query", str(out), "0", "5"])
    assert exc.value.code == 2
    assert "unknown vertex id 5" in capsys.readouterr().err


def test_cli_levels_zero(tmp_path, capsys):
    out = tmp_path / "r.hmls"
    assert main(["build", "--generate", "30", "60", "2", "10", "1", "--levels", "0", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("0,1,30,")


def test_cli_bench(tmp_path, capsys):
    out = tmp_path / "r.hmls"
    main(["build", "--generate", "80", "200", "2", "10", "1", "--levels", "3", "--out", str(out)])
    capsys.readouterr()
    stats, queries = tmp_path / "b.csv", tmp_path / "q.csv"
    assert main(["bench", str(out), "--levels", "0-3", "--pairs", "5", "--out", str(stats), "--queries-out", str(queries)]) == 0
    lines = stats.read_text().splitlines()
    assert lines[0] == "level,mean_s,max_s,mean_labels_M,max_labels_M,pairs,timeouts"
    assert [l.split(",")[0] for l in lines[1:]] == ["0", "1", "2", "3"]
    assert len(queries.read_text().splitlines()) == 1 + 4 * 5


def test_cli_verify(capsys):
    assert main(["verify", "--suite", "cover", "--graphs", "3", "--max-vertices", "50", "--levels", "0-3"]) == 0
    assert capsys.readouterr().out.startswith("PASS: 3 graphs, 0 pairs")


def test_parse_levels():
    assert parse_levels("0-3") == [0, 1, 2, 3]
    assert parse_levels("0,4,8") == [0, 4, 8]
    assert parse_levels("7") == [7]

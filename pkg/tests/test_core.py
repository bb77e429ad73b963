import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmls.core import (
    MAX_COST,
    CostOverflowError,
    Graph,
    ParetoSet,
    add_cost,
    dominates,
    lex_precedes,
    pareto_filter,
    pareto_insert,
    weakly_dominates,
)


def test_weakly_dominates_examples():
    assert weakly_dominates((2, 3), (2, 5))
    assert weakly_dominates((2, 3), (2, 3))
    assert not weakly_dominates((2, 3), (3, 2))
    assert not weakly_dominates((3, 2), (2, 3))


def test_dominates_examples():
    assert not dominates((2, 3), (2, 3))
    assert dominates((1, 1), (2, 2))
    assert not dominates((1, 5), (2, 3))


def test_lex_precedes_examples():
    assert lex_precedes((1, 9), (2, 0))
    assert lex_precedes((2, 3), (2, 3))
    assert not lex_precedes((2, 4), (2, 3))


def test_add_cost_examples():
    assert add_cost((1, 2), (2, 1)) == (3, 3)
    assert add_cost((0, 0), (5, 7)) == (5, 7)
    # s -> a -> d in the diamond
    assert add_cost((1, 3), (1, 1)) == (2, 4)


def test_arity_mismatch_is_rejected():
    with pytest.raises(ValueError):
        weakly_dominates((1, 2), (1, 2, 3))
    with pytest.raises(ValueError):
        lex_precedes((1, 2, 3), (1, 2))


def test_add_cost_overflow():
    with pytest.raises(CostOverflowError):
        add_cost((MAX_COST, 0), (1, 0))


def test_pareto_insert_examples():
    s = ParetoSet([((1, 5), None), ((5, 1), None)])
    s, ok = pareto_insert(s, (2, 2))
    assert ok and s.cost_set() == {(1, 5), (5, 1), (2, 2)}

    s = ParetoSet([((1, 5), "first")])
    s, ok = pareto_insert(s, (1, 5), "second")
    assert not ok and s.entries == [((1, 5), "first")]

    s = ParetoSet([((1, 5), None), ((5, 1), None), ((2, 2), None)])
    s, ok = pareto_insert(s, (1, 1))
    assert ok and s.cost_set() == {(1, 1)}


def test_graph_rejects_bad_edges():
    g = Graph(3, 2)
    with pytest.raises(ValueError):
        g.add_edge(1, 1, (1, 1))
    with pytest.raises(ValueError):
        g.add_edge(0, 3, (1, 1))
    with pytest.raises(ValueError):
        g.add_edge(0, 1, (1, -1))
    with pytest.raises(ValueError):
        g.add_edge(0, 1, (1, 1, 1))
    with pytest.raises(ValueError):
        Graph(3, 1)


def test_graph_adjacency_consistent():
    g = Graph.from_edges(3, [(0, 1, (1, 1)), (0, 1, (2, 0)), (1, 2, (1, 1))])
    assert g.out_edges(0) == [0, 1]
    assert g.in_edges(1) == [0, 1]
    assert sorted(e for v in g.vertices() for e in g.out_edges(v)) == [0, 1, 2]
    assert sorted(e for v in g.vertices() for e in g.in_edges(v)) == [0, 1, 2]


vectors = st.integers(2, 4).flatmap(
    lambda q: st.lists(st.tuples(*[st.integers(0, 6)] * q), min_size=3, max_size=3)
)


@given(vectors)
def test_weak_dominance_reflexive_transitive(vs):
    a, b, c = vs
    assert weakly_dominates(a, a)
    if weakly_dominates(a, b) and weakly_dominates(b, c):
        assert weakly_dominates(a, c)


@given(vectors)
def test_dominance_irreflexive_asymmetric(vs):
    a, b, _ = vs
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))


@given(vectors)
def test_lex_total_and_consistent_with_dominance(vs):
    a, b, _ = vs
    assert lex_precedes(a, b) or lex_precedes(b, a)
    assert (lex_precedes(a, b) and lex_precedes(b, a)) == (a == b)
    if weakly_dominates(a, b):
        assert lex_precedes(a, b)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)), max_size=7))
def test_pareto_insert_order_insensitive(vs):
    results = set()
    for perm in itertools.islice(itertools.permutations(vs), 30):
        s = ParetoSet()
        for v in perm:
            s.insert(v)
            assert s.is_valid()
        results.add(s.cost_set())
    assert len(results) <= 1
    if vs:
        # brute-force Pareto filter as the reference
        expect = {v for v in vs if not any(dominates(o, v) for o in vs)}
        assert results.pop() == expect == pareto_filter(vs)

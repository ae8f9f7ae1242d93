import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qcsp_forests.classify import is_loop_connected
from qcsp_forests.graphs import PRGraph, RootedTree, nonisomorphic_pr_trees, path_graph
from qcsp_forests.polymorph import (TernaryTable, f0_table, f1_table, is_majority, is_polymorphism,
                                    majority_for_tree, median_table, parse_table,
                                    search_majority_polymorphism)

from strategies import pr_trees, small_graphs


def naive_polymorphism(f, g):
    arcs = [(u, v) for u in range(g.n) for v in range(g.n) if g.has_edge(u, v)]
    return all(g.has_edge(f(a[0], b[0], c[0]), f(a[1], b[1], c[1]))
               for a, b, c in itertools.product(arcs, repeat=3))


def naive_majority(f):
    return all(f(x, x, y) == f(x, y, x) == f(y, x, x) == x
               for x in range(f.n) for y in range(f.n))


@given(small_graphs(3), st.integers(0, 2**32 - 1))
def test_vectorised_checkers_match_loops(g, seed):
    rng = np.random.default_rng(seed)
    f = TernaryTable(g.n, rng.integers(0, g.n, size=(g.n,) * 3))
    assert is_polymorphism(f, g) == naive_polymorphism(f, g)
    assert is_majority(f) == naive_majority(f)


def test_projection_is_polymorphism_not_majority():
    g = path_graph("101")
    n = g.n
    proj = TernaryTable(n, np.fromfunction(lambda x, y, z: x, (n, n, n), dtype=int))
    assert is_polymorphism(proj, g)
    assert not is_majority(proj)


@given(pr_trees(7))
def test_f1_on_loop_connected_trees(t):
    assume(is_loop_connected(t))
    f = f1_table(t)
    assert is_majority(f) and is_polymorphism(f, t)


@given(pr_trees(7))
def test_f0_on_irreflexive_trees(t):
    t = PRGraph(t.n, frozenset(e for e in t.edges if e[0] != e[1]))
    leaf = min(v for v in range(t.n) if t.degree(v) <= 1)
    f = f0_table(RootedTree(t, leaf))
    assert is_majority(f) and is_polymorphism(f, t)


@given(pr_trees(7))
def test_median_on_reflexive_trees(t):
    t = t.with_loops(range(t.n))
    f = median_table(t)
    assert is_majority(f) and is_polymorphism(f, t)


def test_constructions_reject_wrong_shapes():
    with pytest.raises(ValueError):
        f1_table(path_graph("101"))
    with pytest.raises(ValueError):
        median_table(path_graph("10"))
    with pytest.raises(ValueError):
        f0_table(RootedTree(path_graph("010"), 0))


@pytest.mark.parametrize("word", ["101", "01010", "1001"])
def test_search_refutes_hard_paths(word):
    assert search_majority_polymorphism(path_graph(word)).status == "refuted"


def test_search_finds_on_easy_trees():
    for t in nonisomorphic_pr_trees(4):
        if is_loop_connected(t):
            out = search_majority_polymorphism(t)
            assert out.found
            assert is_majority(out.result) and is_polymorphism(out.result, t)


def test_search_budget():
    assert search_majority_polymorphism(path_graph("0110"), node_budget=1).status == "exhausted"
    # propagation alone refutes this one, so no node is ever spent
    assert search_majority_polymorphism(path_graph("10001"), node_budget=1).status == "refuted"
    with pytest.raises(ValueError):
        search_majority_polymorphism(path_graph("1"), node_budget=0)


def test_table_text_roundtrip():
    f = majority_for_tree(path_graph("0110"))
    g = parse_table(f.dump())
    assert g.n == f.n and (g.table == f.table).all()

import itertools

import pytest
from hypothesis import given, strategies as st

from qcsp_forests.graphs import (
    FormatError, PRGraph, VertexMap, all_words, canonical_word, check_word, compose, direct_product,
    exact_walk_targets, find_homomorphism, format_graph, identity_map, is_homomorphism, is_path,
    is_surjective_homomorphism, loop_distance, nonisomorphic_pr_trees, parse_graph, path_graph,
    path_order, path_word, power, power_coords, power_index,
)

from strategies import pr_trees, small_graphs, words


def test_path_graph_loops_follow_the_word():
    g = path_graph("1001")
    assert g.n == 4
    assert g.loops == {0, 3}
    assert g.has_edge(1, 2) and not g.has_edge(0, 2)


def test_bad_words_rejected():
    for bad in ("", "102", "ab"):
        with pytest.raises(FormatError):
            check_word(bad)


def test_edges_outside_range():
    with pytest.raises(ValueError):
        PRGraph.from_edges(2, [(0, 2)])


@given(words)
def test_path_word_roundtrip(w):
    g = path_graph(w)
    assert is_path(g)
    assert path_word(g, path_order(g)) in (w, w[::-1])


@given(words)
def test_canonical_word_is_orientation_free(w):
    assert canonical_word(w) == canonical_word(w[::-1])


@given(small_graphs())
def test_graph_file_roundtrip(g):
    assert parse_graph(format_graph(g)) == g


def test_graph_file_errors():
    for text in ("", "x\n", "2\n1\n", "2\n1 3\n", "2\na b\n"):
        with pytest.raises(FormatError):
            parse_graph(text)


@given(st.integers(1, 4), st.integers(1, 3))
def test_power_index_inverts_coords(n, k):
    for idx in range(n ** k):
        assert power_index(power_coords(idx, n, k), n) == idx


def test_power_edges_are_coordinatewise():
    g = path_graph("10")
    sq = power(g, 2)
    assert sq.n == 4
    for a, b in itertools.product(range(4), repeat=2):
        (x1, y1), (x2, y2) = power_coords(a, 2, 2), power_coords(b, 2, 2)
        assert sq.has_edge(a, b) == (g.has_edge(x1, x2) and g.has_edge(y1, y2))


@given(small_graphs(3), small_graphs(3))
def test_projections_of_product_are_homomorphisms(g, h):
    p = direct_product(g, h)
    first = VertexMap(p, g, [i // h.n for i in range(p.n)])
    second = VertexMap(p, h, [i % h.n for i in range(p.n)])
    assert is_homomorphism(first) and is_homomorphism(second)


def test_identity_and_composition():
    g = path_graph("0110")
    flip = VertexMap(g, g, [3, 2, 1, 0])
    assert is_surjective_homomorphism(flip)
    assert compose(flip, flip).image == identity_map(g).image


def test_homomorphism_search_finds_and_refutes():
    assert find_homomorphism(path_graph("00000"), path_graph("00")).status == "found"
    # a loop must land on a loop
    assert find_homomorphism(path_graph("1"), path_graph("000")).status == "refuted"
    out = find_homomorphism(path_graph("010"), path_graph("00100"), surjective=True)
    assert out.status == "refuted"


@given(pr_trees(5), pr_trees(4))
def test_found_maps_are_homomorphisms(g, h):
    out = find_homomorphism(g, h)
    if out.found:
        assert is_homomorphism(out.result)


def test_loop_distance():
    assert loop_distance(path_graph("1000")) == [0, 1, 2, 3]
    assert loop_distance(path_graph("00100"), 0) == 2


def test_exact_walks_stall_on_loops():
    g = path_graph("100")
    assert exact_walk_targets(g, 0, 2) == {0, 1, 2}
    assert exact_walk_targets(g, 2, 1) == {1}


def _brute_classes(n):
    """Iso classes of looped trees on n vertices, via labelled trees and networkx."""
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_node_match

    reps = []
    match = categorical_node_match("loop", False)
    for t in nx.nonisomorphic_trees(n) if n > 1 else [nx.empty_graph(1)]:
        for mask in range(1 << n):
            g = t.copy()
            nx.set_node_attributes(g, {v: bool(mask >> v & 1) for v in g}, "loop")
            if not any(nx.is_isomorphic(g, r, node_match=match) for r in reps):
                reps.append(g)
    return len(reps)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_tree_enumeration_matches_brute_force(n):
    trees = list(nonisomorphic_pr_trees(n))
    assert len(trees) == _brute_classes(n)
    assert all(t.is_tree() and t.n == n for t in trees)


def test_tree_enumeration_small_counts():
    # P4: 10 loop patterns up to reversal; the 3-star: 2 * 4
    assert sum(1 for _ in nonisomorphic_pr_trees(4)) == 18


def test_all_words_counts():
    assert sum(1 for _ in all_words(4)) == 2 + 4 + 8 + 16

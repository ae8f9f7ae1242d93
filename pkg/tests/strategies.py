"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from qcsp_forests.graphs import PRGraph

words = st.text(alphabet="01", min_size=1, max_size=9)


@st.composite
def pr_trees(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    loops = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    edges = [(v, p) for v, p in zip(range(1, n), parents)]
    edges += [(v, v) for v in range(n) if loops[v]]
    return PRGraph.from_edges(n, edges)


@st.composite
def small_graphs(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return PRGraph.from_edges(n, [p for p, k in zip(pairs, keep) if k])

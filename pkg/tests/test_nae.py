from hypothesis import given, strategies as st

from qcsp_forests.nae import nae_satisfiable, qnae_true

V = ["x", "y", "z"]
clauses = st.lists(st.tuples(*[st.sampled_from(V)] * 3), max_size=4)


def test_small_truths():
    assert nae_satisfiable(V, [("x", "y", "z")])
    assert not nae_satisfiable(V, [("x", "x", "x")])
    # a triangle of inequalities cannot be two-coloured
    assert not nae_satisfiable(V, [("x", "x", "y"), ("y", "y", "z"), ("z", "z", "x")])
    assert qnae_true([("A", "x"), ("E", "y")], [("x", "y", "y")])
    assert not qnae_true([("E", "y"), ("A", "x")], [("x", "y", "y"), ("x", "x", "x")])


@given(clauses)
def test_existential_game_is_satisfiability(cs):
    assert qnae_true([("E", v) for v in V], cs) == nae_satisfiable(V, cs)


@given(clauses)
def test_complement_symmetry(cs):
    # flipping every bit keeps NAE, so a universal first variable costs nothing
    assert qnae_true([("A", "x"), ("E", "y"), ("E", "z")], cs) == nae_satisfiable(V, cs)


@given(clauses, st.permutations(V))
def test_inner_existentials_commute(cs, order):
    assert qnae_true([("E", v) for v in order], cs) == qnae_true([("E", v) for v in V], cs)

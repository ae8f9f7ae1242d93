import pytest
from hypothesis import given, strategies as st

from qcsp_forests.classify import is_zero_eccentric
from qcsp_forests.graphs import FormatError, all_words, path_graph
from qcsp_forests.nae import nae_satisfiable, qnae_true
from qcsp_forests.reduce import (
    InvalidInstance, NotHard, QNAEInstance, RecipeMismatch, anchor_report, choose_recipe,
    clause_gadget, compile_instance, faithful_pairs, fit_clause, format_qnae,
    gadget_extension_check, nae_table, normalize, parse_qnae, recipe_for_template, selector_reach,
    tree_recipe,
)
from qcsp_forests.solver import evaluate

V = ["x", "y", "z"]


@st.composite
def instances(draw, max_clauses=3):
    quants = draw(st.lists(st.sampled_from("AE"), min_size=3, max_size=3))
    cls = draw(st.lists(st.tuples(*[st.sampled_from(V)] * 3), min_size=1, max_size=max_clauses))
    try:
        return QNAEInstance(tuple(zip(quants, V)), tuple(cls))
    except InvalidInstance:
        return QNAEInstance(tuple(("E", v) for v in V), tuple(cls))


def test_parse_and_format():
    inst = parse_qnae("A x\nE y  # the witness\n/ E z\nc x y z\n")
    assert inst.prefix == (("A", "x"), ("E", "y"), ("E", "z"))
    assert parse_qnae(format_qnae(inst)) == inst


@pytest.mark.parametrize("text,err", [
    ("E x\nc x x\n", FormatError),
    ("E x\nc x y x\n", FormatError),
    ("E x\nE x\n", FormatError),
    ("Q x\n", FormatError),
    ("A x\nc x x x\n", InvalidInstance),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_qnae(text)


@given(instances())
def test_normalize_preserves_truth(inst):
    norm = normalize(inst)
    assert norm.is_normal
    assert [sorted(c) for c in norm.clauses] == [sorted(c) for c in inst.clauses]
    assert qnae_true(norm.prefix, norm.clauses) == qnae_true(inst.prefix, inst.clauses)


def test_recipe_examples():
    r = choose_recipe("101")
    assert (r.case, r.pattern, r.selector, r.anchors) == ("P101-family", "101", "10", (0, 2))
    assert choose_recipe("1001").case == "wb-0-centred"
    r = choose_recipe("10111")
    assert (r.case, r.pattern, r.selector) == ("remaining-case", "101", "110")
    assert choose_recipe("10101").case == "P10101-family"
    assert choose_recipe("101101").case == "P101d01"
    assert choose_recipe("0011001").fallback
    with pytest.raises(NotHard):
        choose_recipe("0100")


def test_recipes_are_well_formed():
    for w in all_words(9):
        if is_zero_eccentric(w):
            continue
        r = choose_recipe(w)
        g = path_graph(w)
        p, q = r.anchors
        assert g.has_loop(p) and g.has_loop(q) and p != q, w
        assert r.pattern[0] == r.pattern[-1] == "1", w
        if r.fallback:
            assert r.values["mu"] > 1, w


@pytest.mark.parametrize("word", ["101", "1001", "10111", "0101101", "010010", "00101000",
                                  "10101", "101101", "0101001", "001010100", "010010101"])
def test_clause_gadget_is_exactly_nae(word):
    t = path_graph(word)
    r = choose_recipe(word)
    fit = fit_clause(r, t)
    assert fit.exact
    assert gadget_extension_check(clause_gadget(r, t, fit), r, t) == nae_table()


def test_nae_table_shape():
    table = nae_table()
    assert len(table) == 8
    assert sum(table.values()) == 6


@pytest.mark.parametrize("word", ["1001", "10111", "0101101"])
def test_end_to_end_plain_family(word):
    t, r = path_graph(word), choose_recipe(word)
    cases = [
        ((("E", "x"),), (("x", "x", "x"),)),
        ((("E", "x"), ("E", "y"), ("E", "z")), (("x", "y", "z"),)),
        ((("E", "x"), ("E", "y"), ("E", "z")), (("x", "x", "y"), ("y", "y", "z"), ("z", "z", "x"))),
        ((("A", "x"), ("E", "y")), (("x", "y", "y"),)),
        ((("E", "y"), ("A", "x")), (("y", "y", "x"), ("y", "x", "x"))),
    ]
    for prefix, cls in cases:
        inst = normalize(QNAEInstance(prefix, cls))
        assert evaluate(compile_instance(inst, r, t), t) == qnae_true(prefix, cls), (prefix, cls)


@pytest.mark.parametrize("word", ["10101", "101101"])
def test_end_to_end_paired_family(word):
    t, r = path_graph(word), choose_recipe(word)
    for cls in [(("x", "x", "x"),), (("x", "y", "z"),), (("x", "x", "y"), ("y", "y", "z"), ("z", "z", "x")),
                (("x", "y", "y"), ("x", "z", "z"))]:
        inst = QNAEInstance(tuple(("E", v) for v in V), cls)
        assert evaluate(compile_instance(inst, r, t), t) == nae_satisfiable(V, cls), cls


def test_universals_rejected_where_unsupported():
    inst = parse_qnae("A x / E y / E z / c x y z")
    for word in ("10101", "0011001"):
        with pytest.raises(RecipeMismatch):
            compile_instance(inst, choose_recipe(word), path_graph(word))


def test_compile_requires_normal_form():
    inst = QNAEInstance((("A", "x"), ("E", "y")), (("y", "x", "y"),))
    with pytest.raises(InvalidInstance):
        compile_instance(inst, choose_recipe("101"), path_graph("101"))


def test_wrong_template_rejected():
    inst = parse_qnae("E x / c x x x")
    with pytest.raises(RecipeMismatch):
        compile_instance(inst, choose_recipe("101"), path_graph("1001"))


def test_selector_reach_on_101():
    reach = selector_reach("10", path_graph("101"))
    # far end on a loop pins the attached end to it; the middle allows both
    assert reach == [frozenset({0}), frozenset({0, 2}), frozenset({2})]


def test_anchor_report():
    t = path_graph("101")
    rep = anchor_report(choose_recipe("101"), t)
    assert rep.sound and rep.faithful == {(0, 2), (2, 0)}
    t = path_graph("0011001")
    assert not anchor_report(choose_recipe("0011001"), t).forces_anchors


def test_faithful_pairs_exclude_diagonal():
    t = path_graph("1001")
    assert all(x != y for x, y in faithful_pairs(choose_recipe("1001"), t))


def test_recipe_for_relabelled_path():
    t = path_graph("1001").relabel([3, 2, 1, 0])
    r = recipe_for_template(t)
    assert {t.has_loop(a) for a in r.anchors} == {True}


def test_tree_recipe_on_spider():
    from qcsp_forests.graphs import PRGraph
    # three legs of length two from an unlooped centre, looped tips
    edges = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (2, 2), (4, 4), (6, 6)]
    r = tree_recipe(PRGraph.from_edges(7, edges))
    assert r.case == "tree-hardness" and r.values["mu"] > 1


def test_report_flags_swapped_anchor_template():
    # the anchor selectors on this path can land on a pair that is not faithful
    t = path_graph("001010001")
    rep = anchor_report(choose_recipe("001010001"), t)
    assert rep.forces_anchors and not rep.never_stuck

import pytest
from hypothesis import assume, given

from qcsp_forests.classify import is_loop_connected, is_quasi_loop_connected, is_zero_eccentric
from qcsp_forests.graphs import (is_homomorphism, is_surjective_homomorphism, path_graph,
                                 path_order, path_word)
from qcsp_forests.logic import SentenceSampler, parse_sentence, sample_sentence
from qcsp_forests.solver import evaluate
from qcsp_forests.surject import (
    add_path_copy, equivalence_witness_path, equivalence_witness_tree, grow_paths,
    multiply_paths_map, surhom2_labels, surhom2_matrix, surhom_entry, surhom_labels, surhom_matrix,
    surhom_truncated,
)

from strategies import pr_trees, words


@pytest.mark.parametrize("m", range(1, 9))
def test_surhom_is_surjective(m):
    assert is_surjective_homomorphism(surhom_matrix(m))


def test_surhom_restricts():
    # smaller matrices are the top-left corners of larger ones
    big = surhom_labels(8)
    for m in range(1, 8):
        assert [row[: m + 1] for row in big[: m + 1]] == surhom_labels(m)


def test_surhom_diagonal_and_first_row():
    for j in range(6):
        assert surhom_entry(j, j) == -j
        assert surhom_entry(0, j) == 0


@pytest.mark.parametrize("a,b", [(a, b) for a in range(1, 5) for b in range(1, 4)])
def test_surhom2_is_surjective(a, b):
    assert is_surjective_homomorphism(surhom2_matrix(a, b))


def test_surhom2_cross():
    rows = surhom2_labels(3, 2)
    centre_cols = [3, 4]
    for row in rows:
        assert [row[c] for c in centre_cols] == ["0_1", "0_2"]


@pytest.mark.parametrize("a,b", [(0, 1), (1, 3), (2, 5)])
def test_truncated_surhom(a, b):
    assert is_surjective_homomorphism(surhom_truncated(a, b))


def test_multiply_paths():
    h = path_graph("0110")  # pendant path 2 -> 3
    f = multiply_paths_map(h, [2, 3])
    grown, _ = add_path_copy(h, [2, 3])
    assert f.codomain == grown and is_surjective_homomorphism(f)
    with pytest.raises(ValueError):
        multiply_paths_map(h, [0, 1])  # 0 is not looped


def test_grow_paths_power():
    h = path_graph("100")
    f, copies, p = grow_paths(h, [0, 1, 2], 2)
    assert p == 4 and len(copies) == 2
    assert is_surjective_homomorphism(f)


@given(words)
def test_path_witnesses_verify(w):
    assume(is_zero_eccentric(w) and len(w) <= 8)
    wit = equivalence_witness_path(w)
    assert wit.verify()
    assert is_loop_connected(wit.core)


def test_0100_core_and_defect():
    wit = equivalence_witness_path("0100", method="unbalanced")
    assert wit.verify()
    assert path_word(wit.core, path_order(wit.core)) in ("100", "001")
    # the two-vertex path is not equivalent: it has a dominating vertex
    s = parse_sentence("E x / A y / edge x y")
    assert evaluate(s, path_graph("10")) and not evaluate(s, path_graph("0100"))


def test_01100_core():
    wit = equivalence_witness_path("01100", method="eccentric")
    assert wit.verify()
    assert path_word(wit.core, path_order(wit.core)) in ("11100", "00111")


def test_witness_rejects_hard_word():
    with pytest.raises(ValueError):
        equivalence_witness_path("101")


@pytest.mark.parametrize("word", ["0100", "01100", "0010", "011000", "1000"])
def test_cores_agree_on_sampled_sentences(word):
    wit = equivalence_witness_path(word)
    cfg = SentenceSampler(seed=11, max_vars=5, max_universals=2)
    for i in range(40):
        s = sample_sentence(cfg, i)
        assert evaluate(s, wit.source) == evaluate(s, wit.core)


@given(pr_trees(7))
def test_tree_witness_is_honest(t):
    assume(is_quasi_loop_connected(t) and t.loops)
    wit = equivalence_witness_tree(t)
    assert is_homomorphism(wit.forward)
    if wit.complete:
        assert wit.verify()
    else:
        assert wit.backward is None or not wit.verify()

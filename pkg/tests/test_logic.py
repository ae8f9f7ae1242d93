import pytest
from hypothesis import given, strategies as st

from qcsp_forests.graphs import FormatError
from qcsp_forests.logic import (EXISTS, FORALL, PHSentence, SentenceSampler, parse_sentence,
                                print_sentence, sample_sentence)


def test_parse_basic():
    s = parse_sentence("A x\nE y  # witness\nedge x y\n")
    assert s.prefix == ((FORALL, "x"), (EXISTS, "y"))
    assert s.atoms == (("x", "y"),)


def test_slash_separated_one_liner():
    assert parse_sentence("A x / E y / edge x y") == parse_sentence("A x\nE y\nedge x y")


@pytest.mark.parametrize("text", [
    "E x\nE x\n",
    "E x\nedge x y\n",
    "edge x x\n",
    "E x\nedge x x\nE y\n",
    "Q x\n",
    "E x y\n",
    "E x\nedge x\n",
])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        parse_sentence(text)


@given(st.integers(0, 10_000), st.integers(0, 50))
def test_print_parse_roundtrip(seed, index):
    s = sample_sentence(SentenceSampler(seed=seed), index)
    assert parse_sentence(print_sentence(s)) == s


@given(st.integers(0, 10_000), st.integers(0, 50))
def test_sampler_respects_bounds(seed, index):
    cfg = SentenceSampler(seed=seed, max_vars=5, max_universals=1, max_atoms=4)
    s = sample_sentence(cfg, index)
    assert 1 <= len(s.prefix) <= 5
    assert len(s.universals) <= 1
    assert 1 <= len(s.atoms) <= 4


def test_sampler_is_deterministic():
    cfg = SentenceSampler(seed=7)
    assert [sample_sentence(cfg, i) for i in range(20)] == [sample_sentence(cfg, i) for i in range(20)]


def test_sampler_rejects_bad_bounds():
    with pytest.raises(ValueError):
        SentenceSampler(max_vars=0)


def test_open_formula_close():
    s = PHSentence(((EXISTS, "y"),), (("x", "y"),), free=("x",))
    assert not s.is_closed
    closed = s.close([(FORALL, "x")])
    assert closed.is_closed and closed.universals == ["x"]
    with pytest.raises(ValueError):
        s.close([(FORALL, "z")])
    with pytest.raises(ValueError):
        print_sentence(s)

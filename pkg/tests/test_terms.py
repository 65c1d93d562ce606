import pytest
from hypothesis import given, strategies as st

from displacement.terms import (SEP, Concat, Intercal, IndexOutOfRange, Literal, Nonterminal,
                                NotGround, Separator, check_term, concat, eval_ground,
                                format_word, intercalate, join_parts, lit, parse_term,
                                parse_word, rank, split_word, term_rank)

w = parse_word


@pytest.mark.parametrize("text, expected", [("a1b11d", 3), ("", 0), ("abc", 0)])
def test_rank(text, expected):
    assert rank(w(text)) == expected


def test_intercalate():
    assert intercalate(w("a1b11d"), 2, w("c1c")) == w("a1bc1c1d")
    assert intercalate(w("1"), 1, w("ab")) == w("ab")
    with pytest.raises(IndexOutOfRange):
        intercalate(w("a1b"), 2, w("x"))


def test_term_rank():
    assert term_rank(lit("a1b"), {}) == 1
    assert term_rank(Intercal(1, Separator(), lit("ab")), {}) == 0
    assert term_rank(Concat(Nonterminal("N"), lit("1")), {"N": 2}) == 3


def test_check_term():
    assert check_term(Intercal(1, Separator(), Separator()), 1, {}) == []
    assert check_term(Concat(Separator(), Separator()), 1, {})
    body = Intercal(1, Intercal(1, Concat(lit("a"), Nonterminal("T")), lit("a")), lit("a"))
    assert check_term(body, 2, {"T": 2}) == []
    assert check_term(Nonterminal("Q"), 2, {})


def test_eval_ground():
    assert eval_ground(Concat(lit("a1"), lit("1d"))) == w("a11d")
    assert eval_ground(Intercal(1, lit("b1"), Concat(lit("a"), lit("c")))) == w("bac")
    with pytest.raises(NotGround):
        eval_ground(Nonterminal("S"))


def test_parse_term_round_trip():
    t = parse_term('("a" . T +1 "a") +1 "a"')
    assert t == Intercal(1, Intercal(1, Concat(lit("a"), Nonterminal("T")), lit("a")), lit("a"))
    assert parse_term(str(t)) == t
    assert parse_term('"x^1 1 x\'1"', ["x^1", "x'1"]) == Literal(("x^1", SEP, "x'1"))


words = st.lists(st.sampled_from(["a", "b", SEP]), max_size=8).map(tuple)


@given(words, words)
def test_concat_rank_adds(u, v):
    assert rank(eval_ground(Concat(Literal(u), Literal(v)))) == rank(u) + rank(v)


@given(words, words, st.integers(1, 4))
def test_intercalation_rank(u, v, j):
    if rank(u) < j:
        with pytest.raises(IndexOutOfRange):
            intercalate(u, j, v)
    else:
        out = intercalate(u, j, v)
        assert rank(out) == rank(u) + rank(v) - 1
        assert len(out) == len(u) + len(v) - 1
        assert term_rank(Intercal(j, Literal(u), Literal(v)), {}) == rank(out)


@given(words)
def test_split_join_inverse(u):
    assert join_parts(split_word(u)) == u
    assert len(split_word(u)) == rank(u) + 1


def test_concat_helper_left_nests():
    a, b, c = lit("a"), lit("b"), lit("c")
    assert concat(a, b, c) == Concat(Concat(a, b), c)

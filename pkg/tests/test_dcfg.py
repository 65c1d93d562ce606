import itertools

import pytest

from displacement import dcfg
from displacement.brackets import RankedAlphabet
from displacement.monoids import is_dyck_by_partition
from displacement.terms import Literal, SEP, Separator, eval_ground, format_word


@pytest.fixture(scope="module")
def g2():
    return dcfg.build_copy_power_grammar(2)


def test_g2_is_valid(g2):
    assert dcfg.validate_grammar(g2) == []


def test_start_rank_and_mismatch():
    bad_start = dcfg.Grammar.make(1, "a", {"S": 1}, [("S", Separator())], "S")
    assert any("start rank" in p for p in dcfg.validate_grammar(bad_start))
    mismatch = dcfg.Grammar.make(1, "a", {"S": 0}, [("S", Literal((SEP,)))], "S")
    assert any("rank mismatch" in p for p in dcfg.validate_grammar(mismatch))
    with pytest.raises(dcfg.InvalidGrammar):
        dcfg.recognize(mismatch, "a")


def test_recognize(g2):
    assert dcfg.recognize(g2, "abaabaaba")
    assert not dcfg.recognize(g2, "ab")
    x2 = RankedAlphabet({"x": 2})
    assert dcfg.recognize(dcfg.build_dyck_grammar(x2), ("x^1", "x'1", "x^2", "x'2"))


def test_enumerate_language(g2):
    assert dcfg.enumerate_language(g2, 3) == {tuple("aaa"), tuple("bbb")}
    up_to_9 = dcfg.enumerate_language(g2, 9)
    expected = {w * 3 for n in (1, 2, 3) for w in itertools.product("ab", repeat=n)}
    assert up_to_9 == expected
    assert dcfg.enumerate_language(g2, 0) == set()
    x1 = RankedAlphabet({"x": 1})
    assert dcfg.enumerate_language(dcfg.build_dyck_grammar(x1), 0) == {()}


def test_copy_grammar_family():
    g1 = dcfg.build_copy_power_grammar(1)
    assert str(g1.rules[2].rhs) == '(("a" . T) +1 "1a")'
    assert {w for w in dcfg.enumerate_language(g1, 6)} == \
        {w * 2 for n in (1, 2, 3) for w in itertools.product("ab", repeat=n)}
    with pytest.raises(ValueError):
        dcfg.build_copy_power_grammar(0)


def test_dyck_grammar_rules():
    rules1 = {str(r) for r in dcfg.build_dyck_grammar(RankedAlphabet({"x": 1})).rules}
    assert {"S0 -> (S0 . S0)", 'S0 -> (("x^1" . S0) . "x\'1")', 'S0 -> ""'} <= rules1
    rules2 = {str(r) for r in dcfg.build_dyck_grammar(RankedAlphabet({"x": 2})).rules}
    assert 'S1 -> (("x^1" . (S1 +1 "x\'1 1 x^2")) . "x\'2")' in rules2


@pytest.mark.parametrize("arities", [{"x": 1}, {"x": 2}, {"x": 2, "y": 1}])
def test_dyck_grammar_language(arities):
    x = RankedAlphabet(arities)
    got = dcfg.enumerate_language(dcfg.build_dyck_grammar(x), 4)
    letters = [str(a) for a in x.letters()]
    brute = {w for n in range(5) for w in itertools.product(letters, repeat=n)
             if is_dyck_by_partition(w, x)}
    assert got == brute


def test_enumerator_agrees_with_recognizer(g2):
    x = RankedAlphabet({"x": 2, "y": 1})
    g = dcfg.build_dyck_grammar(x)
    lang = dcfg.enumerate_language(g, 6)
    letters = [str(a) for a in x.letters()]
    for n in range(0, 7, 2):
        for w in itertools.product(letters, repeat=n):
            assert dcfg.recognize(g, w) == (w in lang)


def test_derive(g2):
    d = dcfg.derive(g2, "abaabaaba")
    assert "".join(d.value) == "abaabaaba"
    assert format_word(eval_ground(d.term)) == "abaabaaba"
    assert [g2.rules[n].lhs for n in d.steps] == ["S", "T", "T", "T"]
    aaa = dcfg.derive(g2, "aaa")
    assert str(g2.rules[aaa.steps[-1]].rhs) == '"11"'
    assert dcfg.derive(g2, "ab") is None
    with pytest.raises(dcfg.DerivationBudgetExhausted):
        dcfg.derive(g2, "abaabaaba", max_steps=2)


def test_foreign_symbol(g2):
    with pytest.raises(dcfg.ForeignSymbol):
        dcfg.recognize(g2, "abc")


def test_grammar_text_round_trip(g2):
    text = dcfg.format_grammar(g2)
    again = dcfg.parse_grammar(text)
    assert again == g2
    with pytest.raises(dcfg.GrammarError):
        dcfg.parse_grammar("k 1\nbogus line\n")


def test_parikh_prefilter_rejects_fast():
    g = dcfg.parse_grammar('k 0\nalphabet a b\nnonterm S 0\nstart S\nrule S -> "a" S "b"\nrule S -> ""\n')
    assert dcfg.recognize(g, "aaabbb")
    assert not dcfg.recognize(g, "a" * 40 + "b" * 39)


def test_minimal_yields(g2):
    assert dcfg.minimal_yields(g2) == {"T": 0, "S": 3}

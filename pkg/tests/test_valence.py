import itertools
import re

import pytest

from displacement import valence as V
from displacement.monoids import PolycyclicElement, ProductElement, push
from displacement.search import Outcome, RunBudget

from machines import anbn_depth2_pda


def words(alphabet, n):
    for k in range(n + 1):
        yield from map("".join, itertools.product(alphabet, repeat=k))


@pytest.fixture(scope="module")
def abc():
    return V.build_abc_valence()


def test_abc_automaton(abc):
    assert V.run_valence(abc, "aabbcc").outcome is Outcome.ACCEPT
    assert V.run_valence(abc, "abc").accepted
    assert V.run_valence(abc, "aabc").outcome is Outcome.REJECT
    assert not V.run_valence(abc, "")
    assert not V.run_valence(abc, "abcc")


def test_abc_witness(abc):
    run = V.run_valence(abc, "aabbcc", witness=True)
    labels = [t.symbol for t, _ in run.witness[1:] if t.symbol]
    assert "".join(labels) == "aabbcc"
    assert run.witness[-1][1][2].is_identity


def test_unknown_on_tiny_budget():
    a = V.ValenceAutomaton(("q",), ("a",), (V.ValenceEdge("q", push("x"), None, "q"),), "q", {"q"})
    run = V.run_valence(a, "a", RunBudget(max_configurations=5))
    assert run.outcome is Outcome.UNKNOWN and run.binding


def test_anbn_pda():
    p = V.build_anbn_pda()
    assert V.run_lookup_pda(p, "aabb").accepted
    assert V.run_lookup_pda(p, "abab").outcome is Outcome.REJECT
    assert V.run_lookup_pda(p, "").accepted


def test_eliminate_lookup_pda_language():
    p = V.build_anbn_pda()
    blind = V.eliminate_lookup_pda(p)
    assert blind.depth == 0
    got = {w for w in words("ab", 8) if V.run_lookup_pda(blind, w)}
    assert got == {"a" * n + "b" * n for n in range(5)}


@pytest.mark.parametrize("make", [V.build_anbn_pda, anbn_depth2_pda])
def test_eliminate_state_count(make):
    p = make()
    k = p.depth
    blind = V.eliminate_lookup_pda(p)
    gamma = len(p.stack_alphabet) + k
    core = [q for q in blind.states if len(q) == 2 and q[0] in p.states]
    assert len(core) == len(p.states) * gamma ** k
    assert len([q for q in blind.states if q[0] not in ("pre", "fin")]) == 2 + len(p.states) * gamma ** k


def test_marker_invariant():
    """Every entry and every core state remember the symbols beneath, padded with the bottom marker."""
    p = anbn_depth2_pda()
    blind = V.eliminate_lookup_pda(p)
    k = p.depth
    problems, checked = [], []

    def visit(config):
        state, _, stack = config
        symbols = tuple(s for s, _ in stack)
        if not symbols:
            return
        pad = (symbols[0],) * k
        checked.append(config)
        for i, (_, window) in enumerate(stack):
            if window != (pad + symbols[:i])[-k:]:
                problems.append(config)
        if state[0] in p.states and state[1] != (pad + symbols)[-k:]:
            problems.append(config)

    for w in words("abc", 6):
        V.run_lookup_pda(blind, w, visit=visit)
    assert checked and not problems


def test_blind_copy_when_depth_zero():
    p = V.LookupPDA(("q",), ("a",), ("A",), (
        V.PdaTransition("q", "a", (), V.PUSH, "A", "q"),
        V.PdaTransition("q", None, (), V.POP, "A", "q")), "q", {"q"})
    blind = V.eliminate_lookup_pda(p)
    assert all(V.run_lookup_pda(p, w).accepted == V.run_lookup_pda(blind, w).accepted
               for w in words("a", 5))


def test_pda_to_valence():
    blind = V.eliminate_lookup_pda(V.build_anbn_pda())
    a = V.pda_to_valence(blind)
    assert V.run_valence(a, "ab").accepted and not V.run_valence(a, "ba").accepted
    empty = V.LookupPDA(("q",), ("a",), (), (), "q", {"q"})
    ea = V.pda_to_valence(empty)
    assert [w for w in words("a", 3) if V.run_valence(ea, w)] == [""]
    with pytest.raises(V.MachineError):
        V.pda_to_valence(V.build_anbn_pda())


def test_element_text():
    e = ProductElement(push("a"), PolycyclicElement(pops=("b",)))
    assert V.parse_element(V.format_element(e)) == e
    assert V.parse_element("0").is_zero
    assert V.parse_element("1").is_identity


def test_valence_and_pda_text_round_trip(abc):
    again = V.parse_valence(V.format_valence(abc))
    assert {w for w in words("abc", 6) if V.run_valence(again, w)} == \
        {w for w in words("abc", 6) if V.run_valence(abc, w)}
    p = anbn_depth2_pda()
    assert V.parse_pda(V.format_pda(p)) == p
    with pytest.raises(V.MachineFormatError):
        V.parse_pda("nonsense\n")


def test_abc_language_small(abc):
    pattern = re.compile(r"a+b+c+")
    for w in words("abc", 7):
        expected = bool(pattern.fullmatch(w)) and w.count("a") == w.count("b") == w.count("c")
        assert V.run_valence(abc, w).accepted == expected

import itertools

import pytest
from hypothesis import given, strategies as st

from displacement import monoids as M
from displacement.brackets import RankedAlphabet, parse_bracket_word as bw

X1 = RankedAlphabet({"x": 1})
X2 = RankedAlphabet({"x": 2})
X21 = RankedAlphabet({"x": 2, "y": 1})


def a(sym, i):
    return M.ASymbol(sym, i)


def test_multiply():
    assert (M.push("a") * M.pop("a")).is_identity
    e = M.pop("a") * M.push("a")
    assert (e.pops, e.pushes) == (("a",), ("a",)) and not e.is_identity
    assert M.push("a") * M.pop("b") == M.ZERO


def test_reduce_word():
    assert M.pc_reduce_word([("push", "a"), ("pop", "a"), ("push", "b"), ("pop", "b")]).is_identity
    assert M.pc_reduce_word([("pop", "a")]) == M.pop("a")
    assert M.pc_reduce_word([("push", "a"), ("push", "b"), ("pop", "a")]) == M.ZERO


def test_phi1():
    assert M.phi1("x^2", X2) == ("push", a("x", 2))
    assert M.phi1("x'1", X2) == ("pop", a("x", 1))
    assert M.phi1("y^1", X21) == ("push", a("y", 1))


def test_phi2():
    assert M.phi2("x'1", X2) == ("push", a("x", 2))
    assert M.phi2("x^2", X2) == ("pop", a("x", 2))
    assert M.phi2("x'2", X2) == ("pop", a("x", 1))


def test_sx_reduce():
    assert M.sx_reduce((), X2).is_identity
    assert M.sx_reduce(bw("x^1 x'1 x^2 x'2"), X2).is_identity
    assert M.sx_reduce(bw("x^1 x^2 x'1 x'2"), X2).second.is_zero


def test_dyck_deciders():
    assert M.is_dyck_by_monoid(bw("x^1 x'1 x^2 x'2"), X2)
    assert M.is_dyck_by_monoid((), X2)
    w = bw("x^1 x'1 x^2 y^1 y'1 x'2")
    assert M.is_dyck_by_monoid(w, X21) == M.is_dyck_by_partition(w, X21) is True


def test_partition():
    assert M.dyck_partition(bw("x^1 x'1"), X1) == [(0, 1)]
    assert M.dyck_partition(bw("x^1 x^2 x'1 x'2"), X2) is None
    assert not M.is_dyck_by_partition(bw("x^1 x'1 x^2"), X2)
    assert M.is_valid_partition(bw("x^1 x'1 x^2 x'2"), X2, [(0, 1, 2, 3)])
    assert not M.is_valid_partition(bw("x^1 x'1 x^1 x'1"), X1, [(0, 3), (1, 2)])


def test_chain_cycles():
    assert M.chain_cycles(bw("x^1 x'1 x^2 x'2"), X2) == [(0, 1, 2, 3)]
    assert M.chain_cycles(bw("x^1 x'1 x^1 x'1"), X1) == [(0, 1), (2, 3)]
    with pytest.raises(M.NotIdentity):
        M.chain_cycles(bw("x^1 x^1"), X1)


def test_contraction():
    gens = [("push", "a"), ("push", "b"), ("pop", "b"), ("pop", "a")]
    assert M.contraction(gens) == {0: 3, 3: 0, 1: 2, 2: 1}
    with pytest.raises(M.NotIdentity):
        M.contraction([("pop", "a")])


def test_partition_cap():
    with pytest.raises(M.CapExceeded):
        M.dyck_partition(bw("x^1 x'1") * 8, X1, cap=4)


gens = st.lists(st.tuples(st.sampled_from(["push", "pop"]), st.sampled_from("ab")), max_size=6)
elements = st.one_of(st.just(M.ZERO), gens.map(M.pc_reduce_word))


@given(elements, elements, elements)
def test_associativity(p, q, r):
    assert (p * q) * r == p * (q * r)


@given(elements)
def test_identity_laws(p):
    assert M.IDENTITY * p == p == p * M.IDENTITY
    assert M.ZERO * p == M.ZERO == p * M.ZERO


@given(st.lists(st.sampled_from(X21.letters()), max_size=10), st.data())
def test_homomorphism(w, data):
    cut = data.draw(st.integers(0, len(w)))
    assert M.sx_reduce(w, X21) == M.sx_reduce(w[:cut], X21) * M.sx_reduce(w[cut:], X21)


def test_monoid_and_partition_agree_exhaustively():
    letters = X21.letters()
    for n in range(0, 7, 2):
        for w in itertools.product(letters, repeat=n):
            assert M.is_dyck_by_monoid(w, X21) == M.is_dyck_by_partition(w, X21)

"""Hand-built machines shared by several test modules."""
from displacement.two_stack import (KEEP, MOVE, POP, PUSH, RETURN, GstsaMachine,
                                    StackTransition as T)
from displacement.valence import POP as PDA_POP, PUSH as PDA_PUSH, LookupPDA, PdaTransition


def g1_gstsa():
    """Rank 2, ``a^n b^n c^n`` with n >= 0."""
    return GstsaMachine(("q0", "q1", "q2", "q3"), ("a", "b", "c"), ("A", "X", "Y", "C"), 2, (
        T("q0", "a", PUSH, "A", "X", "q0"), T("q0", None, KEEP, None, None, "q1"),
        T("q1", "b", MOVE, "A", "Y", "q1"), T("q1", None, KEEP, None, None, "q2"),
        T("q2", "c", RETURN, "Y", "C", "q2"), T("q2", None, KEEP, None, None, "q3"),
        T("q3", None, POP, "C", "X", "q3")), "q0", {"q3"})


def g2_gstsa():
    """Rank 2, ``w c w^R`` where ``dd`` may precede any ``a`` of the second half."""
    return GstsaMachine(("q0", "q1", "q2"), ("a", "b", "c", "d"), ("A", "B", "C"), 2, (
        T("q0", "a", PUSH, "A", "B", "q0"), T("q0", "b", PUSH, "B", "A", "q0"),
        T("q0", "c", KEEP, None, None, "q1"),
        T("q1", "a", POP, "A", "B", "q1"), T("q1", "b", POP, "B", "A", "q1"),
        T("q1", "d", MOVE, "A", "C", "q2"), T("q2", "d", RETURN, "C", "A", "q1")), "q0", {"q1"})


def g2_oracle(s: str) -> bool:
    if s.count("c") != 1:
        return False
    left, right = s.split("c")
    if "d" in left or right.replace("dda", "a").count("d"):
        return False
    return right.replace("dda", "a") == left[::-1]


def sighted_gstsa():
    """Rank 1; ``b`` needs an ``A`` on top of the first stack, so words are ``a``-initial."""
    return GstsaMachine(("q",), ("a", "b"), ("A", "B"), 1, (
        T("q", "a", PUSH, "A", "A", "q"),
        T("q", "b", PUSH, "B", "B", "q", observe1=("A",)),
        T("q", None, POP, "A", "A", "q"),
        T("q", None, POP, "B", "B", "q"),
    ), "q", {"q"})


def anbn_depth2_pda():
    """``a^n b^n``, plus ``a^n c b^(n+1)`` for n >= 2: ``c`` must see two ``A`` on top."""
    return LookupPDA(("p", "r", "s"), ("a", "b", "c"), ("A",), (
        PdaTransition("p", "a", (), PDA_PUSH, "A", "p"),
        PdaTransition("p", "c", ("A", "A"), PDA_PUSH, "A", "r"),
        PdaTransition("r", "b", ("A",), PDA_POP, "A", "r"),
        PdaTransition("p", "b", ("A",), PDA_POP, "A", "s"),
        PdaTransition("s", "b", ("A",), PDA_POP, "A", "s"),
    ), "p", {"p", "r", "s"})

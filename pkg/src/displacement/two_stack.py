"""Simultaneous two-stack automata, their generalized form, and garlands.

Stack entries are ``(symbol, counter)`` pairs; stacks are tuples with the
top at the end.  Counters on the first stack are odd (``2i-1`` while the
symbol spends its ``i``-th stay there); the second stack holds even
counters for moved symbols and ``1`` for the placeholder left by PUSH.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

from .search import Outcome, RunBudget, RunResult, explore, layered_search
from .valence import MachineError, MachineFormatError, fresh_name, render

PUSH, MOVE, RETURN, POP, KEEP = "PUSH", "MOVE", "RETURN", "POP", "KEEP"
OPS = (PUSH, MOVE, RETURN, POP, KEEP)


class NotAGarland(ValueError):
    pass


@dataclass(frozen=True)
class StackTransition:
    """``<source, symbol> -> <target, op, first, second>``.

    STSA transitions have ``first == second``; KEEP carries no symbols.
    ``observe1``/``observe2`` are the stack windows (deepest first) a sighted
    machine must see on top of each stack.
    """

    source: Hashable
    symbol: Optional[str]
    op: str
    first: Optional[Hashable]
    second: Optional[Hashable]
    target: Hashable
    observe1: tuple = ()
    observe2: tuple = ()

    def __post_init__(self):
        if self.op not in OPS:
            raise MachineError(f"unknown stack operation {self.op!r}")
        if (self.op == KEEP) != (self.first is None and self.second is None):
            raise MachineError("KEEP carries no stack symbols and every other operation does")

    @property
    def symbols(self) -> tuple:
        return () if self.op == KEEP else (self.first, self.second)


def stsa_transition(source, symbol, op, stack_symbol, target) -> StackTransition:
    return StackTransition(source, symbol, op, stack_symbol, stack_symbol, target)


@dataclass(frozen=True)
class Configuration:
    state: Hashable
    remaining: tuple
    stack1: tuple = ()
    stack2: tuple = ()


class _Machine:
    @cached_property
    def outgoing(self) -> dict:
        out = defaultdict(list)
        for t in self.transitions:
            out[t.source].append(t)
        return dict(out)

    def _check_common(self, gamma: set) -> None:
        object.__setattr__(self, "finals", frozenset(self.finals))
        states = set(self.states)
        if self.initial not in states or not self.finals <= states:
            raise MachineError("initial and final states must be states")
        for t in self.transitions:
            if t.source not in states or t.target not in states:
                raise MachineError(f"transition endpoint outside the state set: {t}")
            if t.symbol is not None and t.symbol not in self.alphabet:
                raise MachineError(f"input symbol {t.symbol!r} outside the alphabet")
            used = set(t.symbols) | set(t.observe1) | set(t.observe2)
            if not used <= gamma:
                raise MachineError(f"transition uses unknown stack symbols: {t}")

    @property
    def has_keep(self) -> bool:
        return any(t.op == KEEP for t in self.transitions)


@dataclass(frozen=True)
class StsaMachine(_Machine):
    states: tuple
    alphabet: tuple
    arities: tuple  # ((symbol, arity), ...)
    transitions: tuple
    initial: Hashable
    finals: frozenset
    rank: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "arities", tuple(dict(self.arities).items()))
        if self.rank is None:
            object.__setattr__(self, "rank", max((a for _, a in self.arities), default=1))
        for sym, ar in self.arities:
            if not 1 <= ar <= self.rank:
                raise MachineError(f"arity of {render(sym)} must lie in 1..{self.rank}")
        for t in self.transitions:
            if t.first != t.second:
                raise MachineError(f"STSA transitions use one stack symbol: {t}")
            if t.observe1 or t.observe2:
                raise MachineError("STSA transitions do not observe the stacks")
        self._check_common(set(self.arity_map))

    @cached_property
    def arity_map(self) -> dict:
        return dict(self.arities)

    @property
    def stack_alphabet(self) -> tuple:
        return tuple(s for s, _ in self.arities)


@dataclass(frozen=True)
class GstsaMachine(_Machine):
    states: tuple
    alphabet: tuple
    stack_alphabet: tuple
    rank: int
    transitions: tuple
    initial: Hashable
    finals: frozenset
    depth: Optional[int] = None  # lookup depth; defaults to the longest observation

    def __post_init__(self):
        if self.rank < 1:
            raise MachineError("rank must be positive")
        longest = max((max(len(t.observe1), len(t.observe2)) for t in self.transitions), default=0)
        if self.depth is None:
            object.__setattr__(self, "depth", longest)
        elif longest > self.depth:
            raise MachineError(f"observation of length {longest} exceeds lookup depth {self.depth}")
        self._check_common(set(self.stack_alphabet))


Machine = Union[StsaMachine, GstsaMachine]


# -- steps -----------------------------------------------------------------------------------

def _stsa_apply(ar: Mapping, t: StackTransition, s1: tuple, s2: tuple) -> Optional[tuple]:
    op, a = t.op, t.first
    if op == PUSH:
        return s1 + ((a, 1),), s2 + ((a, 1),)
    if op == KEEP:
        return s1, s2
    if op == MOVE:
        if s1 and s1[-1][0] == a:
            c = s1[-1][1]
            if (c + 1) // 2 < ar[a]:
                return s1[:-1], s2 + ((a, c + 1),)
        return None
    if op == RETURN:
        if s2 and s2[-1][0] == a:
            c = s2[-1][1]
            if c % 2 == 0 and c // 2 < ar[a]:
                return s1 + ((a, c + 1),), s2[:-1]
        return None
    # POP
    if s1 and s2 and s1[-1] == (a, 2 * ar[a] - 1) and s2[-1] == (a, 1):
        return s1[:-1], s2[:-1]
    return None


def _observes(window: tuple, stack: tuple) -> bool:
    n = len(window)
    return not n or (len(stack) >= n and tuple(e[0] for e in stack[-n:]) == window)


def _gstsa_apply(k: int, t: StackTransition, s1: tuple, s2: tuple) -> Optional[tuple]:
    if not (_observes(t.observe1, s1) and _observes(t.observe2, s2)):
        return None
    op, a1, a2 = t.op, t.first, t.second
    if op == PUSH:
        return s1 + ((a1, 1),), s2 + ((a2, 1),)
    if op == KEEP:
        return s1, s2
    if op == MOVE:
        if s1 and s1[-1][0] == a1 and (s1[-1][1] + 1) // 2 < k:
            return s1[:-1], s2 + ((a2, s1[-1][1] + 1),)
        return None
    if op == RETURN:
        if s2 and s2[-1][0] == a1:
            c = s2[-1][1]
            if c % 2 == 0 and c // 2 < k:
                return s1 + ((a2, c + 1),), s2[:-1]
        return None
    # POP: any residency up to the rank
    if s1 and s2 and s1[-1][0] == a1 and (s1[-1][1] + 1) // 2 <= k and s2[-1] == (a2, 1):
        return s1[:-1], s2[:-1]
    return None


def _applier(m: Machine):
    if isinstance(m, StsaMachine):
        ar = m.arity_map
        return lambda t, s1, s2: _stsa_apply(ar, t, s1, s2)
    return lambda t, s1, s2: _gstsa_apply(m.rank, t, s1, s2)


def _step(m: Machine, c: Configuration, t: StackTransition) -> Optional[Configuration]:
    if t.source != c.state:
        return None
    rest = c.remaining
    if t.symbol is not None:
        if not rest or rest[0] != t.symbol:
            return None
        rest = rest[1:]
    stacks = _applier(m)(t, c.stack1, c.stack2)
    if stacks is None:
        return None
    return Configuration(t.target, rest, *stacks)


def stsa_step(m: StsaMachine, c: Configuration, t: StackTransition) -> Optional[Configuration]:
    """Fire ``t`` in ``c``; ``None`` when the transition is inapplicable."""
    return _step(m, c, t)


def gstsa_step(m: GstsaMachine, c: Configuration, t: StackTransition) -> Optional[Configuration]:
    return _step(m, c, t)


# -- runs ------------------------------------------------------------------------------------

def _search_parts(m: Machine, word: Sequence, budget: RunBudget):
    outgoing, apply = m.outgoing, _applier(m)

    def moves(state, memory):
        s1, s2 = memory
        for t in outgoing.get(state, ()):
            yield t.symbol, t, t.target, apply(t, s1, s2)

    return dict(
        word=word, initial=(m.initial, ((), ())), moves=moves,
        accepting=lambda q, mem: q in m.finals and not mem[0] and not mem[1],
        height=lambda mem: max(len(mem[0]), len(mem[1])),
        max_height=budget.height_for(2 * (len(word) + 2) * max(1, m.rank)),
        budget=budget)


def run_stsa(m: Machine, word: Sequence[str], budget: RunBudget = RunBudget(),
             witness: bool = False, visit=None) -> RunResult:
    """Accept iff some run reads ``word`` and ends in a final state with both stacks empty.

    Witness steps are ``(transition, (state, position, (stack1, stack2)))``.
    """
    return layered_search(**_search_parts(m, word, budget), visit=visit, witness=witness)


run_gstsa = run_stsa


@dataclass
class Computations:
    computations: list  # each a list of (transition, configuration) steps
    truncated: bool
    binding: Optional[str] = None

    def __iter__(self):
        return iter(self.computations)

    def __len__(self) -> int:
        return len(self.computations)


def enumerate_accepting_computations(m: Machine, word: Sequence[str], budget: RunBudget = RunBudget(),
                                     cap: int = 1000, visit=None) -> Computations:
    """Accepting computations on ``word`` that never repeat a configuration.

    A computation revisiting a configuration contains a removable loop, so
    this set is finite.  At most ``cap`` are returned; ``truncated`` is set
    when the cap or the budget cut the enumeration short.
    """
    successors, finals, binding, start = explore(**_search_parts(m, word, budget), visit=visit)
    finals = set(finals)
    # configurations from which an accepting one is reachable
    preds = defaultdict(list)
    for c, outs in successors.items():
        for _, nxt in outs:
            preds[nxt].append(c)
    alive, stack = set(finals), list(finals)
    while stack:
        for p in preds[stack.pop()]:
            if p not in alive:
                alive.add(p)
                stack.append(p)
    found: list = []
    truncated = binding is not None
    if start not in alive:
        return Computations(found, truncated, binding)
    path = [(None, start)]
    on_path = {start}

    def dfs(config) -> bool:
        if config in finals:
            found.append(list(path))
            if len(found) >= cap:
                return False
        for t, nxt in successors.get(config, ()):
            if nxt in alive and nxt not in on_path:
                path.append((t, nxt))
                on_path.add(nxt)
                go_on = dfs(nxt)
                on_path.discard(nxt)
                path.pop()
                if not go_on:
                    return False
        return True

    if not dfs(start):
        truncated = True
    return Computations(found, truncated, binding)


# -- KEEP desugaring and the embedding -----------------------------------------------------------

def desugar_keep(m: Machine) -> Machine:
    """Replace each KEEP edge by PUSH Z, then POP Z through a fresh state."""
    if not m.has_keep:
        return m
    z = fresh_name("Z", (render(s) for s in m.stack_alphabet))
    states = list(m.states)
    transitions = []
    n = 0
    for t in m.transitions:
        if t.op != KEEP:
            transitions.append(t)
            continue
        mid = ("keep", n)
        n += 1
        states.append(mid)
        transitions.append(StackTransition(t.source, t.symbol, PUSH, z, z, mid, t.observe1, t.observe2))
        transitions.append(StackTransition(mid, None, POP, z, z, t.target))
    if isinstance(m, StsaMachine):
        return StsaMachine(tuple(states), m.alphabet, m.arities + ((z, 1),), tuple(transitions),
                           m.initial, m.finals, m.rank)
    return GstsaMachine(tuple(states), m.alphabet, m.stack_alphabet + (z,), m.rank, tuple(transitions),
                        m.initial, m.finals, m.depth)


def stsa_to_gstsa(m: StsaMachine) -> GstsaMachine:
    """Embed an STSA into a GSTSA of the same rank with the same runs.

    A GSTSA bounds counters only by the rank, so each symbol ``A`` is
    refined to ``(A, c)`` for every counter value ``c`` it can carry.  The
    refined transitions then fire exactly when the original ones do, and
    POP only sees ``A`` at its last residency.
    """
    if m.has_keep:
        raise MachineError("desugar KEEP transitions before embedding")
    ar = m.arity_map
    gamma = tuple((a, c) for a, n in m.arities for c in range(1, 2 * n))
    transitions = []
    for t in m.transitions:
        a = t.first
        if t.op == PUSH:
            pairs = [((a, 1), (a, 1))]
        elif t.op == MOVE:
            pairs = [((a, 2 * i - 1), (a, 2 * i)) for i in range(1, ar[a])]
        elif t.op == RETURN:
            pairs = [((a, 2 * i), (a, 2 * i + 1)) for i in range(1, ar[a])]
        else:
            pairs = [((a, 2 * ar[a] - 1), (a, 1))]
        transitions += [StackTransition(t.source, t.symbol, t.op, x, y, t.target) for x, y in pairs]
    return GstsaMachine(m.states, m.alphabet, gamma, m.rank, tuple(transitions), m.initial, m.finals)


def build_copy_machine() -> StsaMachine:
    """Rank 2 machine for the crossing copy language ``a^m b^n a^m b^n``."""
    q = [f"q{i}" for i in range(7)]
    rows = [
        (0, "a", PUSH, "A"), (1, "b", PUSH, "B"), (2, None, MOVE, "B"),
        (3, "a", MOVE, "A"), (4, None, RETURN, "A"), (5, "b", RETURN, "B"),
    ]
    transitions = []
    for i, sym, op, a in rows:
        transitions.append(stsa_transition(q[i], sym, op, a, q[i]))
        transitions.append(StackTransition(q[i], None, KEEP, None, None, q[i + 1]))
    transitions.append(stsa_transition(q[6], None, POP, "B", q[6]))
    transitions.append(stsa_transition(q[6], None, POP, "A", q[6]))
    return StsaMachine(tuple(q), ("a", "b"), (("A", 2), ("B", 2)), tuple(transitions), "q0", {"q6"})


# -- garlands ------------------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Mark:
    """A bracket over the stack alphabet: ``A`` opens, ``A'`` (barred) closes."""

    symbol: Hashable
    barred: bool = False

    def __str__(self) -> str:
        return render(self.symbol) + ("'" if self.barred else "")


def psi(t: StackTransition) -> tuple:
    """The stack image of a transition, one bracket per stack.

    Each coordinate names the symbol actually pushed or removed on that
    stack, so RETURN, which takes ``first`` off the second stack and puts
    ``second`` on the first, maps to ``<second, first'>``.
    """
    a1, a2 = t.first, t.second
    if t.op == PUSH:
        return Mark(a1), Mark(a2)
    if t.op == MOVE:
        return Mark(a1, True), Mark(a2)
    if t.op == RETURN:
        return Mark(a2), Mark(a1, True)
    if t.op == POP:
        return Mark(a1, True), Mark(a2, True)
    raise MachineError("KEEP transitions have no stack image")


def psi_image(steps: Iterable) -> list:
    """Stack image of a computation given as transitions or ``(transition, config)`` steps.

    KEEP steps leave both stacks alone and contribute nothing.
    """
    out = []
    for s in steps:
        t = s[0] if isinstance(s, tuple) else s
        if t is not None and t.op != KEEP:
            out.append(psi(t))
    return out


def parse_garland(text: str) -> list:
    """``a,a a',b`` : space-separated pairs, ``'`` marks a closing bracket."""
    out = []
    for tok in text.split():
        parts = tok.split(",")
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"garland letter must be a pair 'x,y': {tok!r}")
        out.append(tuple(Mark(p.rstrip("'"), p.endswith("'")) for p in parts))
    return out


def format_garland(w: Sequence) -> str:
    return " ".join(f"{x},{y}" for x, y in w)


def _contraction(marks: Sequence[Mark]) -> Optional[dict]:
    stack: list = []
    partner: dict = {}
    for i, m in enumerate(marks):
        if not m.barred:
            stack.append(i)
        elif stack and marks[stack[-1]].symbol == m.symbol:
            j = stack.pop()
            partner[i], partner[j] = j, i
        else:
            return None
    return None if stack else partner


@dataclass
class GarlandCheck:
    ok: bool
    reason: str
    r1: Optional[dict] = None  # contraction partner maps of the projections
    r2: Optional[dict] = None
    longest_chain: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _ascending_chains(r1: dict, r2: dict, n: int) -> dict:
    """Length of the longest ascending chain starting at each ascending ``R1`` edge."""
    best: dict = {}
    for i in range(n - 1, -1, -1):
        j = r1[i]
        if j < i:
            continue
        length = 1
        nxt = r2[j]
        if nxt > j and r1[nxt] > nxt:
            length += best[nxt]
        best[i] = length
    return best


def is_k_garland(w: Sequence, k: int) -> GarlandCheck:
    """Check the three garland conditions, reporting the first violation.

    The second condition follows the two ways a stack-2 pair ``x < y`` can
    arise: a MOVE at ``x`` returned at ``y`` (first-stack partners
    ``R1[x] < x`` and ``R1[y] > y``), or a PUSH at ``x`` popped at ``y``
    (``x < R1[x]`` and ``R1[y] < y``, nested, or swapped when no MOVE happens).
    """
    w = list(w)
    r1 = _contraction([x for x, _ in w])
    if r1 is None:
        return GarlandCheck(False, "first projection is not a correct bracket sequence")
    r2 = _contraction([y for _, y in w])
    if r2 is None:
        return GarlandCheck(False, "second projection is not a correct bracket sequence", r1)
    for x in range(len(w)):
        y = r2[x]
        if y < x:
            continue
        a, b = r1[x], r1[y]
        if a < x and y < b:
            continue
        if x < a < b < y or (a == y and b == x):
            continue
        return GarlandCheck(False, f"pairs ({min(a, x)},{max(a, x)}), ({min(b, y)},{max(b, y)}) "
                                   f"around ({x},{y}) interleave wrongly", r1, r2)
    chains = _ascending_chains(r1, r2, len(w))
    longest = max(chains.values(), default=0)
    if longest > k:
        return GarlandCheck(False, f"ascending chain of length {longest} exceeds {k}", r1, r2, longest)
    return GarlandCheck(True, "ok", r1, r2, longest)


def extract_garland_cycles(w: Sequence, k: Optional[int] = None) -> list:
    """Split the positions of a garland into its closed chains.

    Each cycle is the tuple ``(i1, j1, ..., il, jl)``.
    """
    check = is_k_garland(w, k if k is not None else len(w))
    if not check:
        raise NotAGarland(check.reason)
    r1, r2 = check.r1, check.r2
    starts = [i for i in range(len(w)) if r1[i] > i and not (r2[i] < i and r1[r2[i]] < r2[i])]
    cycles, seen = [], set()
    for i in starts:
        cycle = []
        cur = i
        while True:
            j = r1[cur]
            cycle += [cur, j]
            nxt = r2[j]
            if nxt > j and r1[nxt] > nxt:
                cur = nxt
            else:
                break
        if r2[cycle[-1]] != cycle[0]:
            raise NotAGarland(f"chain starting at {i} does not close")
        cycles.append(tuple(cycle))
        seen.update(cycle)
    if len(seen) != len(w):
        raise NotAGarland("some positions lie on no closed chain")
    return cycles


# -- lookup elimination ---------------------------------------------------------------------------

def eliminate_lookup_gstsa(m: GstsaMachine) -> GstsaMachine:
    """Blind GSTSA tracking the top ``d`` symbols of both stacks in its states.

    Mirrors the pushdown construction: entries become ``(symbol, window)``
    with the window of ``d`` symbols below on the same stack, both stacks
    get bottom markers pushed one pair at a time, and former final states
    pop them again.
    """
    d = m.depth
    if d == 0:
        tag = lambda x: (x, ())
        trans = tuple(StackTransition(tag(t.source), t.symbol, t.op,
                                      None if t.op == KEEP else tag(t.first),
                                      None if t.op == KEEP else tag(t.second), tag(t.target))
                      for t in m.transitions)
        return GstsaMachine(tuple(map(tag, m.states)), m.alphabet, tuple(map(tag, m.stack_alphabet)),
                            m.rank, trans, tag(m.initial), frozenset(map(tag, m.finals)), depth=0)
    gamma = tuple(m.stack_alphabet)
    markers: list = []
    for i in range(1, d + 1):
        markers.append(fresh_name(f"Z{i}", set(gamma) | set(markers)))
    markers = tuple(markers)
    ext = gamma + markers
    windows = list(_windows(ext, d))
    init, final = ("init",), ("final",)
    core = [(q, w1, w2) for q in m.states for w1 in windows for w2 in windows]
    transitions: list = []

    entries = [(markers[i], (markers[0],) * (d - i) + markers[:i]) for i in range(d)]
    prelude = [init] + [("pre", i) for i in range(1, d)] + [(m.initial, markers, markers)]
    for i in range(d):
        transitions.append(StackTransition(prelude[i], None, PUSH, entries[i], entries[i], prelude[i + 1]))

    for t in m.transitions:
        for w1 in windows:
            if t.observe1 and w1[d - len(t.observe1):] != t.observe1:
                continue
            for w2 in windows:
                if t.observe2 and w2[d - len(t.observe2):] != t.observe2:
                    continue
                transitions += _translate(t, w1, w2, ext)

    finale = [("fin", i) for i in range(d - 1, 0, -1)] + [final]
    for q in sorted(m.finals, key=render):
        transitions.append(StackTransition((q, markers, markers), None, POP, entries[-1], entries[-1], finale[0]))
    for i in range(d - 1):
        e = entries[d - 2 - i]
        transitions.append(StackTransition(finale[i], None, POP, e, e, finale[i + 1]))

    states = [init, final] + core + prelude[1:-1] + finale[:-1]
    stack_alphabet = tuple((s, w) for s in ext for w in windows)
    return GstsaMachine(tuple(states), m.alphabet, stack_alphabet, m.rank, tuple(transitions),
                        init, frozenset({final}), depth=0)


def _windows(symbols: tuple, d: int) -> list:
    out = [()]
    for _ in range(d):
        out = [w + (s,) for w in out for s in symbols]
    return out


def _translate(t: StackTransition, w1: tuple, w2: tuple, ext: tuple) -> list:
    src = (t.source, w1, w2)
    a1, a2 = t.first, t.second
    mk = lambda op, x, y, tgt: StackTransition(src, t.symbol, op, x, y, tgt)
    if t.op == KEEP:
        return [StackTransition(src, t.symbol, KEEP, None, None, (t.target, w1, w2))]
    if t.op == PUSH:
        return [mk(PUSH, (a1, w1), (a2, w2), (t.target, w1[1:] + (a1,), w2[1:] + (a2,)))]
    if t.op == MOVE:
        if w1[-1] != a1:
            return []
        return [mk(MOVE, (a1, old), (a2, w2), (t.target, old, w2[1:] + (a2,)))
                for old in ((x,) + w1[:-1] for x in ext)]
    if t.op == RETURN:
        if w2[-1] != a1:
            return []
        return [mk(RETURN, (a1, old), (a2, w1), (t.target, w1[1:] + (a2,), old))
                for old in ((x,) + w2[:-1] for x in ext)]
    if w1[-1] != a1 or w2[-1] != a2:
        return []
    return [mk(POP, (a1, o1), (a2, o2), (t.target, o1, o2))
            for o1 in ((x,) + w1[:-1] for x in ext) for o2 in ((x,) + w2[:-1] for x in ext)]


# -- invariants ------------------------------------------------------------------------------------

def counter_violations(stack1: tuple, stack2: tuple, k: int) -> list[str]:
    """Counter discipline of a reachable configuration; empty when it holds."""
    out = []
    for sym, c in stack1:
        if c % 2 == 0 or c > 2 * k - 1:
            out.append(f"first stack entry ({render(sym)},{c})")
    for sym, c in stack2:
        if c != 1 and (c % 2 or c > 2 * k - 2):
            out.append(f"second stack entry ({render(sym)},{c})")
    return out


def balance_violations(steps: Sequence) -> list[str]:
    """Stack-size bookkeeping along a computation of ``(transition, config)`` steps."""
    delta = {PUSH: 2, POP: -2, MOVE: 0, RETURN: 0, KEEP: 0}
    out = []
    for (_, before), (t, after) in zip(steps, steps[1:]):
        s = lambda c: len(c[2][0]) + len(c[2][1])
        if s(after) - s(before) != delta[t.op]:
            out.append(f"{t.op} changed the total stack size by {s(after) - s(before)}")
    return out


# -- text format ------------------------------------------------------------------------------------

_STATE = re.compile(r"^state\s+(\S+)((?:\s+(?:init|final))*)$")
_TRANS = re.compile(r"^trans\s+(\S+)\s+(\S+)\s+(PUSH|MOVE|RETURN|POP|KEEP)((?:\s+[^\s\[\]|]+)*?)"
                    r"(?:\s+obs\s+\[([^\]|]*)\|([^\]|]*)\])?\s+->\s+(\S+)$")


def _parse_machine(text: str, generalized: bool) -> Machine:
    states: list = []
    initial = None
    finals: set = set()
    arities: dict = {}
    syms: list = []
    rank = None
    alphabet = None
    transitions = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "rank" and len(parts) == 2:
                rank = int(parts[1])
            elif parts[0] == "alphabet":
                alphabet = parts[1:]
            elif parts[0] == "sym" and len(parts) == 4 and parts[2] == "arity" and not generalized:
                arities[parts[1]] = int(parts[3])
            elif parts[0] == "sym" and len(parts) == 2 and generalized:
                syms.append(parts[1])
            elif m := _STATE.match(line):
                name, flags = m.group(1), m.group(2).split()
                if name not in states:
                    states.append(name)
                if "init" in flags:
                    initial = name
                if "final" in flags:
                    finals.add(name)
            elif m := _TRANS.match(line):
                src, sym, op, args, obs1, obs2, dst = m.groups()
                args = args.split()
                want = 0 if op == KEEP else (2 if generalized else 1)
                if len(args) != want:
                    raise MachineFormatError(f"{op} takes {want} stack symbol(s)")
                if obs1 is not None and not generalized:
                    raise MachineFormatError("only generalized machines observe the stacks")
                first = args[0] if args else None
                second = args[-1] if args else None
                for q in (src, dst):
                    if q not in states:
                        states.append(q)
                transitions.append(StackTransition(src, None if sym == "_" else sym, op, first, second, dst,
                                                   tuple((obs1 or "").split()), tuple((obs2 or "").split())))
            else:
                raise MachineFormatError(f"cannot read {line!r}")
        except (ValueError, MachineError) as exc:
            raise MachineFormatError(f"line {lineno}: {exc}") from None
    if initial is None:
        raise MachineFormatError("no initial state declared")
    if alphabet is None:
        alphabet = sorted({t.symbol for t in transitions if t.symbol is not None})
    try:
        if generalized:
            if not syms:
                syms = sorted({s for t in transitions for s in t.symbols + t.observe1 + t.observe2})
            if rank is None:
                raise MachineFormatError("generalized machines need a 'rank' line")
            return GstsaMachine(tuple(states), tuple(alphabet), tuple(syms), rank, tuple(transitions),
                                initial, finals)
        return StsaMachine(tuple(states), tuple(alphabet), tuple(arities.items()), tuple(transitions),
                           initial, finals, rank)
    except MachineError as exc:
        raise MachineFormatError(str(exc)) from None


def parse_stsa(text: str) -> StsaMachine:
    return _parse_machine(text, generalized=False)


def parse_gstsa(text: str) -> GstsaMachine:
    return _parse_machine(text, generalized=True)


def format_machine(m: Machine) -> str:
    out = [f"rank {m.rank}", "alphabet " + " ".join(m.alphabet)]
    if isinstance(m, StsaMachine):
        out += [f"sym {render(s)} arity {a}" for s, a in m.arities]
    else:
        out += [f"sym {render(s)}" for s in m.stack_alphabet]
    for q in m.states:
        flags = (" init" if q == m.initial else "") + (" final" if q in m.finals else "")
        out.append(f"state {render(q)}{flags}")
    for t in m.transitions:
        if t.op == KEEP:
            args = ""
        elif isinstance(m, StsaMachine):
            args = f" {render(t.first)}"
        else:
            args = f" {render(t.first)} {render(t.second)}"
        obs = ""
        if t.observe1 or t.observe2:
            obs = (" obs [" + " ".join(map(render, t.observe1)) + "|"
                   + " ".join(map(render, t.observe2)) + "]")
        out.append(f"trans {render(t.source)} {t.symbol or '_'} {t.op}{args}{obs} -> {render(t.target)}")
    return "\n".join(out) + "\n"

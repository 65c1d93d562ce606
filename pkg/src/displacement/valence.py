"""Valence automata over polycyclic monoids and pushdown automata with lookup."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Optional, Sequence, Union

from .monoids import (IDENTITY, PRODUCT_IDENTITY, ZERO, PolycyclicElement, ProductElement,
                      pc_reduce_word, pop, push)
from .search import Outcome, RunBudget, RunResult, layered_search

Element = Union[PolycyclicElement, ProductElement]


class MachineError(ValueError):
    pass


class MachineFormatError(MachineError):
    pass


def render(name: Hashable) -> str:
    """Text form of a state or stack symbol; tuples nest as ``<a.b>``."""
    if isinstance(name, tuple):
        return "<" + ".".join(render(x) for x in name) + ">"
    return str(name)


def fresh_name(base: str, taken: Iterable) -> str:
    taken = set(taken)
    name = base
    while name in taken:
        name += "'"
    return name


# -- valence automata ------------------------------------------------------------------

@dataclass(frozen=True)
class ValenceEdge:
    source: Hashable
    element: Element
    symbol: Optional[str]  # None reads nothing
    target: Hashable


@dataclass(frozen=True)
class ValenceAutomaton:
    states: tuple
    alphabet: tuple
    edges: tuple
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(self.finals))
        states = set(self.states)
        if self.initial not in states:
            raise MachineError(f"initial state {render(self.initial)} is not a state")
        if not self.finals <= states:
            raise MachineError("final states must be states")
        kinds = {type(e.element) for e in self.edges}
        if len(kinds) > 1:
            raise MachineError("edges mix polycyclic and product elements")
        for e in self.edges:
            if e.source not in states or e.target not in states:
                raise MachineError(f"edge endpoint outside the state set: {e}")
            if e.symbol is not None and e.symbol not in self.alphabet:
                raise MachineError(f"edge symbol {e.symbol!r} outside the alphabet")

    @property
    def identity(self) -> Element:
        if self.edges and isinstance(self.edges[0].element, ProductElement):
            return PRODUCT_IDENTITY
        return IDENTITY

    @cached_property
    def outgoing(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.source].append(e)
        return dict(out)

    @cached_property
    def max_edge_size(self) -> int:
        return max((e.element.size for e in self.edges), default=0)


def run_valence(a: ValenceAutomaton, word: Sequence[str], budget: RunBudget = RunBudget(),
                witness: bool = False, visit=None) -> RunResult:
    """Search for a path reading ``word`` into a final state whose label is the identity.

    Elements that can no longer return to the identity (zero, or a leading
    pop) are discarded; that pruning never changes the answer.
    """
    outgoing = a.outgoing

    def moves(state, memory):
        for e in outgoing.get(state, ()):
            yield e.symbol, e, e.target, memory * e.element

    default = 2 * (len(word) + 2) * max(1, a.max_edge_size)
    return layered_search(
        word, (a.initial, a.identity), moves,
        accepting=lambda q, m: q in a.finals and m.is_identity,
        height=lambda m: m.size, max_height=budget.height_for(default),
        budget=budget, dead=lambda m: m.dead, visit=visit, witness=witness)


def build_abc_valence() -> ValenceAutomaton:
    """The three-state automaton over ``S1 x S2`` for ``{a^n b^n c^n : n >= 1}``."""
    alpha, alpha_bar = push("alpha"), pop("alpha")
    beta, beta_bar = push("beta"), pop("beta")
    P = ProductElement
    edges = (
        ValenceEdge("q0", P(alpha, IDENTITY), "a", "q0"),
        ValenceEdge("q0", P(alpha_bar, beta), "b", "q1"),
        ValenceEdge("q1", P(alpha_bar, beta), "b", "q1"),
        ValenceEdge("q1", P(IDENTITY, beta_bar), "c", "q2"),
        ValenceEdge("q2", P(IDENTITY, beta_bar), "c", "q2"),
    )
    return ValenceAutomaton(("q0", "q1", "q2"), ("a", "b", "c"), edges, "q0", {"q2"})


# -- pushdown automata with lookup -------------------------------------------------------

PUSH, POP = "PUSH", "POP"


@dataclass(frozen=True)
class PdaTransition:
    source: Hashable
    symbol: Optional[str]
    observed: tuple  # top-of-stack suffix, deepest first
    op: str
    stack_symbol: Hashable
    target: Hashable

    def __post_init__(self):
        if self.op not in (PUSH, POP):
            raise MachineError(f"unknown stack operation {self.op!r}")
        if self.op == POP and self.observed and self.observed[-1] != self.stack_symbol:
            raise MachineError("POP must remove the topmost observed symbol")


@dataclass(frozen=True)
class LookupPDA:
    states: tuple
    alphabet: tuple
    stack_alphabet: tuple
    transitions: tuple
    initial: Hashable
    finals: frozenset
    depth: Optional[int] = None  # defaults to the longest observation

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(self.finals))
        longest = max((len(t.observed) for t in self.transitions), default=0)
        if self.depth is None:
            object.__setattr__(self, "depth", longest)
        elif longest > self.depth:
            raise MachineError(f"observation of length {longest} exceeds lookup depth {self.depth}")
        states, gamma = set(self.states), set(self.stack_alphabet)
        if self.initial not in states or not self.finals <= states:
            raise MachineError("initial and final states must be states")
        for t in self.transitions:
            if t.source not in states or t.target not in states:
                raise MachineError(f"transition endpoint outside the state set: {t}")
            if t.stack_symbol not in gamma or not set(t.observed) <= gamma:
                raise MachineError(f"transition uses a symbol outside the stack alphabet: {t}")
            if t.symbol is not None and t.symbol not in self.alphabet:
                raise MachineError(f"transition symbol {t.symbol!r} outside the alphabet")

    @cached_property
    def outgoing(self) -> dict:
        out = defaultdict(list)
        for t in self.transitions:
            out[t.source].append(t)
        return dict(out)


def pda_step(t: PdaTransition, stack: tuple) -> Optional[tuple]:
    """The stack after firing ``t``, or ``None`` when it cannot fire."""
    n = len(t.observed)
    if n and stack[len(stack) - n:] != t.observed:
        return None
    if t.op == PUSH:
        return stack + (t.stack_symbol,)
    if not stack or stack[-1] != t.stack_symbol:
        return None
    return stack[:-1]


def run_lookup_pda(p: LookupPDA, word: Sequence[str], budget: RunBudget = RunBudget(),
                   witness: bool = False, visit=None) -> RunResult:
    """Accept by final state and empty stack."""
    outgoing = p.outgoing

    def moves(state, stack):
        for t in outgoing.get(state, ()):
            yield t.symbol, t, t.target, pda_step(t, stack)

    default = 2 * (len(word) + 2) + p.depth
    return layered_search(
        word, (p.initial, ()), moves,
        accepting=lambda q, s: q in p.finals and not s,
        height=len, max_height=budget.height_for(default),
        budget=budget, visit=visit, witness=witness)


def eliminate_lookup_pda(p: LookupPDA) -> LookupPDA:
    """Trade lookup for state: states remember the top ``k`` stack symbols.

    Each stack entry ``(B, window)`` stores the ``k`` symbols below ``B``,
    deepest first.  Bottom markers ``Z1..Zk`` keep at least ``k`` symbols on
    the stack; a prelude pushes them one at a time and a finale removes them
    one at a time after a former final state.  The states ``("pre", i)`` and
    ``("fin", i)`` are those auxiliary steps; the distinguished initial and
    final states are ``("init",)`` and ``("final",)``.
    """
    k = p.depth
    if k == 0:
        return _blind_copy(p)
    gamma = tuple(p.stack_alphabet)
    markers = []
    for i in range(1, k + 1):
        markers.append(fresh_name(f"Z{i}", set(gamma) | set(markers)))
    markers = tuple(markers)
    gamma_ext = gamma + markers
    windows = list(_windows(gamma_ext, k))
    init, final = ("init",), ("final",)

    states: list = [init, final]
    states += [(q, w) for q in p.states for w in windows]
    transitions: list = []

    # prelude: Zi is stored above a window padded with Z1 at the deep end
    marker_entries = [(markers[i], (markers[0],) * (k - i) + markers[:i]) for i in range(k)]
    prelude = [init] + [("pre", i) for i in range(1, k)] + [(p.initial, markers)]
    for i in range(k):
        transitions.append(PdaTransition(prelude[i], None, (), PUSH, marker_entries[i], prelude[i + 1]))
    states += prelude[1:-1]

    for t in p.transitions:
        n = len(t.observed)
        for w in windows:
            if n and w[k - n:] != t.observed:
                continue
            if t.op == PUSH:
                transitions.append(PdaTransition((t.source, w), t.symbol, (), PUSH,
                                                 (t.stack_symbol, w), (t.target, w[1:] + (t.stack_symbol,))))
            elif w[-1] == t.stack_symbol:
                for below in gamma_ext:
                    old = (below,) + w[:-1]
                    transitions.append(PdaTransition((t.source, w), t.symbol, (), POP,
                                                     (t.stack_symbol, old), (t.target, old)))

    finale = [("fin", i) for i in range(k - 1, 0, -1)] + [final]
    for q in sorted(p.finals, key=render):
        transitions.append(PdaTransition((q, markers), None, (), POP, marker_entries[-1], finale[0]))
    for i in range(k - 1):
        transitions.append(PdaTransition(finale[i], None, (), POP, marker_entries[k - 2 - i], finale[i + 1]))
    states += finale[:-1]

    stack_alphabet = tuple((b, w) for b in gamma_ext for w in windows)
    return LookupPDA(tuple(states), tuple(p.alphabet), stack_alphabet, tuple(transitions),
                     init, frozenset({final}), depth=0)


def _windows(symbols: tuple, k: int):
    if k == 0:
        yield ()
        return
    for w in _windows(symbols, k - 1):
        for s in symbols:
            yield w + (s,)


def _blind_copy(p: LookupPDA) -> LookupPDA:
    # with nothing to observe, the windows are all empty
    tag = lambda x: (x, ())
    transitions = tuple(PdaTransition(tag(t.source), t.symbol, (), t.op, tag(t.stack_symbol), tag(t.target))
                        for t in p.transitions)
    return LookupPDA(tuple(map(tag, p.states)), tuple(p.alphabet), tuple(map(tag, p.stack_alphabet)),
                     transitions, tag(p.initial), frozenset(map(tag, p.finals)), depth=0)


def pda_to_valence(p: LookupPDA) -> ValenceAutomaton:
    """PUSH B becomes ``push(B)`` and POP A becomes ``pop(A)``."""
    if p.depth:
        raise MachineError(f"pushdown automaton has lookup depth {p.depth}; eliminate lookup first")
    edges = tuple(ValenceEdge(t.source, push(t.stack_symbol) if t.op == PUSH else pop(t.stack_symbol),
                              t.symbol, t.target) for t in p.transitions)
    return ValenceAutomaton(tuple(p.states), tuple(p.alphabet), edges, p.initial, p.finals)


def build_anbn_pda() -> LookupPDA:
    """``{a^n b^n : n >= 0}``; the pops on ``b`` look at the top symbol first."""
    transitions = (
        PdaTransition("q0", "a", (), PUSH, "A", "q0"),
        PdaTransition("q0", "b", ("A",), POP, "A", "q1"),
        PdaTransition("q1", "b", ("A",), POP, "A", "q1"),
    )
    return LookupPDA(("q0", "q1"), ("a", "b"), ("A",), transitions, "q0", {"q0", "q1"})


# -- text format ---------------------------------------------------------------------------

_STATE = re.compile(r"^state\s+(\S+)((?:\s+(?:init|final))*)$")
_EDGE = re.compile(r"^edge\s+(\S+)\s+(\S+)\s+(\S+)\s+->\s+(\S+)$")
_PTRANS = re.compile(r"^ptrans\s+(\S+)\s+(\S+)\s+\[([^\]]*)\]\s+(PUSH|POP)\s+(\S+)\s+->\s+(\S+)$")
_ALPHABET = re.compile(r"^(alphabet|stack)(?:\s+(.*))?$")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _symbol(tok: str) -> Optional[str]:
    return None if tok == "_" else tok


def parse_element(text: str) -> Element:
    """``push:a,pop:b`` (reduced on load), ``1``, ``0``; ``|`` separates product components."""
    if "|" in text:
        left, right = text.split("|", 1)
        if "|" in right:
            raise MachineFormatError(f"only two product components are supported: {text!r}")
        return ProductElement(_parse_polycyclic(left), _parse_polycyclic(right))
    return _parse_polycyclic(text)


def _parse_polycyclic(text: str) -> PolycyclicElement:
    if text == "1":
        return IDENTITY
    if text == "0":
        return ZERO
    gens = []
    for part in text.split(","):
        op, _, sym = part.partition(":")
        if op not in ("push", "pop") or not sym:
            raise MachineFormatError(f"bad generator {part!r}")
        gens.append((op, sym))
    return pc_reduce_word(gens)


def format_element(e: Element) -> str:
    if isinstance(e, ProductElement):
        return f"{format_element(e.first)}|{format_element(e.second)}"
    if e.zero:
        return "0"
    if e.is_identity:
        return "1"
    return ",".join([f"pop:{render(a)}" for a in e.pops] + [f"push:{render(a)}" for a in e.pushes])


@dataclass
class _Header:
    states: list = field(default_factory=list)
    initial: Optional[str] = None
    finals: set = field(default_factory=set)
    alphabet: Optional[list] = None
    stack: Optional[list] = None

    def state(self, lineno: int, m: re.Match) -> None:
        name, flags = m.group(1), m.group(2).split()
        if name not in self.states:
            self.states.append(name)
        if "init" in flags:
            if self.initial not in (None, name):
                raise MachineFormatError(f"line {lineno}: second initial state {name}")
            self.initial = name
        if "final" in flags:
            self.finals.add(name)

    def add_state(self, name: str) -> None:
        if name not in self.states:
            self.states.append(name)

    def finish(self) -> None:
        if self.initial is None:
            raise MachineFormatError("no initial state declared")


def parse_valence(text: str) -> ValenceAutomaton:
    h = _Header()
    edges = []
    for lineno, line in _lines(text):
        if m := _STATE.match(line):
            h.state(lineno, m)
        elif m := _EDGE.match(line):
            src, sym, elem, dst = m.groups()
            h.add_state(src)
            h.add_state(dst)
            edges.append(ValenceEdge(src, parse_element(elem), _symbol(sym), dst))
        elif m := _ALPHABET.match(line):
            if m.group(1) == "alphabet":
                h.alphabet = (m.group(2) or "").split()
        else:
            raise MachineFormatError(f"line {lineno}: cannot read {line!r}")
    h.finish()
    alphabet = h.alphabet or sorted({e.symbol for e in edges if e.symbol is not None})
    try:
        return ValenceAutomaton(tuple(h.states), tuple(alphabet), tuple(edges), h.initial, h.finals)
    except MachineError as exc:
        raise MachineFormatError(str(exc)) from None


def format_valence(a: ValenceAutomaton) -> str:
    out = [f"alphabet {' '.join(a.alphabet)}"]
    for q in a.states:
        flags = (" init" if q == a.initial else "") + (" final" if q in a.finals else "")
        out.append(f"state {render(q)}{flags}")
    for e in a.edges:
        out.append(f"edge {render(e.source)} {e.symbol or '_'} {format_element(e.element)} -> {render(e.target)}")
    return "\n".join(out) + "\n"


def parse_pda(text: str) -> LookupPDA:
    h = _Header()
    transitions = []
    for lineno, line in _lines(text):
        if m := _STATE.match(line):
            h.state(lineno, m)
        elif m := _PTRANS.match(line):
            src, sym, obs, op, stack_sym, dst = m.groups()
            h.add_state(src)
            h.add_state(dst)
            observed = tuple(obs.split())
            try:
                transitions.append(PdaTransition(src, _symbol(sym), observed, op, stack_sym, dst))
            except MachineError as exc:
                raise MachineFormatError(f"line {lineno}: {exc}") from None
        elif m := _ALPHABET.match(line):
            setattr(h, m.group(1), (m.group(2) or "").split())
        else:
            raise MachineFormatError(f"line {lineno}: cannot read {line!r}")
    h.finish()
    alphabet = h.alphabet or sorted({t.symbol for t in transitions if t.symbol is not None})
    stack = h.stack or sorted({t.stack_symbol for t in transitions}
                              | {a for t in transitions for a in t.observed})
    try:
        return LookupPDA(tuple(h.states), tuple(alphabet), tuple(stack), tuple(transitions),
                         h.initial, h.finals)
    except MachineError as exc:
        raise MachineFormatError(str(exc)) from None


def format_pda(p: LookupPDA) -> str:
    out = [f"alphabet {' '.join(p.alphabet)}", f"stack {' '.join(render(s) for s in p.stack_alphabet)}"]
    for q in p.states:
        flags = (" init" if q == p.initial else "") + (" final" if q in p.finals else "")
        out.append(f"state {render(q)}{flags}")
    for t in p.transitions:
        obs = " ".join(render(s) for s in t.observed)
        out.append(f"ptrans {render(t.source)} {t.symbol or '_'} [{obs}] {t.op} "
                   f"{render(t.stack_symbol)} -> {render(t.target)}")
    return "\n".join(out) + "\n"

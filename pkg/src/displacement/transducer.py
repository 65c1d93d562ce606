"""Finite transducers with word-pair edges and their application to languages."""
from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .brackets import RankedAlphabet
from .monoids import ProductElement, generator_element, phi1, phi2
from .valence import MachineError, MachineFormatError, ValenceAutomaton, ValenceEdge, render


class TransducerError(ValueError):
    pass


@dataclass(frozen=True)
class TransducerEdge:
    source: Hashable
    input: tuple
    output: tuple
    target: Hashable


@dataclass(frozen=True)
class FiniteTransducer:
    states: tuple
    input_alphabet: tuple
    output_alphabet: tuple
    edges: tuple
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(self.finals))
        states = set(self.states)
        if self.initial not in states or not self.finals <= states:
            raise MachineError("initial and final states must be states")
        ins, outs = set(self.input_alphabet), set(self.output_alphabet)
        for e in self.edges:
            if e.source not in states or e.target not in states:
                raise MachineError(f"edge endpoint outside the state set: {e}")
            if not set(e.input) <= ins or not set(e.output) <= outs:
                raise MachineError(f"edge label outside the alphabets: {e}")

    @cached_property
    def letter_edges(self) -> dict:
        """Edges split so each reads at most one letter and writes at most one.

        Returns ``{state: [(input or None, output or None, target), ...]}``;
        intermediate states are ``("mid", edge number, step)``.
        """
        out = defaultdict(list)
        for n, e in enumerate(self.edges):
            steps = [(a, None) for a in e.input] + [(None, b) for b in e.output]
            if len(e.input) and len(e.output):
                # read the last input letter and write the first output letter together
                steps = [(a, None) for a in e.input[:-1]] + [(e.input[-1], e.output[0])] \
                        + [(None, b) for b in e.output[1:]]
            if not steps:
                steps = [(None, None)]
            src = e.source
            for i, (a, b) in enumerate(steps):
                dst = e.target if i == len(steps) - 1 else ("mid", n, i)
                out[src].append((a, b, dst))
                src = dst
        return dict(out)

    @cached_property
    def all_states(self) -> list:
        seen = list(self.states)
        known = set(seen)
        for src, outs in self.letter_edges.items():
            for _, _, dst in outs:
                for q in (src, dst):
                    if q not in known:
                        known.add(q)
                        seen.append(q)
        return seen


def _silent_output_cycle(t: FiniteTransducer) -> bool:
    """Whether some cycle reads nothing but writes something."""
    graph = defaultdict(list)
    for src, outs in t.letter_edges.items():
        for a, b, dst in outs:
            if a is None:
                graph[src].append((dst, b is not None))
    # a writing edge inside a strongly connected component of the silent graph
    index, low, on, stack, comp = {}, {}, set(), [], {}
    counter = [0]

    def strong(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w, _ in graph[v]:
            if w not in index:
                strong(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            while True:
                w = stack.pop()
                on.discard(w)
                comp[w] = v
                if w == v:
                    break

    for v in list(graph):
        if v not in index:
            strong(v)
    return any(writes and comp.get(src) == comp.get(dst) for src in graph for dst, writes in graph[src])


def apply_to_word(t: FiniteTransducer, u: Sequence, cap: int) -> tuple[set, bool]:
    """All outputs of length at most ``cap`` for input ``u``, and a truncation flag."""
    u = tuple(u)
    edges = t.letter_edges
    start = (t.initial, 0, ())
    seen = {start}
    queue = deque([start])
    results: set = set()
    truncated = False
    while queue:
        state, pos, out = queue.popleft()
        if pos == len(u) and state in t.finals:
            results.add(out)
        for a, b, dst in edges.get(state, ()):
            if a is not None and (pos == len(u) or u[pos] != a):
                continue
            nout = out if b is None else out + (b,)
            if len(nout) > cap:
                truncated = True
                continue
            nxt = (dst, pos + (a is not None), nout)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return results, truncated


def image_up_to(t: FiniteTransducer, source: Iterable[Sequence], max_out_len: int) -> set:
    """``{v : |v| <= max_out_len, (u, v) in T for some u in source}``.

    Raises :class:`TransducerError` when a cycle writes output without
    reading input, since the image is then infinite on single inputs.
    """
    if _silent_output_cycle(t):
        raise TransducerError("transducer has a cycle that writes output without reading input")
    image: set = set()
    for u in source:
        outs, _ = apply_to_word(t, u, max_out_len)
        image |= outs
    return image


def dyck_generator_map(x: RankedAlphabet) -> dict:
    """Image of each multibracket letter in ``P(A) x P(A)``, keyed by its text form."""
    out = {}
    for letter in x.letters():
        out[str(letter)] = ProductElement(generator_element(phi1(letter, x)),
                                          generator_element(phi2(letter, x)))
    return out


def compose_with_monoid(t: FiniteTransducer, elements: Mapping[str, object]) -> ValenceAutomaton:
    """Valence automaton reading the outputs of ``t`` while multiplying input images.

    Its language is the image under ``t`` of the identity language described
    by ``elements`` (input letter to monoid element).
    """
    edges = []
    unit = next(iter(elements.values()))
    identity = ProductElement() if isinstance(unit, ProductElement) else type(unit)()
    for src, outs in t.letter_edges.items():
        for a, b, dst in outs:
            elem = identity if a is None else elements[a]
            edges.append(ValenceEdge(src, elem, b, dst))
    return ValenceAutomaton(tuple(t.all_states), tuple(t.output_alphabet), tuple(edges),
                            t.initial, t.finals)


def relabel_transducer(mapping: Mapping[str, str]) -> FiniteTransducer:
    """One-state transducer replacing each input letter by a word."""
    edges = tuple(TransducerEdge("p", (a,), tuple(b), "p") for a, b in mapping.items())
    outs = sorted({c for b in mapping.values() for c in b})
    return FiniteTransducer(("p",), tuple(mapping), tuple(outs), edges, "p", {"p"})


def identity_transducer(alphabet: Iterable[str]) -> FiniteTransducer:
    alphabet = tuple(alphabet)
    edges = tuple(TransducerEdge("p", (a,), (a,), "p") for a in alphabet)
    return FiniteTransducer(("p",), alphabet, alphabet, edges, "p", {"p"})


# -- text format ---------------------------------------------------------------------------------

_TSTATE = re.compile(r"^tstate\s+(\S+)((?:\s+(?:init|final))*)$")
_TEDGE = re.compile(r'^tedge\s+(\S+)\s+"([^"]*)"\s*/\s*"([^"]*)"\s+->\s+(\S+)$')
_BRACKET = re.compile(r"^[^\s^'|]+[\^']\d+$")


def _word(text: str, alphabet: Optional[set]) -> tuple:
    out: list = []
    for tok in text.split():
        if (alphabet and tok in alphabet) or _BRACKET.match(tok):
            out.append(tok)
        else:
            out.extend(tok)
    return tuple(out)


def parse_transducer(text: str) -> FiniteTransducer:
    states: list = []
    initial = None
    finals: set = set()
    ins = outs = None
    raw_edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _TSTATE.match(line):
            name, flags = m.group(1), m.group(2).split()
            if name not in states:
                states.append(name)
            if "init" in flags:
                initial = name
            if "final" in flags:
                finals.add(name)
        elif m := _TEDGE.match(line):
            raw_edges.append(m.groups())
        elif line.split()[0] in ("input", "output"):
            parts = line.split()
            if parts[0] == "input":
                ins = parts[1:]
            else:
                outs = parts[1:]
        else:
            raise MachineFormatError(f"line {lineno}: cannot read {line!r}")
    if initial is None:
        raise MachineFormatError("no initial state declared")
    edges = []
    for src, u, v, dst in raw_edges:
        for q in (src, dst):
            if q not in states:
                states.append(q)
        edges.append(TransducerEdge(src, _word(u, set(ins or ())), _word(v, set(outs or ())), dst))
    ins = ins if ins is not None else sorted({a for e in edges for a in e.input})
    outs = outs if outs is not None else sorted({b for e in edges for b in e.output})
    try:
        return FiniteTransducer(tuple(states), tuple(ins), tuple(outs), tuple(edges), initial, finals)
    except MachineError as exc:
        raise MachineFormatError(str(exc)) from None


def format_transducer(t: FiniteTransducer) -> str:
    out = ["input " + " ".join(t.input_alphabet), "output " + " ".join(t.output_alphabet)]
    for q in t.states:
        flags = (" init" if q == t.initial else "") + (" final" if q in t.finals else "")
        out.append(f"tstate {render(q)}{flags}")
    for e in t.edges:
        out.append(f'tedge {render(e.source)} "{" ".join(e.input)}" / "{" ".join(e.output)}" -> {render(e.target)}')
    return "\n".join(out) + "\n"

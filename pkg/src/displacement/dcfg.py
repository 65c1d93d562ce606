"""Displacement context-free grammars.

Recognition is a weighted deduction over tuples of substring spans: every
item ``(symbol, spans)`` says that the symbol derives the word
``w[i0:j0] 1 w[i1:j1] 1 ... 1 w[ir:jr]``.  Items are finalized cheapest
first (cost = number of rule applications), so the first derivation found
for the goal is also a shortest one.

:func:`enumerate_language` is an independent bottom-up evaluator used as an
oracle; it never looks at an input word.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Mapping, Optional, Sequence, Union

from .brackets import BracketLetter, RankedAlphabet
from .terms import (
    SEP,
    Concat,
    Intercal,
    Literal,
    Nonterminal,
    Separator,
    Term,
    Word,
    check_term,
    concat,
    eval_ground,
    format_word,
    letters,
    nonterminals_of,
    parse_term,
    parse_word,
    rank,
    split_word,
    substitute,
    term_rank,
)


class GrammarError(ValueError):
    pass


class InvalidGrammar(GrammarError):
    pass


class ForeignSymbol(GrammarError):
    pass


class DerivationBudgetExhausted(GrammarError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Grammar:
    k: int
    alphabet: tuple
    nonterminals: tuple  # ((name, rank), ...)
    rules: tuple
    start: str

    @staticmethod
    def make(k: int, alphabet: Iterable[str], nonterminals: Mapping[str, int],
             rules: Iterable, start: str) -> "Grammar":
        rules = tuple(r if isinstance(r, Rule) else Rule(*r) for r in rules)
        return Grammar(k, tuple(sorted(set(alphabet))), tuple(nonterminals.items()),
                       rules, start)

    @cached_property
    def ranks(self) -> dict:
        return dict(self.nonterminals)

    @cached_property
    def _parser(self) -> "_ChartParser":
        problems = validate_grammar(self)
        if problems:
            raise InvalidGrammar("; ".join(problems))
        return _ChartParser(self)


def validate_grammar(g: Grammar) -> list[str]:
    problems = []
    ranks = g.ranks
    if g.start not in ranks:
        problems.append(f"start symbol {g.start} is not a nonterminal")
    elif ranks[g.start] != 0:
        problems.append(f"start rank: {g.start} has rank {ranks[g.start]}, expected 0")
    for name, r in ranks.items():
        if not 0 <= r <= g.k:
            problems.append(f"nonterminal {name} has rank {r} outside 0..{g.k}")
    clash = set(ranks) & set(g.alphabet)
    if clash:
        problems.append(f"symbols both terminal and nonterminal: {sorted(clash)}")
    alphabet = set(g.alphabet)
    for n, rule in enumerate(g.rules):
        if rule.lhs not in ranks:
            problems.append(f"rule {n}: unknown left-hand side {rule.lhs}")
            continue
        issues = check_term(rule.rhs, g.k, ranks)
        problems.extend(f"rule {n}: {msg}" for msg in issues)
        if not issues and term_rank(rule.rhs, ranks) != ranks[rule.lhs]:
            problems.append(f"rule {n}: rank mismatch, {rule.lhs} has rank {ranks[rule.lhs]} "
                            f"but the right-hand side has rank {term_rank(rule.rhs, ranks)}")
        for word in _literals(rule.rhs):
            foreign = {x for x in word if x is not SEP and x not in alphabet}
            if foreign:
                problems.append(f"rule {n}: letters {sorted(foreign)} not in the alphabet")
    return problems


def _literals(t: Term):
    if isinstance(t, Literal):
        yield t.word
    elif isinstance(t, (Concat, Intercal)):
        yield from _literals(t.left)
        yield from _literals(t.right)


def as_word(w: Union[str, Sequence]) -> tuple:
    """Words may be given as tuples, as strings of one-character letters, or as
    whitespace-separated tokens."""
    if isinstance(w, str):
        return tuple(w.split()) if any(c.isspace() for c in w) else tuple(w)
    return tuple(str(x) if isinstance(x, BracketLetter) else x for x in w)


# -- recognition -----------------------------------------------------------------

def recognize(g: Grammar, w) -> bool:
    return g._parser.recognize(as_word(w))


@dataclass(frozen=True)
class DerivationNode:
    rule: int
    children: tuple

    def steps(self) -> list[int]:
        out = [self.rule]
        for c in self.children:
            out.extend(c.steps())
        return out


@dataclass(frozen=True)
class Derivation:
    """A derivation tree with its rule sequence (pre-order) and ground term."""

    tree: DerivationNode
    steps: tuple
    term: Term
    value: Word


def derive(g: Grammar, w, max_steps: int = 10_000) -> Optional[Derivation]:
    """Shortest derivation of ``w`` or ``None`` when ``w`` is not in the language.

    Raises :class:`DerivationBudgetExhausted` when a derivation exists but needs
    more than ``max_steps`` rule applications.
    """
    parser = g._parser
    word = as_word(w)
    tree = parser.derivation(word)
    if tree is None:
        return None
    steps = tuple(tree.steps())
    if len(steps) > max_steps:
        raise DerivationBudgetExhausted(
            f"shortest derivation uses {len(steps)} steps, budget is {max_steps}")
    term = ground_term(g, tree)
    return Derivation(tree, steps, term, eval_ground(term))


def ground_term(g: Grammar, node: DerivationNode) -> Term:
    rhs = g.rules[node.rule].rhs
    return substitute(rhs, [ground_term(g, c) for c in node.children])


class _ChartParser:
    def __init__(self, g: Grammar):
        self.g = g
        self.alphabet = set(g.alphabet)
        self.literals: list[tuple[int, tuple]] = []  # (node id, segments)
        self.nodes: dict[int, tuple] = {}            # id -> (kind, j)
        self.consumers: dict = {}                    # symbol -> [(node id, side)]
        self.unary: dict = {}                        # symbol -> [(lhs, rule index)]
        self._next = 0
        for n, rule in enumerate(g.rules):
            root = self._compile(rule.rhs)
            self.unary.setdefault(root, []).append((rule.lhs, n))
        self.hull = _ParikhHull(g)

    def _compile(self, t: Term):
        if isinstance(t, Nonterminal):
            return t.name
        node = self._next
        self._next += 1
        if isinstance(t, (Literal, Separator)):
            word = t.word if isinstance(t, Literal) else (SEP,)
            self.literals.append((node, tuple(split_word(word))))
            return node
        left = self._compile(t.left)
        right = self._compile(t.right)
        self.nodes[node] = ("cat", 0) if isinstance(t, Concat) else ("ic", t.j)
        self.consumers.setdefault(left, []).append((node, 0))
        self.consumers.setdefault(right, []).append((node, 1))
        return node

    def _check(self, word: tuple) -> None:
        for x in word:
            if x not in self.alphabet:
                raise ForeignSymbol(f"symbol {x!r} is not in the alphabet")

    def recognize(self, word: tuple) -> bool:
        self._check(word)
        if not self.hull.admits(word):
            return False
        return self._run(word, want_tree=False) is not None

    def derivation(self, word: tuple) -> Optional[DerivationNode]:
        self._check(word)
        if not self.hull.admits(word):
            return None
        return self._run(word, want_tree=True)

    def _run(self, word: tuple, want_tree: bool):
        n = len(word)
        goal = (self.g.start, ((0, n),))
        heap: list = []
        tick = 0
        for node, segments in self.literals:
            for spans in _placements(word, segments, 0, 0):
                heap.append((0, tick, (node, spans), ("lit",)))
                tick += 1
        heapq.heapify(heap)
        done: dict = {}
        index: dict = {}  # (node id, side, key) -> [spans]
        nodes, consumers, unary = self.nodes, self.consumers, self.unary
        while heap:
            cost, _, item, back = heapq.heappop(heap)
            if item in done:
                continue
            done[item] = (cost, back)
            if item == goal:
                return self._tree(goal, done) if want_tree else True
            sym, spans = item
            for lhs, rule in unary.get(sym, ()):
                new = (lhs, spans)
                if new not in done:
                    heapq.heappush(heap, (cost + 1, tick, new, ("rule", rule, item)))
                    tick += 1
            for node, side in consumers.get(sym, ()):
                kind, j = nodes[node]
                if kind == "cat":
                    key = spans[-1][1] if side == 0 else spans[0][0]
                else:
                    if side == 0:
                        if len(spans) <= j:
                            continue
                        key = (spans[j - 1][1], spans[j][0])
                    else:
                        key = (spans[0][0], spans[-1][1])
                index.setdefault((node, side, key), []).append((spans, item))
                for other, other_item in index.get((node, 1 - side, key), ()):
                    left, right = (spans, other) if side == 0 else (other, spans)
                    if kind == "cat":
                        out = left[:-1] + ((left[-1][0], right[0][1]),) + right[1:]
                    elif len(right) == 1:
                        out = left[:j - 1] + ((left[j - 1][0], left[j][1]),) + left[j + 1:]
                    else:
                        out = (left[:j - 1] + ((left[j - 1][0], right[0][1]),) + right[1:-1]
                               + ((right[-1][0], left[j][1]),) + left[j + 1:])
                    new = (node, out)
                    if new not in done:
                        pair = (item, other_item) if side == 0 else (other_item, item)
                        heapq.heappush(heap, (cost + done[other_item][0], tick, new,
                                              ("bin",) + pair))
                        tick += 1
        return None

    def _tree(self, item, done) -> DerivationNode:
        _, back = done[item]
        assert back[0] == "rule"
        return DerivationNode(back[1], tuple(self._collect(back[2], done)))

    def _collect(self, item, done) -> list:
        if isinstance(item[0], str):
            return [self._tree(item, done)]
        back = done[item][1]
        if back[0] == "lit":
            return []
        return self._collect(back[1], done) + self._collect(back[2], done)


def _placements(word: tuple, segments: tuple, t: int, start: int):
    """All span tuples placing ``segments[t:]`` in order at or after ``start``."""
    seg = segments[t]
    m = len(seg)
    last = t == len(segments) - 1
    for i in range(start, len(word) - m + 1):
        if word[i:i + m] == seg:
            if last:
                yield ((i, i + m),)
            else:
                for rest in _placements(word, segments, t + 1, i + m):
                    yield ((i, i + m),) + rest


class _ParikhHull:
    """Affine hull of the letter-count vectors of the language.

    Words whose letter counts fall outside it cannot be derived, so the chart
    is never built for them.  The hull is computed per nonterminal by a
    fixpoint over the rules (both operations add letter counts).
    """

    def __init__(self, g: Grammar):
        self.letters = list(g.alphabet)
        self.pos = {x: i for i, x in enumerate(self.letters)}
        dim = len(self.letters)
        hulls: dict = {name: None for name in g.ranks}
        changed = True
        while changed:
            changed = False
            for rule in g.rules:
                h = self._term_hull(rule.rhs, hulls, dim)
                if h is None:
                    continue
                old = hulls[rule.lhs]
                new = h if old is None else _join(old, h)
                if old is None or len(new[1]) > len(old[1]):
                    hulls[rule.lhs] = new
                    changed = True
        h = hulls.get(g.start)
        self.empty = h is None
        if not self.empty:
            point, basis = h
            self.constraints = _orthogonal(basis, dim)
            self.targets = [sum(c[i] * point[i] for i in range(dim)) for c in self.constraints]

    def _term_hull(self, t: Term, hulls: dict, dim: int):
        if isinstance(t, Nonterminal):
            return hulls[t.name]
        if isinstance(t, (Literal, Separator)):
            vec = [Fraction(0)] * dim
            if isinstance(t, Literal):
                for x in t.word:
                    if x is not SEP:
                        vec[self.pos[x]] += 1
            return (tuple(vec), [])
        a = self._term_hull(t.left, hulls, dim)
        b = self._term_hull(t.right, hulls, dim)
        if a is None or b is None:
            return None
        point = tuple(x + y for x, y in zip(a[0], b[0]))
        return (point, _span(a[1] + b[1]))

    def admits(self, word: tuple) -> bool:
        if self.empty:
            return False
        if not self.constraints:
            return True
        counts = [0] * len(self.letters)
        pos = self.pos
        for x in word:
            counts[pos[x]] += 1
        for c, target in zip(self.constraints, self.targets):
            if sum(ci * ni for ci, ni in zip(c, counts)) != target:
                return False
        return True


def _join(a, b):
    diff = [y - x for x, y in zip(a[0], b[0])]
    return (a[0], _span(a[1] + b[1] + [diff]))


def _span(vectors: list) -> list:
    """Reduced row echelon basis of the span of ``vectors``."""
    rows = [list(map(Fraction, v)) for v in vectors]
    basis: list = []
    pivots: list = []
    for v in rows:
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            continue
        v = [x / v[p] for x in v]
        for idx, b in enumerate(basis):
            if b[p]:
                f = b[p]
                basis[idx] = [x - f * y for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(p)
    return basis


def _orthogonal(basis: list, dim: int) -> list:
    """Integer vectors spanning the orthogonal complement of an RREF basis."""
    pivots = {next(i for i, x in enumerate(b) if x): b for b in basis}
    out = []
    for free in range(dim):
        if free in pivots:
            continue
        v = [Fraction(0)] * dim
        v[free] = Fraction(1)
        for p, b in pivots.items():
            v[p] = -b[free]
        scale = lcm(*(x.denominator for x in v))
        out.append([int(x * scale) for x in v])
    return out


# -- bounded enumeration --------------------------------------------------------------

def enumerate_language(g: Grammar, max_len: int) -> set:
    """All words of ``L(g)`` with at most ``max_len`` letters."""
    problems = validate_grammar(g)
    if problems:
        raise InvalidGrammar("; ".join(problems))
    minimal = _minimal_yields(g)
    rules = []
    for rule in g.rules:
        counter = iter(range(10**9))
        rules.append((rule.lhs, _prepare(rule.rhs, counter, minimal)))
    empty: dict = {}
    old = {name: {} for name in g.ranks}
    delta = {name: {} for name in g.ranks}

    def unseen(words: dict, exclude: dict) -> dict:
        fresh: dict = {}
        for n, ws in words.items():
            known = exclude.get(n, ())
            for w in ws:
                if w not in known:
                    fresh.setdefault(n, set()).add(w)
        return fresh

    # first round: every rule against empty sets (only nonterminal-free rules fire)
    first = True
    while first or any(delta.values()):
        new: dict = {name: {} for name in g.ranks}
        for lhs, tree in rules:
            occurrences = tree[-1]
            if first:
                if occurrences:
                    continue
                choices = [lambda i, name: empty]
            else:
                choices = [_chooser(i, old, delta) for i in range(occurrences)]
            for choose in choices:
                for n, ws in _eval(tree, max_len, choose).items():
                    new[lhs].setdefault(n, set()).update(ws)
        first = False
        for name in g.ranks:
            full = {n: set(old[name].get(n, ())) | set(delta[name].get(n, ()))
                    for n in set(old[name]) | set(delta[name])}
            fresh = unseen(new[name], full)
            old[name] = full
            delta[name] = fresh
    result = set()
    for n, ws in old[g.start].items():
        result.update(w for w in ws if not any(x is SEP for x in w))
    return result


def _chooser(i: int, old: dict, delta: dict):
    def choose(occ: int, name: str) -> dict:
        if occ < i:
            return old[name]
        if occ == i:
            return delta[name]
        merged = {n: set(ws) for n, ws in old[name].items()}
        for n, ws in delta[name].items():
            merged.setdefault(n, set()).update(ws)
        return merged
    return choose


def _prepare(t: Term, counter, minimal: dict):
    """Turn a term into nested tuples carrying minimal yields and leaf numbers.

    The last entry of the root tuple is the number of nonterminal leaves.
    """
    def go(t):
        if isinstance(t, Nonterminal):
            return ("nt", minimal.get(t.name, 0), t.name, next(counter))
        if isinstance(t, (Literal, Separator)):
            word = t.word if isinstance(t, Literal) else (SEP,)
            return ("lit", letters(word), word)
        left, right = go(t.left), go(t.right)
        j = t.j if isinstance(t, Intercal) else 0
        return ("ic" if j else "cat", left[1] + right[1], j, left, right)

    tree = go(t)
    return tree + (len(nonterminals_of(t)),)


def _eval(node, cap: int, choose) -> dict:
    kind = node[0]
    if kind == "lit":
        return {node[1]: {node[2]}} if node[1] <= cap else {}
    if kind == "nt":
        src = choose(node[3], node[2])
        return {n: ws for n, ws in src.items() if n <= cap}
    _, _, j, left, right = node[:5]
    lw = _eval(left, cap - right[1], choose)
    if not lw:
        return {}
    rw = _eval(right, cap - left[1], choose)
    out: dict = {}
    for n1, ws1 in lw.items():
        for n2, ws2 in rw.items():
            if n1 + n2 > cap:
                continue
            bucket = out.setdefault(n1 + n2, set())
            if kind == "cat":
                for a in ws1:
                    for b in ws2:
                        bucket.add(a + b)
            else:
                for a in ws1:
                    cut = _separator_position(a, j)
                    if cut is None:
                        continue
                    head, tail = a[:cut], a[cut + 1:]
                    for b in ws2:
                        bucket.add(head + b + tail)
    return {n: ws for n, ws in out.items() if ws}


def _separator_position(word: tuple, j: int) -> Optional[int]:
    seen = 0
    for pos, x in enumerate(word):
        if x is SEP:
            seen += 1
            if seen == j:
                return pos
    return None


def _minimal_yields(g: Grammar) -> dict:
    best: dict = {}

    def size(t: Term) -> Optional[int]:
        if isinstance(t, Nonterminal):
            return best.get(t.name)
        if isinstance(t, (Literal, Separator)):
            return letters(t.word) if isinstance(t, Literal) else 0
        a, b = size(t.left), size(t.right)
        return None if a is None or b is None else a + b

    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            s = size(rule.rhs)
            if s is not None and s < best.get(rule.lhs, s + 1):
                best[rule.lhs] = s
                changed = True
    return best


def minimal_yields(g: Grammar) -> dict:
    """Fewest letters derivable from each productive nonterminal."""
    return _minimal_yields(g)


# -- grammar families ---------------------------------------------------------------

def build_copy_power_grammar(i: int) -> Grammar:
    """The ``i``-DCFG generating ``{w^(i+1) : w in {a,b}+}``."""
    if i < 1:
        raise ValueError("the copy grammar needs i >= 1")
    rules = []
    for x in "ab":
        body = Concat(Literal((x,)), Nonterminal("T"))
        for _ in range(i):
            body = Intercal(1, body, Literal((x,)))
        rules.append(Rule("S", body))
    for x in "ab":
        body = Concat(Literal((x,)), Nonterminal("T"))
        for j in range(1, i + 1):
            body = Intercal(j, body, Literal((SEP, x)))
        rules.append(Rule("T", body))
    rules.append(Rule("T", Literal((SEP,) * i)))
    return Grammar.make(i, "ab", {"S": 0, "T": i}, rules, "S")


def dyck_nonterminal(i: int) -> str:
    return f"S{i}"


def build_dyck_grammar(x: RankedAlphabet) -> Grammar:
    """Grammar for the correct multibracket sequences over ``x``."""
    top = x.rank
    if top < 1:
        raise ValueError("ranked alphabet must have rank >= 1")
    S = [Nonterminal(dyck_nonterminal(i)) for i in range(top)]
    rules = []
    for i in range(top):
        for j in range(top - i):
            rules.append(Rule(S[i + j].name, Concat(S[i], S[j])))
    for i in range(1, top):
        for j in range(top):
            if i + j > top:
                continue
            for l in range(1, i + 1):
                rules.append(Rule(S[i + j - 1].name, Intercal(l, S[i], S[j])))
    for sym, ar in x.arities:
        r = ar - 1
        body: Term = S[r]
        for t in range(1, r + 1):
            link = Literal((str(BracketLetter(sym, t, True)), SEP,
                            str(BracketLetter(sym, t + 1, False))))
            body = Intercal(t, body, link)
        opening = Literal((str(BracketLetter(sym, 1, False)),))
        closing = Literal((str(BracketLetter(sym, r + 1, True)),))
        rules.append(Rule(S[r].name, concat(opening, body, closing)))
    rules.append(Rule(S[0].name, Literal(())))
    if top >= 2:
        rules.append(Rule(S[1].name, Separator()))
    alphabet = [str(letter) for letter in x.letters()]
    return Grammar.make(top - 1, alphabet, {s.name: i for i, s in enumerate(S)}, rules,
                        S[0].name)


# -- file format --------------------------------------------------------------------

def parse_grammar(text: str) -> Grammar:
    k = None
    alphabet: list = []
    ranks: dict = {}
    start = None
    pending: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "k":
                k = int(rest)
            elif head == "alphabet":
                alphabet.extend(rest.split())
            elif head == "nonterm":
                name, r = rest.split()
                ranks[name] = int(r)
            elif head == "start":
                start = rest
            elif head == "rule":
                lhs, arrow, body = rest.partition("->")
                if not arrow:
                    raise GrammarError("rule needs '->'")
                pending.append((lineno, lhs.strip(), body))
            else:
                raise GrammarError(f"unknown declaration {head!r}")
        except (ValueError, GrammarError) as exc:
            raise GrammarError(f"line {lineno}: {exc}") from None
    if k is None or start is None:
        raise GrammarError("grammar needs 'k' and 'start' declarations")
    rules = []
    for lineno, lhs, body in pending:
        try:
            rules.append(Rule(lhs, parse_term(body, alphabet)))
        except ValueError as exc:
            raise GrammarError(f"line {lineno}: {exc}") from None
    return Grammar.make(k, alphabet, ranks, rules, start)


def format_grammar(g: Grammar) -> str:
    lines = [f"k {g.k}", "alphabet " + " ".join(g.alphabet)]
    lines += [f"nonterm {name} {r}" for name, r in g.nonterminals]
    lines.append(f"start {g.start}")
    lines += [f"rule {r.lhs} -> {r.rhs}" for r in g.rules]
    return "\n".join(lines) + "\n"


def format_derivation(g: Grammar, d: Derivation) -> str:
    return " ; ".join(str(g.rules[n]) for n in d.steps)

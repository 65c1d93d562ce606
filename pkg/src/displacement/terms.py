"""Separator words, the ranked term algebra and ground-term evaluation.

Words are plain tuples of symbols.  The separator is the module-level
singleton :data:`SEP`; every other entry is an alphabet symbol (a string).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union


class _Separator:
    __slots__ = ()

    def __repr__(self) -> str:
        return "1"

    def __reduce__(self):
        return "SEP"


SEP = _Separator()

Symbol = str
Word = Tuple[Union[str, _Separator], ...]


class TermError(ValueError):
    pass


class IndexOutOfRange(TermError):
    pass


class UnknownNonterminal(TermError):
    pass


class NotGround(TermError):
    pass


def rank(word: Sequence) -> int:
    return sum(1 for x in word if x is SEP)


def letters(word: Sequence) -> int:
    """Number of non-separator letters."""
    return sum(1 for x in word if x is not SEP)


def split_word(word: Sequence) -> list:
    """Split ``w0 1 w1 ... 1 wr`` into the list ``[w0, ..., wr]``."""
    parts = [[]]
    for x in word:
        if x is SEP:
            parts.append([])
        else:
            parts[-1].append(x)
    return [tuple(p) for p in parts]


def join_parts(parts: Sequence[Sequence]) -> Word:
    out: list = []
    for n, part in enumerate(parts):
        if n:
            out.append(SEP)
        out.extend(part)
    return tuple(out)


def intercalate(w: Sequence, j: int, v: Sequence) -> Word:
    """Replace the ``j``-th separator of ``w`` (1-based) by the word ``v``."""
    if j < 1:
        raise IndexOutOfRange(f"separator index must be positive, got {j}")
    seen = 0
    for pos, x in enumerate(w):
        if x is SEP:
            seen += 1
            if seen == j:
                return tuple(w[:pos]) + tuple(v) + tuple(w[pos + 1:])
    raise IndexOutOfRange(f"word of rank {seen} has no separator number {j}")


def parse_word(text: str, alphabet: Optional[Iterable[str]] = None) -> Word:
    """Read a word written with ``1`` for the separator.

    Without an alphabet every character is a letter.  With one, the text is
    tokenized greedily by longest match, so multi-character symbols such as
    ``x^1`` work; whitespace is ignored.
    """
    if alphabet is None:
        return tuple(SEP if ch == "1" else ch for ch in text if not ch.isspace())
    symbols = sorted(set(alphabet), key=len, reverse=True)
    out: list = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        for sym in symbols:
            if text.startswith(sym, pos):
                out.append(sym)
                pos += len(sym)
                break
        else:
            if text[pos] == "1":
                out.append(SEP)
                pos += 1
            else:
                raise TermError(f"cannot tokenize {text[pos:]!r}")
    return tuple(out)


def format_word(word: Sequence, sep: str = "") -> str:
    return sep.join("1" if x is SEP else str(x) for x in word)


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Nonterminal:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Literal:
    word: Word

    def __str__(self) -> str:
        spaced = any(len(x) > 1 for x in self.word if x is not SEP)
        return '"' + format_word(self.word, " " if spaced else "") + '"'


@dataclass(frozen=True)
class Separator:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Concat:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return f"({self.left} . {self.right})"


@dataclass(frozen=True)
class Intercal:
    j: int
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return f"({self.left} +{self.j} {self.right})"


Term = Union[Nonterminal, Literal, Separator, Concat, Intercal]


def lit(text: str, alphabet: Optional[Iterable[str]] = None) -> Literal:
    return Literal(parse_word(text, alphabet))


def concat(*terms: Term) -> Term:
    """Left-nested concatenation of one or more terms."""
    out = terms[0]
    for t in terms[1:]:
        out = Concat(out, t)
    return out


def term_rank(t: Term, ranks: Mapping[str, int]) -> int:
    if isinstance(t, Nonterminal):
        try:
            return ranks[t.name]
        except KeyError:
            raise UnknownNonterminal(t.name) from None
    if isinstance(t, Literal):
        return rank(t.word)
    if isinstance(t, Separator):
        return 1
    if isinstance(t, Concat):
        return term_rank(t.left, ranks) + term_rank(t.right, ranks)
    if isinstance(t, Intercal):
        return term_rank(t.left, ranks) + term_rank(t.right, ranks) - 1
    raise TermError(f"not a term: {t!r}")


def check_term(t: Term, k: int, ranks: Mapping[str, int]) -> list[str]:
    """List every violation of the rank side conditions of ``Tm_k``.

    An empty list means the term is well formed.
    """
    problems: list[str] = []

    def walk(t: Term) -> Optional[int]:
        if isinstance(t, Nonterminal):
            if t.name not in ranks:
                problems.append(f"unknown nonterminal {t.name}")
                return None
            r = ranks[t.name]
        elif isinstance(t, Literal):
            r = rank(t.word)
        elif isinstance(t, Separator):
            r = 1
        elif isinstance(t, (Concat, Intercal)):
            a, b = walk(t.left), walk(t.right)
            if a is None or b is None:
                return None
            if isinstance(t, Concat):
                if a + b > k:
                    problems.append(f"{t}: concatenation rank {a}+{b} exceeds {k}")
                r = a + b
            else:
                if not 1 <= t.j <= k:
                    problems.append(f"{t}: intercalation index {t.j} not in 1..{k}")
                if a < t.j:
                    problems.append(f"{t}: left rank {a} below index {t.j}")
                if a + b > k + 1:
                    problems.append(f"{t}: ranks {a}+{b} exceed {k + 1}")
                r = a + b - 1
        else:
            problems.append(f"not a term: {t!r}")
            return None
        if r > k:
            problems.append(f"{t}: rank {r} exceeds {k}")
        return r

    walk(t)
    return problems


def eval_ground(t: Term) -> Word:
    if isinstance(t, Nonterminal):
        raise NotGround(f"nonterminal {t.name} in ground term")
    if isinstance(t, Literal):
        return t.word
    if isinstance(t, Separator):
        return (SEP,)
    if isinstance(t, Concat):
        return eval_ground(t.left) + eval_ground(t.right)
    if isinstance(t, Intercal):
        return intercalate(eval_ground(t.left), t.j, eval_ground(t.right))
    raise TermError(f"not a term: {t!r}")


def nonterminals_of(t: Term) -> list[str]:
    """Nonterminal leaves, left to right (with repetitions)."""
    if isinstance(t, Nonterminal):
        return [t.name]
    if isinstance(t, (Concat, Intercal)):
        return nonterminals_of(t.left) + nonterminals_of(t.right)
    return []


def substitute(t: Term, values: Sequence[Term]) -> Term:
    """Replace the nonterminal leaves of ``t``, left to right, by ``values``."""
    it = iter(values)

    def go(t: Term) -> Term:
        if isinstance(t, Nonterminal):
            return next(it)
        if isinstance(t, Concat):
            return Concat(go(t.left), go(t.right))
        if isinstance(t, Intercal):
            return Intercal(t.j, go(t.left), go(t.right))
        return t

    return go(t)


# -- text syntax ---------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(?P<lit>"[^"]*")|(?P<op>\+\d+|[.()])|(?P<sep>1)|(?P<nt>[A-Z][A-Za-z0-9_]*))')


def parse_term(text: str, alphabet: Optional[Iterable[str]] = None) -> Term:
    """Parse the infix term syntax used by grammar files.

    ``"ab1"`` is a literal (``1`` inside quotes is a separator), a bare ``1``
    is the separator leaf, capitalized identifiers are nonterminals, ``.``
    and juxtaposition concatenate and ``+j`` intercalates.  Concatenation
    binds tighter; both associate to the left.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TermError(f"unexpected input at {text[pos:]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    tokens.append(("end", ""))
    alphabet = list(alphabet) if alphabet is not None else None
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def atom() -> Term:
        kind, val = take()
        if kind == "lit":
            return Literal(parse_word(val[1:-1], alphabet))
        if kind == "sep":
            return Separator()
        if kind == "nt":
            return Nonterminal(val)
        if val == "(":
            t = intercal()
            if take()[1] != ")":
                raise TermError("missing ')'")
            return t
        raise TermError(f"unexpected token {val!r}")

    def starts_atom(tok) -> bool:
        return tok[0] in ("lit", "sep", "nt") or tok[1] == "("

    def product() -> Term:
        t = atom()
        while True:
            tok = peek()
            if tok[1] == ".":
                take()
                t = Concat(t, atom())
            elif starts_atom(tok):
                t = Concat(t, atom())
            else:
                return t

    def intercal() -> Term:
        t = product()
        while peek()[1].startswith("+"):
            j = int(take()[1][1:])
            t = Intercal(j, t, product())
        return t

    result = intercal()
    if peek()[0] != "end":
        raise TermError(f"trailing input {peek()[1]!r}")
    return result

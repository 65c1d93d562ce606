"""Ranked alphabets and multibracket letters ``x^j`` / ``x'j``."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BracketLetter:
    base: str
    level: int
    barred: bool = False

    def __str__(self) -> str:
        return f"{self.base}{chr(39) if self.barred else '^'}{self.level}"


_LETTER = re.compile(r"^(?P<base>[^\s^'|]+)(?P<mark>[\^'])(?P<level>\d+)$")


@lru_cache(maxsize=None)
def parse_letter(text: str) -> BracketLetter:
    m = _LETTER.match(text)
    if not m:
        raise AlphabetError(f"not a multibracket letter: {text!r}")
    return BracketLetter(m["base"], int(m["level"]), m["mark"] == "'")


def as_letter(x: Union[str, BracketLetter]) -> BracketLetter:
    return x if isinstance(x, BracketLetter) else parse_letter(x)


@dataclass(frozen=True)
class RankedAlphabet:
    """Symbols with arities; the rank is the largest arity."""

    arities: tuple  # ((symbol, arity), ...) sorted by symbol

    def __init__(self, arities: Union[Mapping[str, int], Iterable[tuple]]):
        items = dict(arities)
        for sym, ar in items.items():
            if not isinstance(ar, int) or ar < 1:
                raise AlphabetError(f"arity of {sym!r} must be a positive integer")
            if not sym or any(c in sym for c in " ^'|\t"):
                raise AlphabetError(f"bad bracket symbol {sym!r}")
        if not items:
            raise AlphabetError("empty ranked alphabet")
        object.__setattr__(self, "arities", tuple(sorted(items.items())))

    @cached_property
    def arity_map(self) -> dict:
        return dict(self.arities)

    def __getitem__(self, sym: str) -> int:
        return self.arity_map[sym]

    def __iter__(self) -> Iterator[str]:
        return (s for s, _ in self.arities)

    @property
    def rank(self) -> int:
        return max(a for _, a in self.arities)

    def letters(self) -> list[BracketLetter]:
        """The multibracket alphabet ``B(X)`` in a fixed order."""
        out = []
        for sym, ar in self.arities:
            for j in range(1, ar + 1):
                out.append(BracketLetter(sym, j, False))
                out.append(BracketLetter(sym, j, True))
        return out

    def contains(self, letter: BracketLetter) -> bool:
        ar = self.arity_map.get(letter.base)
        return ar is not None and 1 <= letter.level <= ar

    def words(self, max_len: int) -> Iterator[tuple]:
        """All words over ``B(X)`` of length at most ``max_len``, shortest first."""
        alphabet = self.letters()
        for n in range(max_len + 1):
            yield from itertools.product(alphabet, repeat=n)


def parse_ranked_alphabet(text: str) -> RankedAlphabet:
    """Read ``bracket x 2`` lines; ``#`` starts a comment."""
    arities: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "bracket":
            raise AlphabetError(f"line {lineno}: expected 'bracket <symbol> <arity>'")
        try:
            arities[parts[1]] = int(parts[2])
        except ValueError:
            raise AlphabetError(f"line {lineno}: arity must be an integer") from None
    return RankedAlphabet(arities)


def format_ranked_alphabet(x: RankedAlphabet) -> str:
    return "".join(f"bracket {s} {a}\n" for s, a in x.arities)


def parse_bracket_word(text: str) -> tuple:
    return tuple(parse_letter(tok) for tok in text.split())


def format_bracket_word(word: Sequence) -> str:
    return " ".join(str(x) for x in word)

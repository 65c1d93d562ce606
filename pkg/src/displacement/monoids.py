"""Polycyclic monoids with zero, their products, and Dyck validators.

An element of the polycyclic monoid is a partial map on stacks.  Its normal
form is ``(pops, pushes)``: pop ``pops`` (first entry from the top), then
push ``pushes`` (last entry ends on top).  Undefined composites collapse to
:data:`ZERO`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .brackets import BracketLetter, RankedAlphabet, as_letter


class NotIdentity(ValueError):
    pass


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class PolycyclicElement:
    pops: tuple = ()
    pushes: tuple = ()
    zero: bool = False

    def __mul__(self, other: "PolycyclicElement") -> "PolycyclicElement":
        return pc_multiply(self, other)

    @property
    def is_identity(self) -> bool:
        return not self.zero and not self.pops and not self.pushes

    @property
    def is_zero(self) -> bool:
        return self.zero

    @property
    def size(self) -> int:
        return len(self.pops) + len(self.pushes)

    @property
    def dead(self) -> bool:
        """No right factor can turn this element into the identity."""
        return self.zero or bool(self.pops)

    def __str__(self) -> str:
        if self.zero:
            return "0"
        if self.is_identity:
            return "1"
        return ",".join([f"pop:{a}" for a in self.pops] + [f"push:{a}" for a in self.pushes])


ZERO = PolycyclicElement(zero=True)
IDENTITY = PolycyclicElement()


def push(a) -> PolycyclicElement:
    return PolycyclicElement((), (a,))


def pop(a) -> PolycyclicElement:
    return PolycyclicElement((a,), ())


def pc_multiply(e1: PolycyclicElement, e2: PolycyclicElement) -> PolycyclicElement:
    if e1.zero or e2.zero:
        return ZERO
    v1, u2 = e1.pushes, e2.pops
    m = min(len(v1), len(u2))
    for t in range(m):
        if v1[-1 - t] != u2[t]:
            return ZERO
    if len(v1) >= len(u2):
        return PolycyclicElement(e1.pops, v1[:len(v1) - len(u2)] + e2.pushes)
    return PolycyclicElement(e1.pops + u2[len(v1):], e2.pushes)


Generator = tuple  # ("push", symbol) or ("pop", symbol)


def generator_element(g: Generator) -> PolycyclicElement:
    op, a = g
    if op == "push":
        return push(a)
    if op == "pop":
        return pop(a)
    raise ValueError(f"unknown generator {g!r}")


def pc_reduce_word(gens: Iterable[Generator]) -> PolycyclicElement:
    """Normal form of a product of push/pop generators, by stack simulation."""
    stack: list = []
    pops: list = []
    for op, a in gens:
        if op == "push":
            stack.append(a)
        elif stack:
            if stack[-1] != a:
                return ZERO
            stack.pop()
        else:
            pops.append(a)
    return PolycyclicElement(tuple(pops), tuple(stack))


@dataclass(frozen=True)
class ProductElement:
    first: PolycyclicElement = IDENTITY
    second: PolycyclicElement = IDENTITY

    def __mul__(self, other: "ProductElement") -> "ProductElement":
        return ProductElement(pc_multiply(self.first, other.first),
                              pc_multiply(self.second, other.second))

    @property
    def is_identity(self) -> bool:
        return self.first.is_identity and self.second.is_identity

    @property
    def is_zero(self) -> bool:
        return self.first.zero or self.second.zero

    @property
    def size(self) -> int:
        return max(self.first.size, self.second.size)

    @property
    def dead(self) -> bool:
        return self.first.dead or self.second.dead

    def __str__(self) -> str:
        return f"{self.first}|{self.second}"


PRODUCT_IDENTITY = ProductElement()


# -- the homomorphisms into P(A) x P(A) -------------------------------------------------

@dataclass(frozen=True, order=True)
class ASymbol:
    base: str
    index: int

    def __str__(self) -> str:
        return f"a_{self.base},{self.index}"


def phi1(letter: Union[str, BracketLetter], x: Optional[RankedAlphabet] = None) -> Generator:
    """``x^i`` pushes ``a_{x,i}``; ``x'i`` pops it."""
    letter = as_letter(letter)
    if x is not None:
        _require(letter, x)
    return ("pop" if letter.barred else "push", ASymbol(letter.base, letter.level))


def phi2(letter: Union[str, BracketLetter], x: RankedAlphabet) -> Generator:
    """The second projection, which threads the links of one chain together.

    ``x^1`` pushes ``a_{x,1}``; for ``2 <= i <= ar(x)`` the letter ``x'(i-1)``
    pushes ``a_{x,i}`` and ``x^i`` pops it; the last closing bracket
    ``x'ar(x)`` pops ``a_{x,1}``.
    """
    letter = as_letter(letter)
    _require(letter, x)
    ar = x[letter.base]
    i = letter.level
    if not letter.barred:
        return ("push", ASymbol(letter.base, 1)) if i == 1 else ("pop", ASymbol(letter.base, i))
    if i == ar:
        return ("pop", ASymbol(letter.base, 1))
    return ("push", ASymbol(letter.base, i + 1))


def _require(letter: BracketLetter, x: RankedAlphabet) -> None:
    if not x.contains(letter):
        raise ValueError(f"{letter} is not a multibracket over {dict(x.arities)}")


@lru_cache(maxsize=64)
def _projection_table(x: RankedAlphabet) -> dict:
    table = {}
    for letter in x.letters():
        pair = (phi1(letter), phi2(letter, x))
        table[letter] = pair
        table[str(letter)] = pair
    return table


def _images(w: Sequence, x: RankedAlphabet):
    table = _projection_table(x)
    try:
        pairs = [table[a] for a in w]
    except KeyError as exc:
        raise ValueError(f"{exc.args[0]} is not a multibracket over {dict(x.arities)}") from None
    return [p[0] for p in pairs], [p[1] for p in pairs]


@lru_cache(maxsize=64)
def _letter_table(x: RankedAlphabet) -> dict:
    table = {}
    for letter in x.letters():
        table[letter] = letter
        table[str(letter)] = letter
    return table


def sx_reduce(w: Sequence, x: RankedAlphabet) -> ProductElement:
    first, second = _images(w, x)
    return ProductElement(pc_reduce_word(first), pc_reduce_word(second))


def is_dyck_by_monoid(w: Sequence, x: RankedAlphabet) -> bool:
    table = _projection_table(x)
    s1: list = []
    s2: list = []
    for a in w:
        try:
            (op1, a1), (op2, a2) = table[a]
        except KeyError:
            raise ValueError(f"{a} is not a multibracket over {dict(x.arities)}") from None
        # an unmatched pop or a mismatch can never be undone by later letters
        if op1 == "push":
            s1.append(a1)
        elif not s1 or s1.pop() != a1:
            return False
        if op2 == "push":
            s2.append(a2)
        elif not s2 or s2.pop() != a2:
            return False
    return not s1 and not s2


def contraction(gens: Sequence[Generator]) -> dict:
    """Symmetric map pairing each position with the one it cancels against.

    Raises :class:`NotIdentity` unless the generator word reduces to 1.
    """
    stack: list = []
    pairs: dict = {}
    for pos, (op, a) in enumerate(gens):
        if op == "push":
            stack.append((a, pos))
        else:
            if not stack or stack[-1][0] != a:
                raise NotIdentity(f"position {pos} does not cancel")
            _, other = stack.pop()
            pairs[pos] = other
            pairs[other] = pos
    if stack:
        raise NotIdentity("unmatched pushes remain")
    return pairs


def chain_cycles(w: Sequence, x: RankedAlphabet) -> list[tuple]:
    """Group positions into chain cycles ``i1 < j1 < ... < ir < jr``.

    Each cycle follows the first projection's contraction from ``i_t`` to
    ``j_t`` and the second projection's from ``j_t`` to ``i_(t+1)``; the
    second projection closes the cycle from ``j_r`` back to ``i_1``.
    """
    word = [as_letter(a) for a in w]
    first, second = _images(word, x)
    r1, r2 = contraction(first), contraction(second)
    seen = set()
    cycles = []
    for p in range(len(word)):
        if p in seen:
            continue
        cycle = []
        nxt = p
        while True:
            cycle.append(nxt)
            q = r1[nxt]
            cycle.append(q)
            nxt = r2[q]
            if nxt == p:
                break
            if len(cycle) > len(word):
                raise AssertionError("contraction relations do not close a cycle")
        seen.update(cycle)
        cycles.append(tuple(cycle))
    for cycle in cycles:
        _check_chain(word, cycle, x)
    return cycles


def _check_chain(word: list, cycle: tuple, x: RankedAlphabet) -> None:
    if list(cycle) != sorted(cycle):
        raise AssertionError(f"cycle {cycle} is not ascending")
    base = word[cycle[0]].base
    if len(cycle) != 2 * x[base]:
        raise AssertionError(f"cycle {cycle} has the wrong length for {base}")
    for t in range(len(cycle) // 2):
        if (word[cycle[2 * t]] != BracketLetter(base, t + 1, False)
                or word[cycle[2 * t + 1]] != BracketLetter(base, t + 1, True)):
            raise AssertionError(f"cycle {cycle} is mislabelled")


# -- brute-force partition search --------------------------------------------------------

def blocks_compatible(h: Sequence[int], g: Sequence[int]) -> bool:
    """The mutual-position condition between two chains of a partition."""
    i, j = h[0::2], h[1::2]
    i2, j2 = g[0::2], g[1::2]
    r, s = len(i), len(i2)
    if j[-1] < i2[0] or j2[-1] < i[0]:
        return True
    if any(j[l] < i2[0] and j2[-1] < i[l + 1] for l in range(r - 1)):
        return True
    if any(j2[l] < i[0] and j[-1] < i2[l + 1] for l in range(s - 1)):
        return True
    if all(any(i2[m] < i[l] and j[l] < j2[m] for m in range(s)) for l in range(r)):
        return True
    if all(any(i[l] < i2[m] and j2[m] < j[l] for l in range(r)) for m in range(s)):
        return True
    return False


def dyck_partition(w: Sequence, x: RankedAlphabet, cap: int = 12) -> Optional[list]:
    """A partition of the positions witnessing membership in D(X), or None.

    Exhaustive: the smallest free position must open a chain ``x^1``; every
    continuation ``x'1 x^2 ... x'r`` on free positions is tried, and a chain
    is kept only if it is compatible with all chains chosen so far.
    """
    if len(w) > cap:
        raise CapExceeded(f"word of length {len(w)} exceeds the brute-force cap {cap}")
    table = _letter_table(x)
    try:
        word = [table[a] for a in w]
    except KeyError as exc:
        raise ValueError(f"{exc.args[0]} is not a multibracket over {dict(x.arities)}") from None
    n = len(word)
    free = [True] * n
    blocks: list = []

    def chains(pos: int, base: str, level: int, closing: bool, acc: list):
        if level > x[base]:
            yield tuple(acc)
            return
        want = BracketLetter(base, level, closing)
        for q in range(pos, n):
            if free[q] and word[q] == want:
                acc.append(q)
                if closing:
                    yield from chains(q + 1, base, level + 1, False, acc)
                else:
                    yield from chains(q + 1, base, level, True, acc)
                acc.pop()

    def search() -> bool:
        try:
            p = free.index(True)
        except ValueError:
            return True
        first = word[p]
        if first.barred or first.level != 1:
            return False
        free[p] = False
        for chain in chains(p + 1, first.base, 1, True, [p]):
            if all(blocks_compatible(chain, b) for b in blocks):
                for q in chain[1:]:
                    free[q] = False
                blocks.append(chain)
                if search():
                    return True
                blocks.pop()
                for q in chain[1:]:
                    free[q] = True
        free[p] = True
        return False

    return list(blocks) if search() else None


def is_dyck_by_partition(w: Sequence, x: RankedAlphabet, cap: int = 12) -> bool:
    return dyck_partition(w, x, cap) is not None


def is_valid_partition(w: Sequence, x: RankedAlphabet, blocks: Iterable[Sequence[int]]) -> bool:
    """Check a proposed partition against both conditions directly."""
    word = [as_letter(a) for a in w]
    blocks = [tuple(sorted(b)) for b in blocks]
    covered = sorted(p for b in blocks for p in b)
    if covered != list(range(len(word))):
        return False
    for b in blocks:
        if len(b) % 2:
            return False
        base = word[b[0]].base
        if base not in dict(x.arities) or len(b) != 2 * x[base]:
            return False
        for t in range(len(b) // 2):
            if (word[b[2 * t]] != BracketLetter(base, t + 1, False)
                    or word[b[2 * t + 1]] != BracketLetter(base, t + 1, True)):
                return False
    for m, b in enumerate(blocks):
        for c in blocks[m + 1:]:
            if not blocks_compatible(b, c):
                return False
    return True

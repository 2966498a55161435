"""Words in the free semigroup on ``n`` generators.

A word is a plain tuple of 1-based letters, ``(1, 2, 1)`` for g1 g2 g1, and
the empty tuple is the identity g0.  Within a homogeneous degree ``k`` words
are ordered lexicographically, which is the same as reading ``letter - 1`` as
base-``n`` digits with the first letter most significant.  That rank is what
the per-degree coefficient arrays in :mod:`freehol.series` are indexed by.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Iterator, Sequence

Word = tuple[int, ...]
MultiIndex = tuple[int, ...]

EMPTY: Word = ()

#: default cap on the number of words materialized for one degree
ENUMERATION_CAP = 10**7
#: multi-index factorials are exact integers only up to this total degree
FACTORIAL_CAP = 20


class WordError(ValueError):
    """Invalid letter, position or alphabet size."""


class EnumerationCapError(OverflowError):
    """Raised instead of silently truncating a word enumeration."""


def check_word(w: Sequence[int], n: int) -> Word:
    w = tuple(int(x) for x in w)
    for x in w:
        if not 1 <= x <= n:
            raise WordError(f"letter {x} outside 1..{n}")
    return w


def concat(a: Word, b: Word) -> Word:
    return tuple(a) + tuple(b)


def reverse(a: Word) -> Word:
    return tuple(reversed(a))


def block_size(n: int, k: int, cap: int = ENUMERATION_CAP) -> int:
    size = n**k
    if size > cap:
        raise EnumerationCapError(f"{n}**{k} = {size} words exceeds cap {cap}")
    return size


def enumerate_words(n: int, k: int, cap: int = ENUMERATION_CAP) -> list[Word]:
    """All ``n**k`` words of length ``k`` in lexicographic order."""
    if n < 1 or k < 0:
        raise WordError("need n >= 1 and k >= 0")
    block_size(n, k, cap)
    return list(itertools.product(range(1, n + 1), repeat=k))


def iter_words(n: int, max_len: int) -> Iterator[Word]:
    """Words of length 0..max_len, degree by degree."""
    for k in range(max_len + 1):
        yield from itertools.product(range(1, n + 1), repeat=k)


def rank(w: Word, n: int) -> int:
    r = 0
    for x in w:
        r = r * n + (x - 1)
    return r


def unrank(r: int, n: int, k: int) -> Word:
    if not 0 <= r < n**k:
        raise WordError(f"rank {r} out of range for n={n}, k={k}")
    out = []
    for _ in range(k):
        r, x = divmod(r, n)
        out.append(x + 1)
    return tuple(reversed(out))


def insert(j: int, m: int, w: Word) -> Word:
    """Insert letter ``j`` so that it sits at position ``m`` of the result.

    ``m = 0`` prepends, ``m = len(w)`` appends; otherwise ``j`` goes between
    ``w[:m]`` and ``w[m:]``.
    """
    if not 0 <= m <= len(w):
        raise WordError(f"position {m} outside 0..{len(w)}")
    if j < 1:
        raise WordError(f"bad letter {j}")
    return tuple(w[:m]) + (j,) + tuple(w[m:])


def deletions(j: int, w: Word) -> Counter:
    """Words obtained by deleting one occurrence of ``j``, with multiplicity."""
    out: Counter = Counter()
    for pos, x in enumerate(w):
        if x == j:
            out[tuple(w[:pos]) + tuple(w[pos + 1:])] += 1
    return out


def letter_counts(w: Word, n: int) -> MultiIndex:
    counts = [0] * n
    for x in w:
        if not 1 <= x <= n:
            raise WordError(f"letter {x} outside 1..{n}")
        counts[x - 1] += 1
    return tuple(counts)


def _check_factorial(p: MultiIndex) -> None:
    if any(x < 0 for x in p):
        raise WordError(f"negative multi-index {p}")
    if sum(p) > FACTORIAL_CAP:
        raise OverflowError(f"|p| = {sum(p)} exceeds factorial cap {FACTORIAL_CAP}")


def multi_factorial(p: MultiIndex) -> int:
    """``p! = p_1! ... p_n!`` as an exact integer."""
    _check_factorial(p)
    return math.prod(math.factorial(x) for x in p)


def multinomial(p: MultiIndex) -> int:
    """``|p|! / p!``, the number of words with letter counts ``p``."""
    _check_factorial(p)
    return math.factorial(sum(p)) // multi_factorial(p)


def words_with_counts(p: MultiIndex) -> list[Word]:
    """The set of words whose letter counts equal ``p``, lexicographic.

    Generated directly as distinct permutations, so the cost is the size of
    the output rather than ``n**|p|``.
    """
    _check_factorial(p)
    n = len(p)
    out: list[Word] = []
    remaining = list(p)
    k = sum(p)
    buf: list[int] = []

    def rec() -> None:
        if len(buf) == k:
            out.append(tuple(buf))
            return
        for i in range(n):
            if remaining[i]:
                remaining[i] -= 1
                buf.append(i + 1)
                rec()
                buf.pop()
                remaining[i] += 1

    rec()
    return out


def multi_indices(n: int, k: int) -> list[MultiIndex]:
    """All multi-indices of length ``n`` with total ``k``."""
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in multi_indices(n - 1, k - first):
            out.append((first,) + rest)
    return out

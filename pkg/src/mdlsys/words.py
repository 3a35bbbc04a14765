"""Free-semigroup words, lattice multi-indices, and the abelianization map.

Conventions shared by the whole package:

* A word over the alphabet ``{1, ..., d}`` is a tuple of letters in written
  order, so ``(1, 2)`` is the word ``12``.  Concatenation of tuples matches
  multiplication of monomials and of operator products: with
  ``A^v = A[v[0]-1] @ A[v[1]-1] @ ...`` we get ``A^(v+w) = A^v @ A^w``.
* The transpose reverses the letters and ``(A^v)^* = (A*)^(transpose(v))``
  for the adjoint tuple, which is why the same tuple-of-letters encoding
  serves both sides of every gramian sandwich.
* A multi-index is a length-``d`` tuple of nonnegative integers.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial
from typing import Iterator, Optional, Sequence

from .util import ResourceLimitError, word_cap

Word = tuple[int, ...]
MultiIndex = tuple[int, ...]

EMPTY_WORD: Word = ()


def validate_word(v: Sequence[int], d: int) -> Word:
    w = tuple(int(k) for k in v)
    if any(k < 1 or k > d for k in w):
        raise ValueError(f"letters must lie in 1..{d}, got {w}")
    return w


def enumerate_words(d: int, length: int) -> list[Word]:
    """All words of the given length in lexicographic order."""
    if d < 1 or length < 0:
        raise ValueError("need d >= 1 and length >= 0")
    if d**length > word_cap():
        raise ResourceLimitError(
            f"{d}**{length} words exceed the cap {word_cap()} (MDLSYS_MAX_WORDS)"
        )
    if length == 0:
        return [EMPTY_WORD]
    return list(itertools.product(range(1, d + 1), repeat=length))


def words_up_to(d: int, depth: int) -> list[Word]:
    """All words of length <= depth, by level then lexicographic."""
    total = sum(d**k for k in range(depth + 1))
    if total > word_cap():
        raise ResourceLimitError(
            f"{total} words exceed the cap {word_cap()} (MDLSYS_MAX_WORDS)"
        )
    out: list[Word] = []
    for k in range(depth + 1):
        out.extend(enumerate_words(d, k))
    return out


def transpose(v: Word) -> Word:
    return tuple(reversed(v))


def abelianize(v: Word, d: int) -> MultiIndex:
    counts = [0] * d
    for k in v:
        counts[k - 1] += 1
    return tuple(counts)


def multinomial_weight(n: MultiIndex, max_total: Optional[int] = 40) -> Fraction:
    """|n|! / n!  as an exact rational; the size of the abelianization fiber.

    Big-integer factorials keep the value exact; the cap guards against
    accidentally huge totals and can be lifted with ``max_total=None``.
    """
    total = sum(n)
    if any(k < 0 for k in n):
        raise ValueError(f"multi-index entries must be >= 0, got {n}")
    if max_total is not None and total > max_total:
        raise ResourceLimitError(f"|n| = {total} above cap {max_total}")
    den = 1
    for k in n:
        den *= factorial(k)
    return Fraction(factorial(total), den)


def multinomial_weight_float(n: MultiIndex) -> float:
    return float(multinomial_weight(n, max_total=None))


def arveson_weight(n: MultiIndex) -> float:
    """n! / |n|!, the coefficient weight of the ball-space norm (always <= 1)."""
    return float(1 / multinomial_weight(n, max_total=None))


def left_quotient(k: int, v: Word) -> Optional[Word]:
    """v' when v = k v', otherwise None (the undefined marker)."""
    if v and v[0] == k:
        return v[1:]
    return None


def multi_indices(d: int, total: int) -> Iterator[MultiIndex]:
    """All n in Z^d_+ with |n| = total, lexicographically."""
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in multi_indices(d - 1, total - first):
            yield (first,) + rest


def multi_indices_up_to(d: int, max_total: int) -> list[MultiIndex]:
    out: list[MultiIndex] = []
    for total in range(max_total + 1):
        out.extend(multi_indices(d, total))
    return out


def unit_index(d: int, j: int) -> MultiIndex:
    """e_j (1-based j)."""
    e = [0] * d
    e[j - 1] = 1
    return tuple(e)


def fiber(n: MultiIndex) -> list[Word]:
    """All words whose abelianization is n (exhaustive; small |n| only)."""
    letters: list[int] = []
    for j, count in enumerate(n, start=1):
        letters.extend([j] * count)
    if multinomial_weight(n) > word_cap():
        raise ResourceLimitError(f"fiber of {n} exceeds the word cap")
    return sorted(set(itertools.permutations(letters)))

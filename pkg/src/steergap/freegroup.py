"""Exact word arithmetic in the free product of s copies of the order-2 group.

Generators carry 1-based labels ``1..s`` and each squares to the identity,
so a group element is a *reduced word*: a finite sequence of labels with no
two equal adjacent letters.  All arithmetic here is exact (tuples of ints),
and words are immutable value objects, safe to hash and share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CapacityError

#: Default cap on the number of words an enumeration may materialize.
DEFAULT_WORD_CAP = 2_000_000

#: Cap on the word length accepted by the counting formula.  Counts are exact
#: big integers, so this is purely a guard against absurd bignum requests.
MAX_COUNT_LENGTH = 1_000_000


class InvalidGeneratorError(ValueError):
    """A generator label lies outside the range 1..s."""


@dataclass(frozen=True)
class GroupParams:
    """Number of order-2 free factors.  The group is infinite for every s >= 2."""

    s: int

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("s must be ≥ 2")


@dataclass(frozen=True)
class Word:
    """A reduced word over the generators; the empty tuple is the identity."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.letters, self.letters[1:]):
            if a == b:
                raise ValueError(f"word {self.letters} is not reduced")
        if self.letters and min(self.letters) < 1:
            raise ValueError("generator labels are 1-based")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return word_to_str(self)


IDENTITY = Word()


def _check_letters(w: Word, params: GroupParams) -> None:
    for letter in w.letters:
        if letter > params.s:
            raise InvalidGeneratorError(
                f"generator g{letter} does not exist for s={params.s}"
            )


def multiply(u: Word, v: Word, params: GroupParams) -> Word:
    """Reduced product ``u v``; letters cancel in pairs at the junction."""
    _check_letters(u, params)
    _check_letters(v, params)
    a, b = u.letters, v.letters
    i, j = len(a), 0
    while i > 0 and j < len(b) and a[i - 1] == b[j]:
        i -= 1
        j += 1
    return Word(a[:i] + b[j:])


def inverse(u: Word) -> Word:
    """Each generator is its own inverse, so inversion reverses the letters."""
    return Word(u.letters[::-1])


def count_words(params: GroupParams, k: int) -> int:
    """Number of reduced words of length exactly k: 1, then s(s-1)^(k-1)."""
    if k < 0:
        raise ValueError("word length must be nonnegative")
    if k > MAX_COUNT_LENGTH:
        raise CapacityError(
            f"refusing to count words of length {k} (cap {MAX_COUNT_LENGTH})"
        )
    if k == 0:
        return 1
    return params.s * (params.s - 1) ** (k - 1)


def ball_size(params: GroupParams, depth: int) -> int:
    """Number of reduced words of length at most ``depth``."""
    return sum(count_words(params, k) for k in range(depth + 1))


def enumerate_words(
    params: GroupParams, depth: int, *, cap: int = DEFAULT_WORD_CAP
) -> list[Word]:
    """All reduced words of length <= depth, sorted by (length, lexicographic).

    The ordering makes each length shell a contiguous block and makes the
    depth-N list a prefix of the depth-(N+1) list.  Refuses to materialize
    more than ``cap`` words.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    predicted = ball_size(params, depth)
    if predicted > cap:
        raise CapacityError(
            f"enumeration of {predicted} words exceeds cap {cap}"
        )
    words = [IDENTITY]
    shell = [IDENTITY]
    for _ in range(depth):
        # Appending letters in increasing order to a lex-sorted shell yields
        # the next shell already lex-sorted.
        nxt = []
        for w in shell:
            last = w.letters[-1] if w.letters else 0
            for y in range(1, params.s + 1):
                if y != last:
                    nxt.append(Word(w.letters + (y,)))
        shell = nxt
        words.extend(shell)
    return words


_WORD_TOKEN = re.compile(r"g([1-9][0-9]*)\Z")


def word_to_str(w: Word) -> str:
    """Serialize a word as dot-joined generator tokens, or "e" for the identity."""
    if not w.letters:
        return "e"
    return ".".join(f"g{letter}" for letter in w.letters)


def word_from_str(text: str) -> Word:
    """Parse the dot-joined generator format; inverse of :func:`word_to_str`."""
    text = text.strip()
    if text in ("e", ""):
        return IDENTITY
    letters = []
    for token in text.split("."):
        m = _WORD_TOKEN.match(token.strip())
        if m is None:
            raise ValueError(f"cannot parse generator token {token!r}")
        letters.append(int(m.group(1)))
    return Word(tuple(letters))

"""Shared brute-force oracles for the test suite.

Everything here is deliberately naive and written against the definitions,
not against the package implementation, so agreement is evidence.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from steergap import GroupParams, Word


def stack_reduce(letters) -> tuple[int, ...]:
    """Fully reduce a letter sequence by repeated adjacent cancellation."""
    out: list[int] = []
    for letter in letters:
        if out and out[-1] == letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def brute_words(s: int, max_len: int) -> list[tuple[int, ...]]:
    """Every reduced word up to a length, by filtering all letter strings."""
    found = [()]
    for k in range(1, max_len + 1):
        for cand in product(range(1, s + 1), repeat=k):
            if all(a != b for a, b in zip(cand, cand[1:])):
                found.append(cand)
    return found


def dense_left_shift(s: int, depth: int, y: int, words: list[Word]) -> np.ndarray:
    """Left-multiplication matrix built directly from the definition."""
    index = {w.letters: i for i, w in enumerate(words)}
    dim = len(words)
    mat = np.zeros((dim, dim))
    for col, w in enumerate(words):
        image = stack_reduce((y,) + w.letters)
        if len(image) <= depth:
            mat[index[image], col] = 1.0
    return mat


def dense_right_shift(s: int, depth: int, x: int, words: list[Word]) -> np.ndarray:
    index = {w.letters: i for i, w in enumerate(words)}
    dim = len(words)
    mat = np.zeros((dim, dim))
    for col, w in enumerate(words):
        image = stack_reduce(w.letters + (x,))
        if len(image) <= depth:
            mat[index[image], col] = 1.0
    return mat


def random_reduced_letters(rng: np.random.Generator, s: int, length: int) -> tuple:
    letters: list[int] = []
    for _ in range(length):
        choices = [g for g in range(1, s + 1) if not letters or g != letters[-1]]
        letters.append(int(rng.choice(choices)))
    return tuple(letters)


def random_buffered_amplitudes(
    rng: np.random.Generator, basis, max_depth: int
) -> np.ndarray:
    """Unit amplitudes supported on words of length <= max_depth."""
    keep = basis.prefix_dimension(max_depth)
    amps = np.zeros(basis.dimension)
    amps[:keep] = rng.standard_normal(keep)
    return amps / np.linalg.norm(amps)

"""Small symmetric-group helpers.

Permutations of {0, ..., d-1} are tuples of images; composition is
``compose(g, h)(x) = g(h(x))``.  Transpositions are labelled 1-based as
``(i, j)`` with i < j, matching the usual cycle notation.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

Perm = tuple[int, ...]


def identity(d: int) -> Perm:
    return tuple(range(d))


def compose(g: Perm, h: Perm) -> Perm:
    return tuple(g[x] for x in h)


def inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def conjugate(g: Perm, h: Perm) -> Perm:
    """g h g^-1."""
    return compose(compose(g, h), inverse(g))


def sign(g: Perm) -> int:
    seen = [False] * len(g)
    s = 1
    for i in range(len(g)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = g[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def cycle_type(g: Perm) -> tuple[int, ...]:
    seen = [False] * len(g)
    lengths = []
    for i in range(len(g)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = g[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def transposition(i: int, j: int, d: int) -> Perm:
    """The transposition swapping the 1-based points i and j."""
    g = list(range(d))
    g[i - 1], g[j - 1] = j - 1, i - 1
    return tuple(g)


@lru_cache(maxsize=None)
def transposition_labels(d: int) -> tuple[tuple[int, int], ...]:
    """(i, j) pairs in lexicographic order; this fixes the alphabet order."""
    return tuple(combinations(range(1, d + 1), 2))


@lru_cache(maxsize=None)
def transpositions(d: int) -> tuple[Perm, ...]:
    return tuple(transposition(i, j, d) for i, j in transposition_labels(d))


@lru_cache(maxsize=None)
def all_perms(d: int) -> tuple[Perm, ...]:
    return tuple(permutations(range(d)))


def nontrivial_elements(d: int) -> tuple[Perm, ...]:
    e = identity(d)
    return tuple(g for g in all_perms(d) if g != e)


def label(g: Perm) -> str:
    """Cycle notation with 1-based points, e.g. '(1 2)(3 4)'; '()' for identity."""
    seen = [False] * len(g)
    parts = []
    for i in range(len(g)):
        if seen[i] or g[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(str(j + 1))
            j = g[j]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


def product(perms, d: int) -> Perm:
    out = identity(d)
    for g in perms:
        out = compose(out, g)
    return out

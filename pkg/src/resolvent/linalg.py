"""Exact and modular ranks of sparse matrices given as lists of row dicts.

Rows map column index -> int or Fraction.  Exact ranks use rational
elimination; modular ranks run the compiled echelon kernel modulo random
62-bit primes and are only reported when two independent primes agree.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels

EXACT_LIMIT = 2000
MODULAR_LIMIT = 50000

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class RankDisagreement(RuntimeError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    dd, s = n - 1, 0
    while dd % 2 == 0:
        dd //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, dd, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime_62(rng: random.Random) -> int:
    while True:
        n = rng.randrange(1 << 61, 1 << 62) | 1
        if is_prime(n):
            return n


def _pivot_of(row: Mapping[int, Fraction]) -> int:
    return max(row)


def rank_exact(rows: Iterable[Mapping[int, object]], ncols: int | None = None) -> int:
    """Rank over Q by incremental elimination on sparse rows."""
    return len(independent_rows_exact(rows))


def independent_rows_exact(rows: Iterable[Mapping[int, object]]) -> list[int]:
    pivots: dict[int, dict[int, Fraction]] = {}
    chosen = []
    for r, row in enumerate(rows):
        w = {c: Fraction(v) for c, v in row.items() if v}
        while w:
            top = _pivot_of(w)
            prow = pivots.get(top)
            if prow is None:
                f = w[top]
                pivots[top] = {c: v / f for c, v in w.items()}
                chosen.append(r)
                break
            f = w[top]
            for c, v in prow.items():
                x = w.get(c, 0) - f * v
                if x:
                    w[c] = x
                else:
                    w.pop(c, None)
    return chosen


def to_csr(rows: Sequence[Mapping[int, object]], p: int):
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    total = sum(len(r) for r in rows)
    indices = np.empty(total, dtype=np.int64)
    data = np.empty(total, dtype=np.int64)
    k = 0
    for i, row in enumerate(rows):
        for c, v in row.items():
            if isinstance(v, Fraction):
                v = v.numerator * pow(v.denominator, -1, p)
            indices[k] = c
            data[k] = int(v) % p
            k += 1
        indptr[i + 1] = k
    return indptr, indices, data


def independent_rows_mod_p(rows: Sequence[Mapping[int, object]], ncols: int, p: int) -> list[int]:
    indptr, indices, data = to_csr(rows, p)
    return [int(x) for x in kernels.echelon_mod_p(indptr, indices, data, ncols, p)]


def rank_mod_p(rows: Sequence[Mapping[int, object]], ncols: int, p: int) -> int:
    return len(independent_rows_mod_p(rows, ncols, p))


@dataclass(frozen=True)
class RankResult:
    rank: int
    method: str  # "exact" or "modular"
    primes: tuple[int, ...] = ()

    @property
    def label(self) -> str:
        if self.method == "exact":
            return "exact"
        return "certified modulo prime choice"


def prime_pair(seed: int) -> tuple[int, int]:
    rng = random.Random(seed)
    p1 = random_prime_62(rng)
    p2 = random_prime_62(rng)
    while p2 == p1:
        p2 = random_prime_62(rng)
    return p1, p2


def certified_rank(rows: Sequence[Mapping[int, object]], ncols: int, seed: int = 0,
                   exact_limit: int = EXACT_LIMIT, primes: tuple[int, int] | None = None) -> RankResult:
    """Exact rank when the ambient dimension is small, else dual-prime modular rank."""
    if max(ncols, len(rows)) <= exact_limit:
        return RankResult(rank_exact(rows), "exact")
    p1, p2 = primes or prime_pair(seed)
    r1 = rank_mod_p(rows, ncols, p1)
    r2 = rank_mod_p(rows, ncols, p2)
    if r1 != r2:
        raise RankDisagreement(f"rank {r1} mod {p1} but {r2} mod {p2}")
    return RankResult(r1, "modular", (p1, p2))

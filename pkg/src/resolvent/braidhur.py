"""Hurwitz braid action on tuples of permutations and its orbit structure."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import perms
from .perms import Perm

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


def class_elements(d: int, cls: str = "transpositions") -> tuple[Perm, ...]:
    if cls == "transpositions":
        return perms.transpositions(d)
    if cls == "all":
        if d > 5:
            raise ValueError("class 'all' is limited to d <= 5")
        return perms.nontrivial_elements(d)
    raise ValueError(f"unknown class {cls!r}")


def hurwitz_sigma(i: int, t: Sequence[Perm]) -> tuple[Perm, ...]:
    """Braid generator sigma_i (1-based): (g_i, g_i+1) -> (g_i+1, g_i+1^-1 g_i g_i+1)."""
    n = len(t)
    if not 1 <= i <= n - 1:
        raise IndexError(f"sigma_{i} undefined on tuples of length {n}")
    out = list(t)
    a, b = t[i - 1], t[i]
    out[i - 1] = b
    out[i] = perms.compose(perms.compose(perms.inverse(b), a), b)
    return tuple(out)


def hurwitz_sigma_inv(i: int, t: Sequence[Perm]) -> tuple[Perm, ...]:
    n = len(t)
    if not 1 <= i <= n - 1:
        raise IndexError(f"sigma_{i} undefined on tuples of length {n}")
    out = list(t)
    a, b = t[i - 1], t[i]
    out[i - 1] = perms.conjugate(a, b)
    out[i] = a
    return tuple(out)


def conjugate_tuple(g: Perm, t: Sequence[Perm]) -> tuple[Perm, ...]:
    return tuple(perms.conjugate(g, x) for x in t)


@dataclass
class OrbitReport:
    d: int
    n: int
    cls: str
    orbit_count: int
    orbit_sizes: dict[int, int]
    with_product_classes: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "class": self.cls,
            "orbits": self.orbit_count,
            "sizes": {str(k): v for k, v in sorted(self.orbit_sizes.items())},
            "by_product_class": dict(sorted(self.with_product_classes.items())),
        }


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _orbits(d: int, n: int, cls: str, unmarked: bool, budget: int) -> OrbitReport:
    elems = class_elements(d, cls)
    m = len(elems)
    total = m**n
    if total > budget:
        raise BudgetExceeded(f"{m}^{n} = {total} tuples exceeds budget {budget}")
    index = {g: k for k, g in enumerate(elems)}
    # conj[a][b] = index of c_b^-1 c_a c_b
    conj = [[index[perms.compose(perms.compose(perms.inverse(elems[b]), elems[a]), elems[b])]
             for b in range(m)] for a in range(m)]
    group_maps = []
    if unmarked:
        for g in perms.all_perms(d):
            group_maps.append([index[perms.conjugate(g, x)] for x in elems])

    uf = _UnionFind(total)
    powers = [m ** (n - 1 - k) for k in range(n)]
    for code in range(total):
        digits = [(code // powers[k]) % m for k in range(n)]
        for i in range(n - 1):
            a, b = digits[i], digits[i + 1]
            new = code + (b - a) * powers[i] + (conj[a][b] - b) * powers[i + 1]
            uf.union(code, new)
        for gmap in group_maps:
            new = 0
            for k in range(n):
                new += gmap[digits[k]] * powers[k]
            uf.union(code, new)

    sizes: Counter = Counter()
    roots: dict[int, int] = {}
    for code in range(total):
        r = uf.find(code)
        roots[r] = roots.get(r, 0) + 1
    for r, s in roots.items():
        sizes[s] += 1
    by_class: Counter = Counter()
    for r in roots:
        digits = [(r // powers[k]) % m for k in range(n)]
        prod = perms.product([elems[k] for k in digits], d)
        by_class["".join(str(x) for x in perms.cycle_type(prod))] += 1
    return OrbitReport(d, n, cls, len(roots), dict(sorted(sizes.items())), dict(sorted(by_class.items())))


def braid_orbits(d: int, n: int, cls: str = "transpositions", budget: int = DEFAULT_BUDGET) -> OrbitReport:
    """Orbits of the braid group B_n on c^n (union-find over the sigma_i graph).

    with_product_classes is keyed by the cycle type of the ordered product,
    written as a digit string such as '21' or '3'.
    """
    return _orbits(d, n, cls, False, budget)


def unmarked_orbits(d: int, n: int, cls: str = "transpositions", budget: int = DEFAULT_BUDGET) -> OrbitReport:
    """Orbits under braid moves together with simultaneous conjugation by S_d."""
    return _orbits(d, n, cls, True, budget)


Action = Callable[[Perm, Sequence[Perm]], tuple]


def commuting_actions_check(d: int, n: int, trials: int, seed: int = 0,
                            action: Action = conjugate_tuple, cls: str = "transpositions") -> bool:
    """Check g.sigma_i(t) == sigma_i(g.t) on seeded random (g, i, t)."""
    if n < 2:
        return True
    rng = random.Random(seed)
    elems = class_elements(d, cls)
    group = perms.all_perms(d)
    for _ in range(trials):
        g = rng.choice(group)
        i = rng.randint(1, n - 1)
        t = tuple(rng.choice(elems) for _ in range(n))
        if action(g, hurwitz_sigma(i, t)) != hurwitz_sigma(i, action(g, t)):
            return False
    return True


def braid_relations_hold(t: Sequence[Perm]) -> bool:
    """sigma_i sigma_i+1 sigma_i = sigma_i+1 sigma_i sigma_i+1 and far commutation on t."""
    n = len(t)
    s = hurwitz_sigma
    for i in range(1, n - 1):
        if s(i, s(i + 1, s(i, t))) != s(i + 1, s(i, s(i + 1, t))):
            return False
    for i in range(1, n):
        for j in range(i + 2, n):
            if s(i, s(j, t)) != s(j, s(i, t)):
                return False
    return True


def coinvariant_dim(d: int, n: int, cls: str = "transpositions") -> int:
    """dim of the B_n-coinvariants of the permutation module k[c^n], by linear algebra.

    Computed as dim M - rank span{sigma_i(x) - x}, independently of the
    union-find orbit count.
    """
    from .linalg import rank_exact

    elems = class_elements(d, cls)
    tuples = _all_tuples(elems, n)
    index = {t: k for k, t in enumerate(tuples)}
    rows = []
    for t in tuples:
        for i in range(1, n):
            u = index[hurwitz_sigma(i, t)]
            v = index[t]
            if u != v:
                rows.append({u: 1, v: -1})
    return len(tuples) - rank_exact(rows, len(tuples))


def _all_tuples(elems, n):
    out = [()]
    for _ in range(n):
        out = [t + (g,) for t in out for g in elems]
    return out

"""The braided vector space spanned by transpositions and its Nichols algebra.

Letters are indices into the transpositions of S_d in lexicographic (i, j)
order; words are tuples of letters, ordered degree-lexicographically.  The
braiding is e_g (x) e_h -> -e_h (x) e_{h^-1 g h}, so it maps basis tensors to
signed basis tensors and every shuffle operator R_w does the same.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from . import linalg, perms
from .perms import Perm
from .cache import CODE_VERSION

Word = tuple[int, ...]
FORMAT_VERSION = "rewrite-v1"


class BudgetExceeded(RuntimeError):
    pass


class RuleExplosion(RuntimeError):
    pass


class DegreeBeyondCompletion(ValueError):
    pass


# ------------------------------------------------------------------ alphabet

@dataclass(frozen=True)
class Alphabet:
    d: int
    labels: tuple[tuple[int, int], ...]
    elements: tuple[Perm, ...]
    braid: tuple[tuple[int, ...], ...]  # braid[x][y] = letter of y x y

    @property
    def size(self) -> int:
        return len(self.labels)

    def letter(self, i: int, j: int) -> int:
        return self.labels.index((min(i, j), max(i, j)))

    def conj_map(self, g: Perm) -> tuple[int, ...]:
        """Letter permutation induced by t -> g t g^-1."""
        idx = {t: k for k, t in enumerate(self.elements)}
        return tuple(idx[perms.conjugate(g, t)] for t in self.elements)

    def grade(self, w: Word) -> Perm:
        return perms.product((self.elements[x] for x in w), self.d)

    def word_label(self, w: Word) -> str:
        return "".join(f"({i}{j})" for i, j in (self.labels[x] for x in w)) or "1"


@lru_cache(maxsize=None)
def alphabet(d: int) -> Alphabet:
    if d < 2:
        raise ValueError("d must be at least 2")
    elems = perms.transpositions(d)
    idx = {t: k for k, t in enumerate(elems)}
    braid = tuple(tuple(idx[perms.compose(perms.compose(elems[y], elems[x]), elems[y])]
                        for y in range(len(elems))) for x in range(len(elems)))
    return Alphabet(d, perms.transposition_labels(d), elems, braid)


# ---------------------------------------------------------------- tensors

class TensorElem:
    """Sparse exact-rational combination of words of one length."""

    __slots__ = ("d", "degree", "terms")

    def __init__(self, d: int, degree: int, terms: Mapping[Word, object] | None = None):
        self.d = d
        self.degree = degree
        clean: dict[Word, Fraction] = {}
        for w, c in (terms or {}).items():
            if len(w) != degree:
                raise ValueError(f"word {w} has length {len(w)}, expected {degree}")
            c = Fraction(c)
            if c:
                clean[tuple(w)] = c
        self.terms = clean

    @classmethod
    def word(cls, d: int, w: Sequence[int], coeff=1) -> "TensorElem":
        return cls(d, len(w), {tuple(w): coeff})

    @classmethod
    def scalar(cls, d: int, c=1) -> "TensorElem":
        return cls(d, 0, {(): c})

    def _check(self, other: "TensorElem") -> None:
        if other.d != self.d or other.degree != self.degree:
            raise ValueError("incompatible tensors")

    def __add__(self, other: "TensorElem") -> "TensorElem":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return TensorElem(self.d, self.degree, out)

    def __neg__(self) -> "TensorElem":
        return TensorElem(self.d, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        return self + (-other)

    def __mul__(self, c) -> "TensorElem":
        c = Fraction(c)
        return TensorElem(self.d, self.degree, {w: c * v for w, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElem):
            return NotImplemented
        return self.d == other.d and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.d, self.degree, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def tensor(self, other: "TensorElem") -> "TensorElem":
        out: dict[Word, Fraction] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                out[u + v] = out.get(u + v, 0) + a * b
        return TensorElem(self.d, self.degree + other.degree, out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        a = alphabet(self.d)
        parts = [f"{c}*{a.word_label(w)}" for w, c in sorted(self.terms.items())]
        return " + ".join(parts)


# ----------------------------------------------------------------- braiding

class Braiding:
    """c(e_g (x) e_h) = -e_h (x) e_{h^-1 g h} and its action on tensor positions."""

    def __init__(self, d: int):
        self.d = d
        self.alphabet = alphabet(d)

    def on_pair(self, x: int, y: int) -> tuple[int, int, int]:
        """(sign, left letter, right letter) of c(x (x) y)."""
        return -1, y, self.alphabet.braid[x][y]

    def apply(self, elem: TensorElem, i: int = 0) -> TensorElem:
        """Apply c to tensor positions (i, i+1), 0-based."""
        if not 0 <= i < elem.degree - 1:
            raise IndexError("braiding position out of range")
        out: dict[Word, Fraction] = {}
        br = self.alphabet.braid
        for w, c in elem.terms.items():
            x, y = w[i], w[i + 1]
            nw = w[:i] + (y, br[x][y]) + w[i + 2:]
            out[nw] = out.get(nw, 0) - c
        return TensorElem(self.d, elem.degree, out)

    def __call__(self, elem: TensorElem) -> TensorElem:
        return self.apply(elem, 0)

    def matrix(self) -> list[list[int]]:
        """Matrix on V (x) V in the basis of words (x, y) ordered lexicographically."""
        m = self.alphabet.size
        mat = [[0] * (m * m) for _ in range(m * m)]
        for x in range(m):
            for y in range(m):
                s, a, b = self.on_pair(x, y)
                mat[a * m + b][x * m + y] = s
        return mat


def braiding_eps(d: int) -> Braiding:
    if d not in (3, 4, 5):
        raise ValueError("braiding_eps is provided for d in {3, 4, 5}")
    return Braiding(d)


def braid_equation_holds(d: int) -> bool:
    """(c(x)1)(1(x)c)(c(x)1) = (1(x)c)(c(x)1)(1(x)c) on every basis tensor of V^3."""
    c = Braiding(d)
    m = c.alphabet.size
    for w in product(range(m), repeat=3):
        e = TensorElem.word(d, w)
        lhs = c.apply(c.apply(c.apply(e, 0), 1), 0)
        rhs = c.apply(c.apply(c.apply(e, 1), 0), 1)
        if lhs != rhs:
            return False
    return True


# ------------------------------------------------------------ shuffle product

def _shuffle_words(u: Word, v: Word, braid, realization: str) -> dict[Word, int]:
    m, n = len(u), len(v)
    out: dict[Word, int] = {}
    for slots in combinations(range(m + n), n):
        w = list(u + v)
        sign = 1
        if realization == "left":
            # move each letter of v leftwards into its slot, first letter first
            for j, target in enumerate(slots):
                for pos in range(m + j, target, -1):
                    a, b = w[pos - 1], w[pos]
                    w[pos - 1], w[pos] = b, braid[a][b]
                    sign = -sign
        else:
            # move each letter of u rightwards, last letter first
            xslots = [k for k in range(m + n) if k not in set(slots)]
            for i in range(m - 1, -1, -1):
                for pos in range(i, xslots[i]):
                    a, b = w[pos], w[pos + 1]
                    w[pos], w[pos + 1] = b, braid[a][b]
                    sign = -sign
        key = tuple(w)
        out[key] = out.get(key, 0) + sign
    return out


def shuffle_product(x: TensorElem, y: TensorElem, realization: str = "left") -> TensorElem:
    """Quantum shuffle product: sum over (m,n)-shuffles w of R_w(x (x) y).

    R_w is built from adjacent braidings along a reduced word of the shuffle
    permutation; `realization` picks one of two different reduced words.
    """
    if x.d != y.d:
        raise ValueError("tensors over different alphabets")
    braid = alphabet(x.d).braid
    out: dict[Word, Fraction] = {}
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            for w, s in _shuffle_words(u, v, braid, realization).items():
                out[w] = out.get(w, 0) + a * b * s
    return TensorElem(x.d, x.degree + y.degree, out)


def _symmetrizer_columns(d: int, n: int) -> dict[Word, dict[Word, int]]:
    """Omega_n(w) = v_w1 * ... * v_wn for every word w of length n (integer coefficients)."""
    braid = alphabet(d).braid
    m = alphabet(d).size
    cols: dict[Word, dict[Word, int]] = {(): {(): 1}}
    for k in range(1, n + 1):
        nxt: dict[Word, dict[Word, int]] = {}
        for prefix, vec in cols.items():
            for y in range(m):
                acc: dict[Word, int] = {}
                for u, c in vec.items():
                    for w, s in _shuffle_words(u, (y,), braid, "left").items():
                        acc[w] = acc.get(w, 0) + c * s
                nxt[prefix + (y,)] = {w: c for w, c in acc.items() if c}
        cols = nxt
    return cols


def _grade_key(a: Alphabet, w: Word) -> Perm:
    return a.grade(w)


def quantum_symmetrizer_dim(d: int, n: int, rank_mode: str = "auto", seed: int = 0,
                            exact_limit: int = linalg.EXACT_LIMIT,
                            modular_limit: int = linalg.MODULAR_LIMIT) -> int:
    """Rank of the span of all n-fold shuffle products of degree-one basis vectors.

    'exact' forms every column v_i1 * ... * v_in and ranks it over Q blockwise
    by product grading.  'modular' builds the span degree by degree as
    (basis of degree n-1) * v, choosing bases modulo one 62-bit prime and
    requiring the same ranks modulo a second one.
    """
    return quantum_symmetrizer_report(d, n, rank_mode, seed, exact_limit, modular_limit).rank


def quantum_symmetrizer_report(d: int, n: int, rank_mode: str = "auto", seed: int = 0,
                               exact_limit: int = linalg.EXACT_LIMIT,
                               modular_limit: int = linalg.MODULAR_LIMIT) -> linalg.RankResult:
    a = alphabet(d)
    ambient = a.size ** n
    if rank_mode == "auto":
        rank_mode = "exact" if ambient <= exact_limit else "modular"
    if rank_mode == "exact":
        if ambient > exact_limit:
            raise BudgetExceeded(f"ambient dimension {ambient} > {exact_limit}: use rewrite-system dims")
        cols = _symmetrizer_columns(d, n)
        blocks: dict[Perm, list[dict[Word, int]]] = {}
        for w, vec in cols.items():
            blocks.setdefault(a.grade(w), []).append(vec)
        total = 0
        for vecs in blocks.values():
            index: dict[Word, int] = {}
            rows = [{index.setdefault(w, len(index)): c for w, c in v.items()} for v in vecs]
            total += linalg.rank_exact(rows)
        return linalg.RankResult(total, "exact")
    if rank_mode != "modular":
        raise ValueError(f"unknown rank mode {rank_mode!r}")
    if ambient > modular_limit:
        raise BudgetExceeded(f"ambient dimension {ambient} > {modular_limit}: use rewrite-system dims")
    p1, p2 = linalg.prime_pair(seed)
    braid = a.braid
    basis: list[dict[Word, int]] = [{(): 1}]
    rank = 1
    for k in range(1, n + 1):
        blocks: dict[Perm, list[dict[Word, int]]] = {}
        for vec in basis:
            for y in range(a.size):
                acc: dict[Word, int] = {}
                for u, c in vec.items():
                    for w, s in _shuffle_words(u, (y,), braid, "left").items():
                        acc[w] = acc.get(w, 0) + c * s
                acc = {w: c for w, c in acc.items() if c}
                if acc:
                    blocks.setdefault(a.grade(next(iter(acc))), []).append(acc)
        basis = []
        rank = 0
        for g in sorted(blocks):
            vecs = blocks[g]
            index: dict[Word, int] = {}
            rows = [{index.setdefault(w, len(index)): c for w, c in v.items()} for v in vecs]
            keep = linalg.independent_rows_mod_p(rows, len(index), p1)
            r2 = linalg.rank_mod_p(rows, len(index), p2)
            if r2 != len(keep):
                raise linalg.RankDisagreement(f"degree {k}: {len(keep)} mod {p1} vs {r2} mod {p2}")
            basis.extend(vecs[i] for i in keep)
            rank += len(keep)
    return linalg.RankResult(rank, "modular", (p1, p2))


# ---------------------------------------------------------------- relations

@dataclass
class QuadraticRelationSet:
    d: int
    basis: list[TensorElem]

    def __len__(self) -> int:
        return len(self.basis)

    def span_dim(self) -> int:
        index: dict[Word, int] = {}
        rows = [{index.setdefault(w, len(index)): c for w, c in r.terms.items()} for r in self.basis]
        return linalg.rank_exact(rows)


def quadratic_relations(d: int) -> QuadraticRelationSet:
    """Squares, commutators of disjoint transpositions, and both three-term families."""
    if d not in (3, 4, 5):
        raise ValueError("quadratic relations are provided for d in {3, 4, 5}")
    a = alphabet(d)
    L = a.letter
    rels: list[TensorElem] = []
    for x in range(a.size):
        rels.append(TensorElem.word(d, (x, x)))
    for (i, j), (k, l) in combinations(a.labels, 2):
        if len({i, j, k, l}) == 4:
            x, y = L(i, j), L(k, l)
            rels.append(TensorElem(d, 2, {(x, y): 1, (y, x): 1}))
    for i, j, k in combinations(range(1, d + 1), 3):
        ij, jk, ik = L(i, j), L(j, k), L(i, k)
        rels.append(TensorElem(d, 2, {(ij, jk): 1, (jk, ik): 1, (ik, ij): 1}))
        rels.append(TensorElem(d, 2, {(jk, ij): 1, (ik, jk): 1, (ij, ik): 1}))
    return QuadraticRelationSet(d, rels)


def hilbert_target(d: int) -> list[int]:
    """Coefficients of (2)^2(3) for d=3 and (2)^2(3)^2(4)^2 for d=4, (n) = 1+t+...+t^(n-1)."""
    factors = {3: [2, 2, 3], 4: [2, 2, 3, 3, 4, 4]}[d]
    coeffs = [1]
    for f in factors:
        new = [0] * (len(coeffs) + f - 1)
        for i, c in enumerate(coeffs):
            for k in range(f):
                new[i + k] += c
        coeffs = new
    return coeffs


# ---------------------------------------------------------- rewrite system

@dataclass
class GradedDims:
    dims: list[int]

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def top_degree(self) -> int:
        nz = [k for k, v in enumerate(self.dims) if v]
        return nz[-1] if nz else 0

    def palindromic(self) -> bool:
        core = self.dims[: self.top_degree + 1]
        return core == core[::-1]


@dataclass
class RewriteSystem:
    """Graded quotient of the tensor algebra by a relation ideal, to a degree bound.

    normal[k] lists the normal (standard) words of degree k in increasing
    deglex order; reductions[k] maps each non-normal word of degree k whose
    prefix is normal to its normal form; rules is the minimal subset of
    those reductions whose leading words have all proper subwords normal.
    """

    d: int
    completed_to: int
    normal: list[list[Word]]
    reductions: list[dict[Word, dict[Word, Fraction]]]
    rules: dict[Word, TensorElem] = field(default_factory=dict)

    def __post_init__(self):
        self._index = [{w: k for k, w in enumerate(ws)} for ws in self.normal]
        self._nf_cache: dict[Word, dict[Word, Fraction]] = {}
        self._grades: dict[Word, Perm] = {}

    @property
    def dims(self) -> GradedDims:
        return GradedDims([len(ws) for ws in self.normal])

    def is_normal(self, w: Word) -> bool:
        return len(w) <= self.completed_to and w in self._index[len(w)]

    def index(self, w: Word) -> int:
        return self._index[len(w)][w]

    def times_letter(self, v: Word, y: int) -> dict[Word, Fraction]:
        """Normal form of v*y for a normal word v."""
        w = v + (y,)
        if len(w) > self.completed_to:
            raise DegreeBeyondCompletion(f"degree {len(w)} > completed_to={self.completed_to}")
        if w in self._index[len(w)]:
            return {w: Fraction(1)}
        return self.reductions[len(w)][w]

    def word_nf(self, w: Word) -> dict[Word, Fraction]:
        if len(w) > self.completed_to:
            raise DegreeBeyondCompletion(f"degree {len(w)} > completed_to={self.completed_to}")
        hit = self._nf_cache.get(w)
        if hit is not None:
            return hit
        if len(w) <= 1 or w in self._index[len(w)]:
            res = {w: Fraction(1)}
        else:
            res = {}
            for v, c in self.word_nf(w[:-1]).items():
                for u, e in self.times_letter(v, w[-1]).items():
                    x = res.get(u, 0) + c * e
                    if x:
                        res[u] = x
                    else:
                        res.pop(u, None)
        self._nf_cache[w] = res
        return res

    def multiply(self, u: Word, v: Word) -> dict[Word, Fraction]:
        """Normal form of the product of two normal words."""
        if len(u) + len(v) > self.completed_to:
            if self._beyond_top(len(u) + len(v)):
                return {}
            raise DegreeBeyondCompletion("product degree beyond completion")
        return self.word_nf(u + v)

    def _beyond_top(self, deg: int) -> bool:
        # a certified empty degree kills everything above it
        return any(len(self.normal[k]) == 0 for k in range(1, min(deg, self.completed_to + 1)))

    def grade(self, w: Word) -> Perm:
        g = self._grades.get(w)
        if g is None:
            g = alphabet(self.d).grade(w)
            self._grades[w] = g
        return g

    # -- serialization
    def to_json(self) -> dict:
        def enc(vec):
            return [[list(w), f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)]
                    for w, c in sorted(vec.items())]
        return {
            "format": FORMAT_VERSION,
            "d": self.d,
            "completed_to": self.completed_to,
            "normal": [[list(w) for w in ws] for ws in self.normal],
            "reductions": [[[list(w), enc(v)] for w, v in sorted(red.items())] for red in self.reductions],
            "rules": [[list(w), enc(t.terms)] for w, t in sorted(self.rules.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RewriteSystem":
        if data.get("format") != FORMAT_VERSION:
            raise ValueError("rewrite system format mismatch")
        d = data["d"]

        def dec(pairs):
            return {tuple(w): Fraction(c) for w, c in pairs}

        reductions = [{tuple(w): dec(v) for w, v in red} for red in data["reductions"]]
        rules = {}
        for w, v in data["rules"]:
            rules[tuple(w)] = TensorElem(d, len(w), dec(v))
        normal = [[tuple(w) for w in ws] for ws in data["normal"]]
        return cls(d, data["completed_to"], normal, reductions, rules)


def _reduce_rows(rows: list[dict[Word, Fraction]]) -> dict[Word, dict[Word, Fraction]]:
    """Fully reduced echelon form keyed by pivot = largest word of each row."""
    pivots: dict[Word, dict[Word, Fraction]] = {}
    for row in rows:
        w = {k: v for k, v in row.items() if v}
        while w:
            top = max(w)
            prow = pivots.get(top)
            if prow is None:
                f = w[top]
                pivots[top] = {k: v / f for k, v in w.items()}
                break
            f = w[top]
            for k, v in prow.items():
                x = w.get(k, 0) - f * v
                if x:
                    w[k] = x
                else:
                    w.pop(k, None)
    for top in sorted(pivots):
        row = pivots[top]
        for k in [k for k in row if k != top and k in pivots]:
            f = row.get(k)
            if not f:
                continue
            for kk, vv in pivots[k].items():
                x = row.get(kk, 0) - f * vv
                if x:
                    row[kk] = x
                else:
                    row.pop(kk, None)
    return pivots


def groebner_complete(rels: QuadraticRelationSet, max_deg: int, rule_cap: int = 200000,
                      allow_large: bool = False) -> RewriteSystem:
    """Degree-by-degree completion of the relation ideal under deglex.

    Degree n candidates are (normal words of degree n-1) x letters.  The ideal
    in degree n is spanned modulo lower degrees by NF(u x) (x) y summed over
    each relation sum c_xy x (x) y, for normal u of degree n-2.  Eliminating
    with the largest word as pivot, the non-pivot candidates are the normal
    words and each pivot row gives that word's normal form.  Elimination runs
    separately on each product-grading block.  Minimal pivot words become
    the rules.
    """
    if max_deg < 2:
        raise ValueError("max_deg must be at least 2")
    d = rels.d
    if d >= 5 and not allow_large:
        raise BudgetExceeded("d=5 completion is gated; pass allow_large=True")
    a = alphabet(d)
    m = a.size
    normal: list[list[Word]] = [[()], [(x,) for x in range(m)]]
    reductions: list[dict[Word, dict[Word, Fraction]]] = [{}, {}]
    rules: dict[Word, TensorElem] = {}
    partial = RewriteSystem(d, 1, normal, reductions, {})
    rel_terms = [[(w[0], w[1], c) for w, c in r.terms.items()] for r in rels.basis]
    for n in range(2, max_deg + 1):
        blocks: dict[Perm, list[dict[Word, Fraction]]] = {}
        for u in normal[n - 2]:
            for terms in rel_terms:
                row: dict[Word, Fraction] = {}
                for x, y, c in terms:
                    ux = partial.word_nf(u + (x,)) if n > 2 else {(x,): Fraction(1)}
                    for v, e in ux.items():
                        key = v + (y,)
                        val = row.get(key, 0) + c * e
                        if val:
                            row[key] = val
                        else:
                            row.pop(key, None)
                if row:
                    blocks.setdefault(a.grade(next(iter(row))), []).append(row)
        red: dict[Word, dict[Word, Fraction]] = {}
        for g in sorted(blocks):
            for top, row in _reduce_rows(blocks[g]).items():
                red[top] = {k: -v for k, v in row.items() if k != top}
        cands = [v + (y,) for v in normal[n - 1] for y in range(m)]
        normal.append(sorted(w for w in cands if w not in red))
        reductions.append(red)
        index_prev = set(normal[n - 1])
        for w, tail in red.items():
            if w[1:] in index_prev:
                rules[w] = TensorElem(d, n, tail)
        if len(rules) > rule_cap:
            raise RuleExplosion(f"{len(rules)} rules at degree {n} exceed cap {rule_cap}; "
                                f"normal counts so far {[len(x) for x in normal]}")
        partial = RewriteSystem(d, n, normal, reductions, {})
    return RewriteSystem(d, max_deg, normal, reductions, rules)


def normal_form(rs: RewriteSystem, x: TensorElem, method: str = "table") -> TensorElem:
    """Normal form of x: 'table' folds letters through the multiplication table,
    'rewrite' applies the minimal rules until no leading word occurs."""
    if x.degree > rs.completed_to:
        raise DegreeBeyondCompletion(f"degree {x.degree} > completed_to={rs.completed_to}")
    if method == "table":
        out: dict[Word, Fraction] = {}
        for w, c in x.terms.items():
            for u, e in rs.word_nf(w).items():
                out[u] = out.get(u, 0) + c * e
        return TensorElem(x.d, x.degree, out)
    if method == "rewrite":
        return TensorElem(x.d, x.degree, _rewrite(rs, x.terms))
    raise ValueError(method)


def _rewrite(rs: RewriteSystem, terms: Mapping[Word, Fraction]) -> dict[Word, Fraction]:
    rules = rs.rules
    lengths = sorted({len(w) for w in rules})
    pending: dict[Word, Fraction] = {}
    heap: list = []
    for w, c in terms.items():
        if c:
            pending[w] = pending.get(w, 0) + c
    for w in pending:
        heapq.heappush(heap, _Neg(w))
    out: dict[Word, Fraction] = {}
    while heap:
        w = heapq.heappop(heap).w
        c = pending.pop(w, 0)
        if not c:
            continue
        hit = None
        for L in lengths:
            if L > len(w):
                break
            for i in range(len(w) - L + 1):
                if w[i:i + L] in rules:
                    hit = (i, L)
                    break
            if hit:
                break
        if hit is None:
            out[w] = out.get(w, 0) + c
            continue
        i, L = hit
        for t, e in rules[w[i:i + L]].terms.items():
            nw = w[:i] + t + w[i + L:]
            if nw not in pending:
                heapq.heappush(heap, _Neg(nw))
                pending[nw] = 0
            pending[nw] += c * e
    return {w: c for w, c in out.items() if c}


class _Neg:
    """Heap wrapper ordering words from largest to smallest."""

    __slots__ = ("w",)

    def __init__(self, w):
        self.w = w

    def __lt__(self, other):
        return self.w > other.w


def check_confluence(rs: RewriteSystem, max_deg: int | None = None) -> list[Word]:
    """Resolve every overlap of two rule leading words up to max_deg.

    Returns the overlap words whose two one-step reductions have different
    normal forms under rewriting (empty when confluent).
    """
    bound = min(max_deg or rs.completed_to, rs.completed_to)
    rules = rs.rules
    by_prefix: dict[Word, list[Word]] = {}
    for l2 in rules:
        for k in range(1, len(l2)):
            by_prefix.setdefault(l2[:k], []).append(l2)
    bad = []
    for l1 in rules:
        for k in range(1, len(l1)):
            for l2 in by_prefix.get(l1[-k:], ()):
                if len(l1) + len(l2) - k > bound:
                    continue
                w = l1 + l2[k:]
                left: dict[Word, Fraction] = {}
                for t, e in rules[l1].terms.items():
                    left[t + l2[k:]] = left.get(t + l2[k:], 0) + e
                right: dict[Word, Fraction] = {}
                pre = l1[: len(l1) - k]
                for t, e in rules[l2].terms.items():
                    right[pre + t] = right.get(pre + t, 0) + e
                if _rewrite(rs, left) != _rewrite(rs, right):
                    bad.append(w)
    return bad


# ---------------------------------------------------------------- S_d action

class SdAction:
    """Geometric (t -> g t g^-1) or standard (sign-twisted) action of g."""

    def __init__(self, d: int, g: Perm, mode: str = "geometric"):
        if mode not in ("geometric", "standard"):
            raise ValueError(mode)
        self.d = d
        self.g = tuple(g)
        self.mode = mode
        self.letter_map = alphabet(d).conj_map(self.g)
        self.sign = perms.sign(self.g)

    def scale(self, degree: int) -> int:
        return self.sign ** degree if self.mode == "standard" else 1

    def on_word(self, w: Word) -> Word:
        lm = self.letter_map
        return tuple(lm[x] for x in w)

    def apply(self, x: TensorElem) -> TensorElem:
        s = self.scale(x.degree)
        return TensorElem(self.d, x.degree, {self.on_word(w): s * c for w, c in x.terms.items()})

    def on_normal(self, rs: RewriteSystem, w: Word) -> dict[Word, Fraction]:
        """Image of a normal word, expressed in normal words."""
        s = self.scale(len(w))
        return {u: s * c for u, c in rs.word_nf(self.on_word(w)).items()}

    def matrix(self, rs: RewriteSystem, degree: int) -> list[list[Fraction]]:
        ws = rs.normal[degree]
        mat = [[Fraction(0)] * len(ws) for _ in ws]
        for j, w in enumerate(ws):
            for u, c in self.on_normal(rs, w).items():
                mat[rs.index(u)][j] = c
        return mat


def sd_action(d: int, g: Perm, mode: str = "geometric") -> SdAction:
    return SdAction(d, g, mode)


def relations_stable(rels: QuadraticRelationSet, mode: str = "geometric") -> bool:
    """Every S_d generator maps the relation span into itself."""
    d = rels.d
    base = rels.span_dim()
    gens = [perms.transposition(1, 2, d), tuple(list(range(1, d)) + [0])]
    for g in gens:
        act = SdAction(d, g, mode)
        index: dict[Word, int] = {}
        rows = [{index.setdefault(w, len(index)): c for w, c in r.terms.items()}
                for r in rels.basis + [act.apply(r) for r in rels.basis]]
        if linalg.rank_exact(rows) != base:
            return False
    return True


# ------------------------------------------------------------------- caching

def load_or_complete(d: int, cache_dir=None, max_deg: int | None = None) -> RewriteSystem:
    """Completion of the relations of B_d up to top degree + 1, cached as JSON."""
    import pathlib

    top = {3: 4, 4: 12}.get(d)
    if max_deg is None:
        if top is None:
            raise BudgetExceeded(f"no default completion degree for d={d}")
        max_deg = top + 1
    path = None
    if cache_dir is not None:
        path = pathlib.Path(cache_dir) / "groebner" / f"bd{d}.json"
        if path.exists():
            try:
                data = json.loads(path.read_text())
                if data.get("code_version") == CODE_VERSION:
                    rs = RewriteSystem.from_json(data)
                    if rs.completed_to >= max_deg:
                        return rs
            except (ValueError, KeyError, TypeError, AttributeError):
                import logging
                logging.getLogger(__name__).warning("ignoring unreadable cache file %s", path)
    rs = groebner_complete(quadratic_relations(d), max_deg)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"code_version": CODE_VERSION, **rs.to_json()}))
        tmp.replace(path)
    return rs


@lru_cache(maxsize=None)
def nichols_system(d: int) -> RewriteSystem:
    """In-process memo of the completed system for B_3 or B_4."""
    return load_or_complete(d)

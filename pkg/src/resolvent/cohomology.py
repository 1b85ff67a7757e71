"""Bigraded Tor/Ext of a graded quotient of the tensor algebra via the normalized
bar complex, optionally restricted to invariants of the S_d-actions.

Chains of bidegree (a, b) are tuples of a normal words of positive degree
with total degree b.  Each normal word carries a grade, the product of its
letters in S_d, and S_d acts by conjugating grades.  The invariant
subcomplex is identified with the direct sum, over one representative tuple
of grades per orbit, of the stabilizer-invariant part of that block; the
differential is transported back to representatives through the elements
that conjugate a target grade tuple onto its representative.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

from . import linalg, perms, qseries
from .nichols import RewriteSystem, TensorElem, Word, alphabet, nichols_system, shuffle_product

Chain = tuple[Word, ...]


class BudgetExceeded(RuntimeError):
    pass


EXACT_BUDGET = {3: 9, 4: 5}
INVARIANT_BUDGET = {3: 10, 4: 7}


@dataclass
class BigradedTable:
    entries: dict[tuple[int, int], int]
    methods: dict[tuple[int, int], str] = field(default_factory=dict)
    runtime: float = 0.0

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def column(self, b: int) -> dict[int, int]:
        return {a: v for (a, bb), v in sorted(self.entries.items()) if bb == b}

    def rows(self) -> list[dict]:
        return [{"a": a, "b": b, "dim": v, "method": self.methods.get((a, b), "exact")}
                for (a, b), v in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))]


def compositions(b: int, a: int, max_part: int) -> Iterable[tuple[int, ...]]:
    if a == 0:
        if b == 0:
            yield ()
        return
    for first in range(1, min(b - a + 1, max_part) + 1):
        for rest in compositions(b - first, a - 1, max_part):
            yield (first,) + rest


class _Algebra:
    """Graded algebra data the bar complex needs: normal-word blocks by
    (degree, grade) and a multiplication returning integer or rational terms."""

    def __init__(self, d: int, words_by_degree: list[list[Word]], mult: Callable[[Word, Word], dict],
                 act: Callable[[Sequence[int], Word], dict] | None):
        self.d = d
        self.alphabet = alphabet(d)
        self.group_elems = perms.all_perms(d)
        self.perm_index = {g: k for k, g in enumerate(self.group_elems)}
        nG = len(self.group_elems)
        self.conj = [[self.perm_index[perms.conjugate(g, h)] for h in self.group_elems]
                     for g in self.group_elems]
        self.mul_table = [[self.perm_index[perms.compose(g, h)] for h in self.group_elems]
                          for g in self.group_elems]
        self.signs = [perms.sign(g) for g in self.group_elems]
        self.top = max((k for k, ws in enumerate(words_by_degree) if ws), default=0)
        self.blocks: dict[tuple[int, int], list[Word]] = {}
        self.local: dict[Word, int] = {}
        self.word_grade: dict[Word, int] = {}
        for k, ws in enumerate(words_by_degree):
            if k == 0:
                continue
            for w in ws:
                g = self.perm_index[self.alphabet.grade(w)]
                self.word_grade[w] = g
                blk = self.blocks.setdefault((k, g), [])
                self.local[w] = len(blk)
                blk.append(w)
        self.grades_by_degree: dict[int, list[int]] = {}
        for (k, g) in sorted(self.blocks):
            self.grades_by_degree.setdefault(k, []).append(g)
        self._mult = mult
        self._act = act
        self._mcache: dict[tuple[Word, Word], tuple] = {}
        self._acache: dict[tuple[int, Word], tuple] = {}
        self._trace: dict[tuple[int, int, int], Fraction] = {}
        self.identity = self.perm_index[perms.identity(d)]
        del nG

    def multiply(self, u: Word, v: Word) -> tuple:
        key = (u, v)
        hit = self._mcache.get(key)
        if hit is None:
            hit = tuple((w, _num(c)) for w, c in self._mult(u, v).items())
            self._mcache[key] = hit
        return hit

    def act(self, g: int, w: Word) -> tuple:
        """Geometric action of group element g (index) on a normal word."""
        if g == self.identity:
            return ((w, 1),)
        key = (g, w)
        hit = self._acache.get(key)
        if hit is None:
            hit = tuple((u, _num(c)) for u, c in self._act(self.group_elems[g], w).items())
            self._acache[key] = hit
        return hit

    def trace(self, g: int, k: int, grade: int):
        key = (g, k, grade)
        t = self._trace.get(key)
        if t is None:
            t = 0
            for w in self.blocks[(k, grade)]:
                for u, c in self.act(g, w):
                    if u == w:
                        t += c
            self._trace[key] = t
        return t


def _num(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def nichols_algebra(d: int, rs: RewriteSystem | None = None) -> _Algebra:
    rs = rs or nichols_system(d)
    lm_cache: dict = {}

    def act(g, w):
        lm = lm_cache.get(g)
        if lm is None:
            lm = lm_cache[g] = alphabet(d).conj_map(g)
        return rs.word_nf(tuple(lm[x] for x in w))

    return _Algebra(d, rs.normal, rs.multiply, act)


class BarComplex:
    """Normalized bar complex of a graded algebra, reduced to G-invariants.

    group='trivial' gives the full complex (each grade tuple is its own
    representative); group='symmetric' uses S_d acting geometrically, with an
    extra sgn(g)^b in internal degree b when mode='standard'.
    """

    def __init__(self, algebra: _Algebra, group: str = "trivial", mode: str = "geometric"):
        if group not in ("trivial", "symmetric"):
            raise ValueError(group)
        if mode not in ("geometric", "standard"):
            raise ValueError(mode)
        self.A = algebra
        self.group = [algebra.identity] if group == "trivial" else list(range(len(algebra.group_elems)))
        self.mode = mode
        self._reps: dict[tuple[int, int], list] = {}
        self._transport: dict[tuple, tuple] = {}

    def chi(self, g: int, b: int) -> int:
        if self.mode == "standard" and b % 2:
            return self.A.signs[g]
        return 1

    def _canon(self, tau: tuple[int, ...]) -> tuple[tuple[int, ...], list[int]]:
        conj = self.A.conj
        best = None
        hs: list[int] = []
        for g in self.group:
            row = conj[g]
            img = tuple(row[x] for x in tau)
            if best is None or img < best:
                best, hs = img, [g]
            elif img == best:
                hs.append(g)
        return best, hs

    def reps(self, a: int, b: int) -> list:
        """Representative blocks (kappa, tau, stabilizer, size, class key)."""
        key = (a, b)
        if key in self._reps:
            return self._reps[key]
        A = self.A
        out = []
        for kappa in compositions(b, a, A.top):
            choices = [A.grades_by_degree.get(k, []) for k in kappa]
            if any(not c for c in choices):
                continue
            for tau in product(*choices):
                rep, hs = self._canon(tau)
                if rep != tau:
                    continue
                size = 1
                for k, g in zip(kappa, tau):
                    size *= len(A.blocks[(k, g)])
                total = A.identity
                for g in tau:
                    total = A.mul_table[total][g]
                cls = self._canon((total,))[0][0]
                out.append((kappa, tau, hs, size, cls))
        self._reps[key] = out
        return out

    def transport(self, kappa: tuple[int, ...], tau: tuple[int, ...]):
        key = (kappa, tau)
        hit = self._transport.get(key)
        if hit is None:
            rep, _ = self._canon(tau)
            conj = self.A.conj
            hs = [g for g in self.group if tuple(conj[g][x] for x in tau) == rep]
            hit = (kappa, rep, hs)
            self._transport[key] = hit
        return hit

    def invariant_dim(self, a: int, b: int) -> int:
        """dim of the invariant chains, from characters of the stabilizers."""
        if a == 0:
            return 1 if b == 0 else 0
        A = self.A
        total = Fraction(0)
        for kappa, tau, stab, size, _ in self.reps(a, b):
            if len(stab) == 1:
                total += size
                continue
            s = Fraction(0)
            for g in stab:
                t = self.chi(g, b)
                for k, gr in zip(kappa, tau):
                    t *= A.trace(g, k, gr)
                    if not t:
                        break
                s += t
            total += s / len(stab)
        if total.denominator != 1:
            raise ArithmeticError("non-integral invariant dimension")
        return int(total)

    def differential(self, a: int, b: int, class_key: int | None = None):
        """Columns of the reduced differential from (a, b) to (a-1, b).

        Returns (columns, target_size, class_keys_of_columns, target_offsets):
        columns are dicts of global target index -> exact coefficient.
        """
        A = self.A
        targets = self.reps(a - 1, b) if a > 1 else []
        offsets: dict[tuple, int] = {}
        tsize = 0
        for kappa, tau, _, size, cls in targets:
            if class_key is not None and cls != class_key:
                continue
            offsets[(kappa, tau)] = tsize
            tsize += size
        strides_cache: dict[tuple, tuple] = {}

        def strides(kappa, tau):
            hit = strides_cache.get((kappa, tau))
            if hit is None:
                st = []
                acc = 1
                for k, g in reversed(list(zip(kappa, tau))):
                    st.append(acc)
                    acc *= len(A.blocks[(k, g)])
                hit = tuple(reversed(st))
                strides_cache[(kappa, tau)] = hit
            return hit

        columns = []
        col_classes = []
        for kappa, tau, stab, size, cls in self.reps(a, b):
            if class_key is not None and cls != class_key:
                continue
            word_lists = [A.blocks[(k, g)] for k, g in zip(kappa, tau)]
            # merge targets depend only on the position
            merges = []
            for i in range(a - 1):
                k2 = kappa[:i] + (kappa[i] + kappa[i + 1],) + kappa[i + 2:]
                g2 = A.mul_table[tau[i]][tau[i + 1]]
                t2 = tau[:i] + (g2,) + tau[i + 2:]
                if (kappa[i] + kappa[i + 1], g2) not in A.blocks:
                    merges.append(None)
                    continue
                tk, rep, hs = self.transport(k2, t2)
                off = offsets.get((tk, rep))
                if off is None:
                    merges.append(None)
                    continue
                merges.append((off, strides(tk, rep), hs))
            scale = Fraction(1, len(stab) ** 2) if len(stab) > 1 else 1
            for x in product(*word_lists):
                col: dict[int, object] = {}
                for s in stab:
                    cs = self.chi(s, b)
                    for y, cy in _act_chain(A, s, x):
                        cy *= cs
                        for i, mg in enumerate(merges):
                            if mg is None:
                                continue
                            prod_terms = A.multiply(y[i], y[i + 1])
                            if not prod_terms:
                                continue
                            off, st, hs = mg
                            sgn = -cy if i % 2 == 0 else cy  # (-1)^(i+1) with 0-based i
                            for u, cu in prod_terms:
                                z = y[:i] + (u,) + y[i + 2:]
                                for h in hs:
                                    ch = self.chi(h, b) * sgn * cu
                                    for zz, cz in _act_chain(A, h, z):
                                        idx = off
                                        for w, stride in zip(zz, st):
                                            idx += A.local[w] * stride
                                        v = col.get(idx, 0) + ch * cz
                                        if v:
                                            col[idx] = v
                                        else:
                                            col.pop(idx, None)
                if scale != 1:
                    col = {k: v * scale for k, v in col.items()}
                columns.append(col)
                col_classes.append(cls)
        return columns, tsize, col_classes, offsets

    def class_keys(self, a: int, b: int) -> list[int]:
        return sorted({r[4] for r in self.reps(a, b)})

    def rank(self, a: int, b: int, seed: int = 0, exact_limit: int = linalg.EXACT_LIMIT):
        """Rank of the reduced differential out of bidegree (a, b), split by the
        conjugacy class of the total grade; returns (rank, method)."""
        if a <= 1:
            return 0, "exact"
        total = 0
        method = "exact"
        for cls in self.class_keys(a, b):
            cols, tsize, _, _ = self.differential(a, b, cls)
            cols = [c for c in cols if c]
            if not cols or not tsize:
                continue
            res = linalg.certified_rank(cols, tsize, seed=seed, exact_limit=exact_limit)
            total += res.rank
            if res.method != "exact":
                method = res.label
        return total, method


def _act_chain(A: _Algebra, g: int, x: Chain):
    if g == A.identity:
        return ((x, 1),)
    out = [((), 1)]
    for w in x:
        terms = A.act(g, w)
        out = [(c + (u,), cc * cu) for c, cc in out for u, cu in terms]
    return out


def homology_table(bar: BarComplex, a_max: int, b_max: int, seed: int = 0,
                   exact_limit: int = linalg.EXACT_LIMIT) -> BigradedTable:
    start = time.perf_counter()
    entries: dict[tuple[int, int], int] = {(0, 0): 1}
    methods: dict[tuple[int, int], str] = {(0, 0): "exact"}
    for b in range(1, b_max + 1):
        top_a = min(a_max + 1, b)
        ranks = {}
        labels = {}
        for a in range(1, top_a + 1):
            ranks[a], labels[a] = bar.rank(a, b, seed, exact_limit)
        ranks[top_a + 1] = 0
        labels[top_a + 1] = "exact"
        for a in range(1, min(a_max, b) + 1):
            dim = bar.invariant_dim(a, b)
            entries[(a, b)] = dim - ranks[a] - ranks.get(a + 1, 0)
            m = {labels[a], labels.get(a + 1, "exact")}
            methods[(a, b)] = "exact" if m == {"exact"} else "certified modulo prime choice"
    return BigradedTable(entries, methods, time.perf_counter() - start)


def bar_differential(rs: RewriteSystem, a: int, b: int):
    """Full (non-reduced) bar differential from (a, b)-chains to (a-1, b)-chains.

    Returns (columns, source_basis, target_basis) with columns as dicts
    target index -> exact coefficient.
    """
    if b > rs.completed_to:
        raise ValueError("rewrite system not completed to the internal degree")
    src = chain_basis(rs, a, b)
    tgt = chain_basis(rs, a - 1, b) if a >= 1 else []
    index = {c: k for k, c in enumerate(tgt)}
    cols = []
    for x in src:
        col: dict[int, Fraction] = {}
        for i in range(a - 1):
            sign = -1 if i % 2 == 0 else 1
            for u, c in rs.multiply(x[i], x[i + 1]).items():
                z = x[:i] + (u,) + x[i + 2:]
                k = index[z]
                v = col.get(k, 0) + sign * c
                if v:
                    col[k] = v
                else:
                    col.pop(k)
        cols.append(col)
    return cols, src, tgt


def chain_basis(rs: RewriteSystem, a: int, b: int) -> list[Chain]:
    if a == 0:
        return [()] if b == 0 else []
    top = rs.dims.top_degree
    out = []
    for kappa in compositions(b, a, top):
        out.extend(product(*[rs.normal[k] for k in kappa]))
    return out


def compose_zero(first: list[dict], second: list[dict]) -> bool:
    """True when applying `first` (as columns) after `second` gives zero."""
    for col in second:
        acc: dict[int, Fraction] = {}
        for k, v in col.items():
            for kk, vv in first[k].items():
                acc[kk] = acc.get(kk, 0) + v * vv
        if any(acc.values()):
            return False
    return True


# ------------------------------------------------------------------ entry points

def _check_budget(d: int, b_max: int, table: dict, what: str, override: bool) -> None:
    if override:
        return
    limit = table.get(d)
    if limit is None or b_max > limit:
        raise BudgetExceeded(f"{what} for d={d} limited to b <= {limit}")


def ext_dims(d: int, a_max: int, b_max: int, seed: int = 0, override_budget: bool = False,
             rs: RewriteSystem | None = None) -> BigradedTable:
    """dim Tor_{a,b} = dim Ext^{a,b} of B_d over k, for a <= a_max, b <= b_max."""
    _check_budget(d, b_max, EXACT_BUDGET, "ext_dims", override_budget)
    bar = BarComplex(nichols_algebra(d, rs), "trivial")
    return homology_table(bar, a_max, b_max, seed)


def invariant_ext_dims(d: int, mode: str = "geometric", a_max: int | None = None, b_max: int = 6,
                       seed: int = 0, override_budget: bool = False,
                       rs: RewriteSystem | None = None) -> BigradedTable:
    """dim of the S_d-invariants of Ext^{a,b}(k, k) for the given action."""
    _check_budget(d, b_max, INVARIANT_BUDGET, "invariant_ext_dims", override_budget)
    bar = BarComplex(nichols_algebra(d, rs), "symmetric", mode)
    return homology_table(bar, b_max if a_max is None else a_max, b_max, seed)


@dataclass
class BosonizationReport:
    d: int
    b_max: int
    passed: bool
    even_mismatches: list[tuple[int, int]]
    odd_differences: list[tuple[int, int]]
    geometric: BigradedTable
    standard: BigradedTable


def bosonization_even_check(d: int, b_max: int, seed: int = 0, geometric: BigradedTable | None = None,
                            standard: BigradedTable | None = None) -> BosonizationReport:
    geo = geometric or invariant_ext_dims(d, "geometric", b_max=b_max, seed=seed)
    std = standard or invariant_ext_dims(d, "standard", b_max=b_max, seed=seed)
    even_bad, odd_diff = [], []
    for (a, b) in sorted(set(geo.entries) | set(std.entries)):
        if b > b_max:
            continue
        if geo[(a, b)] != std[(a, b)]:
            (even_bad if b % 2 == 0 else odd_diff).append((a, b))
    return BosonizationReport(d, b_max, not even_bad, even_bad, odd_diff, geo, std)


def euler_characteristic_check(table: BigradedTable, d: int, b_max: int) -> list[int]:
    """Internal degrees b where sum_a (-1)^a dim Tor_{a,b} differs from [t^b] 1/H(t)."""
    from .nichols import hilbert_target

    h = hilbert_target(d)
    inv = [Fraction(0)] * (b_max + 1)
    inv[0] = Fraction(1)
    for n in range(1, b_max + 1):
        inv[n] = -sum(h[k] * inv[n - k] for k in range(1, min(n, len(h) - 1) + 1))
    bad = []
    for b in range(b_max + 1):
        s = sum((-1) ** a * v for (a, bb), v in table.entries.items() if bb == b)
        if s != inv[b]:
            bad.append(b)
    return bad


def predicted_invariant_table(d: int, b_max: int) -> dict[tuple[int, int], int]:
    return qseries.cohomology_table(d, b_max, b_max)


def compare_with_zeta(table: BigradedTable, d: int, b_max: int) -> list[dict]:
    pred = predicted_invariant_table(d, b_max)
    rows = []
    for b in range(b_max + 1):
        for a in range(b + 1):
            got = table[(a, b)]
            exp = pred.get((a, b), 0)
            if got == 0 and exp == 0 and (a, b) not in table.entries:
                continue
            rows.append({"a": a, "b": b, "invariant_dim": got, "predicted": exp,
                         "verdict": "match" if got == exp else "mismatch"})
    return rows


# --------------------------------------------------------- shuffle-algebra Ext

def shuffle_ext_small(d: int, n_max: int, override_budget: bool = False) -> BigradedTable:
    """Ext^{a,n} over the quantum shuffle algebra truncated at degree n_max.

    The algebra in degree k is all of V^{(x)k} with the shuffle product; the
    normalized bar complex is built on words and ranked exactly.
    """
    if not override_budget and (d != 3 or n_max > 4):
        raise BudgetExceeded("shuffle_ext_small is limited to d=3, n <= 4")
    m = alphabet(d).size
    words = [[()]] + [list(product(range(m), repeat=k)) for k in range(1, n_max + 1)]
    cache: dict[tuple[Word, Word], dict] = {}

    def mult(u: Word, v: Word) -> dict:
        key = (u, v)
        hit = cache.get(key)
        if hit is None:
            if len(u) + len(v) > n_max:
                hit = {}
            else:
                hit = shuffle_product(TensorElem.word(d, u), TensorElem.word(d, v)).terms
            cache[key] = hit
        return hit

    alg = _Algebra(d, words, mult, None)
    alg.top = n_max
    bar = BarComplex(alg, "trivial")
    return homology_table(bar, n_max, n_max)

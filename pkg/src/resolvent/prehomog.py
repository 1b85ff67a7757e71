"""Binary cubic forms and pairs of ternary quadratic forms over F_p and F_p[t]/t^N.

Ring elements are tuples of N integers in [0, p) (coefficients of 1, t, ...,
t^(N-1)).  These are the slow, readable reference implementations; the
counting hot loops live in the compiled kernels.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ._resolvent_table import RESOLVENT_TERMS

Elem = tuple[int, ...]
GE_N = "≥N"


class NonUnitDeterminant(ValueError):
    pass


class ConstraintViolation(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class CoeffRing:
    p: int
    N: int = 1

    def __post_init__(self):
        if not _is_prime(self.p) or self.p % 2 == 0 or self.p % 3 == 0:
            raise ValueError(f"p={self.p} must be a prime coprime to 6")
        if self.N < 1:
            raise ValueError("truncation order must be positive")

    @property
    def kind(self) -> str:
        return "field" if self.N == 1 else "truncated"

    @classmethod
    def parse(cls, spec: str) -> "CoeffRing":
        """'fp:5' or 'fpt:5:3' (F_5[t]/t^3)."""
        parts = spec.split(":")
        if parts[0] == "fp" and len(parts) == 2:
            return cls(int(parts[1]), 1)
        if parts[0] == "fpt" and len(parts) == 3:
            return cls(int(parts[1]), int(parts[2]))
        raise ValueError(f"bad ring spec {spec!r}")

    def __str__(self) -> str:
        return f"fp:{self.p}" if self.N == 1 else f"fpt:{self.p}:{self.N}"

    # -- elements
    def elem(self, x) -> Elem:
        if isinstance(x, int):
            return ((x % self.p),) + (0,) * (self.N - 1)
        x = tuple(int(c) % self.p for c in x)
        if len(x) > self.N:
            x = x[: self.N]
        return x + (0,) * (self.N - len(x))

    @property
    def zero(self) -> Elem:
        return (0,) * self.N

    @property
    def one(self) -> Elem:
        return self.elem(1)

    def t_power(self, k: int) -> Elem:
        out = [0] * self.N
        if k < self.N:
            out[k] = 1
        return tuple(out)

    def add(self, x: Elem, y: Elem) -> Elem:
        return tuple((a + b) % self.p for a, b in zip(x, y))

    def sub(self, x: Elem, y: Elem) -> Elem:
        return tuple((a - b) % self.p for a, b in zip(x, y))

    def neg(self, x: Elem) -> Elem:
        return tuple((-a) % self.p for a in x)

    def mul(self, x: Elem, y: Elem) -> Elem:
        n, p = self.N, self.p
        return tuple(sum(x[i] * y[k - i] for i in range(k + 1)) % p for k in range(n))

    def scale(self, c: int, x: Elem) -> Elem:
        return tuple((c * a) % self.p for a in x)

    def is_unit(self, x: Elem) -> bool:
        return x[0] % self.p != 0

    def inv(self, x: Elem) -> Elem:
        if not self.is_unit(x):
            raise NonUnitDeterminant("element is not a unit")
        p = self.p
        i0 = pow(x[0], -1, p)
        out = [i0]
        for k in range(1, self.N):
            s = sum(x[i] * out[k - i] for i in range(1, k + 1))
            out.append((-i0 * s) % p)
        return tuple(out)

    def random(self, rng: random.Random) -> Elem:
        return tuple(rng.randrange(self.p) for _ in range(self.N))

    def random_unit(self, rng: random.Random) -> Elem:
        while True:
            x = self.random(rng)
            if self.is_unit(x):
                return x

    def sum(self, xs) -> Elem:
        out = self.zero
        for x in xs:
            out = self.add(out, x)
        return out


def valuation(x: Elem):
    """Index of the first nonzero coefficient, or GE_N for zero."""
    for k, c in enumerate(x):
        if c:
            return k
    return GE_N


# ------------------------------------------------------------------- vectors

@dataclass(frozen=True)
class BinaryCubic:
    """a x^3 + b x^2 y + c x y^2 + d y^3."""

    ring: CoeffRing
    a: Elem
    b: Elem
    c: Elem
    d: Elem

    @classmethod
    def of(cls, ring: CoeffRing, coeffs: Sequence) -> "BinaryCubic":
        if len(coeffs) != 4:
            raise ValueError("a binary cubic has 4 coefficients")
        return cls(ring, *(ring.elem(c) for c in coeffs))

    def coeffs(self) -> tuple[Elem, Elem, Elem, Elem]:
        return (self.a, self.b, self.c, self.d)

    def flat(self) -> list[int]:
        """Kernel layout: coordinate-major, var * N + k."""
        return [c for e in self.coeffs() for c in e]


_QUAD_FIELDS = ("00", "11", "22", "01", "02", "12")
# kernel/table order: 00 01 02 11 12 22
_TABLE_ORDER = ("00", "01", "02", "11", "12", "22")


@dataclass(frozen=True)
class TernaryQuadPair:
    """Two forms sum_{i<=j} a_ij x_i x_j and sum_{i<=j} b_ij x_i x_j."""

    ring: CoeffRing
    A: dict
    B: dict

    @classmethod
    def of(cls, ring: CoeffRing, a: dict | Sequence, b: dict | Sequence) -> "TernaryQuadPair":
        """a, b: dicts keyed '00','11','22','01','02','12', or sequences in that order."""
        def norm(x):
            if not isinstance(x, dict):
                x = dict(zip(_QUAD_FIELDS, x))
            return {k: ring.elem(x.get(k, 0)) for k in _QUAD_FIELDS}
        return cls(ring, norm(a), norm(b))

    def __hash__(self):
        return hash((self.ring, tuple(self.A[k] for k in _QUAD_FIELDS), tuple(self.B[k] for k in _QUAD_FIELDS)))

    def __eq__(self, other):
        return (isinstance(other, TernaryQuadPair) and self.ring == other.ring
                and self.A == other.A and self.B == other.B)

    def table_coords(self) -> list[Elem]:
        return [self.A[k] for k in _TABLE_ORDER] + [self.B[k] for k in _TABLE_ORDER]

    def flat(self) -> list[int]:
        return [c for e in self.table_coords() for c in e]


PrehomVector = BinaryCubic | TernaryQuadPair


# ------------------------------------------------------------ discriminants

def disc3(f: BinaryCubic) -> Elem:
    """b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd."""
    R = f.ring
    a, b, c, d = f.coeffs()
    m = R.mul
    bb, cc = m(b, b), m(c, c)
    terms = [
        m(bb, cc),
        R.scale(-4, m(m(a, cc), c)),
        R.scale(-4, m(m(bb, b), d)),
        R.scale(-27, m(m(a, a), m(d, d))),
        R.scale(18, m(m(a, b), m(c, d))),
    ]
    return R.sum(terms)


def resolvent_cubic(v: TernaryQuadPair) -> BinaryCubic:
    """The binary cubic 4 det(A x - B y) from its pre-expanded integer formula."""
    R = v.ring
    xs = v.table_coords()
    coeffs = []
    for block in RESOLVENT_TERMS:
        acc = R.zero
        for c, i, j, l in block:
            acc = R.add(acc, R.scale(c, R.mul(R.mul(xs[i], xs[j]), xs[l])))
        coeffs.append(acc)
    return BinaryCubic(R, *coeffs)


def disc4(v: TernaryQuadPair) -> Elem:
    return disc3(resolvent_cubic(v))


# ------------------------------------------------------------------ groups

Mat = tuple[tuple[Elem, ...], ...]


def _det2(R: CoeffRing, g: Mat) -> Elem:
    return R.sub(R.mul(g[0][0], g[1][1]), R.mul(g[0][1], g[1][0]))


def _det3(R: CoeffRing, g: Mat) -> Elem:
    m = R.mul
    t = R.zero
    for (i, j, k), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        t = R.add(t, R.scale(s, m(m(g[0][i], g[1][j]), g[2][k])))
    return t


def _matmul(R: CoeffRing, g: Mat, h: Mat) -> Mat:
    n = len(g)
    return tuple(tuple(R.sum(R.mul(g[i][k], h[k][j]) for k in range(n)) for j in range(n))
                 for i in range(n))


@dataclass(frozen=True)
class GroupElem3:
    ring: CoeffRing
    g: Mat

    def __post_init__(self):
        if not self.ring.is_unit(self.det()):
            raise NonUnitDeterminant("determinant is not a unit")

    @classmethod
    def of(cls, ring: CoeffRing, rows) -> "GroupElem3":
        return cls(ring, tuple(tuple(ring.elem(x) for x in r) for r in rows))

    def det(self) -> Elem:
        return _det2(self.ring, self.g)

    def __mul__(self, other: "GroupElem3") -> "GroupElem3":
        return GroupElem3(self.ring, _matmul(self.ring, self.g, other.g))

    def character(self) -> Elem:
        return self.det()


@dataclass(frozen=True)
class GroupElem4:
    ring: CoeffRing
    g3: Mat
    g2: Mat

    def __post_init__(self):
        R = self.ring
        d3, d2 = _det3(R, self.g3), _det2(R, self.g2)
        if not R.is_unit(d3):
            raise NonUnitDeterminant("determinant is not a unit")
        if d3 != d2:
            raise ConstraintViolation("det g3 must equal det g2")

    @classmethod
    def of(cls, ring: CoeffRing, g3_rows, g2_rows) -> "GroupElem4":
        conv = lambda rows: tuple(tuple(ring.elem(x) for x in r) for r in rows)  # noqa: E731
        return cls(ring, conv(g3_rows), conv(g2_rows))

    def det(self) -> Elem:
        return _det3(self.ring, self.g3)

    def __mul__(self, other: "GroupElem4") -> "GroupElem4":
        R = self.ring
        return GroupElem4(R, _matmul(R, self.g3, other.g3), _matmul(R, self.g2, other.g2))

    def character(self) -> Elem:
        return self.det()


def random_group3(ring: CoeffRing, rng: random.Random) -> GroupElem3:
    while True:
        g = tuple(tuple(ring.random(rng) for _ in range(2)) for _ in range(2))
        if ring.is_unit(_det2(ring, g)):
            return GroupElem3(ring, g)


def random_group4(ring: CoeffRing, rng: random.Random) -> GroupElem4:
    R = ring
    g2 = random_group3(R, rng).g
    while True:
        g3 = tuple(tuple(R.random(rng) for _ in range(3)) for _ in range(3))
        d3 = _det3(R, g3)
        if R.is_unit(d3):
            break
    fix = R.mul(_det2(R, g2), R.inv(d3))
    g3 = (tuple(R.mul(fix, x) for x in g3[0]), g3[1], g3[2])
    return GroupElem4(R, g3, g2)


def random_cubic(ring: CoeffRing, rng: random.Random) -> BinaryCubic:
    return BinaryCubic(ring, *(ring.random(rng) for _ in range(4)))


def random_pair(ring: CoeffRing, rng: random.Random) -> TernaryQuadPair:
    return TernaryQuadPair(ring, {k: ring.random(rng) for k in _QUAD_FIELDS},
                           {k: ring.random(rng) for k in _QUAD_FIELDS})


# ----------------------------------------------------------------- actions

def _poly_mul(R: CoeffRing, f: list[Elem], g: list[Elem]) -> list[Elem]:
    out = [R.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = R.add(out[i + j], R.mul(a, b))
    return out


def act3(g: GroupElem3, f: BinaryCubic) -> BinaryCubic:
    """(g.f)(x, y) = det(g)^-1 f((x, y) g)."""
    R = f.ring
    (g11, g12), (g21, g22) = g.g
    X = [g11, g21]  # x g11 + y g21, coefficients of x, y
    Y = [g12, g22]
    out = [R.zero] * 4
    for k, c in enumerate(f.coeffs()):
        term = [c]
        for _ in range(3 - k):
            term = _poly_mul(R, term, X)
        for _ in range(k):
            term = _poly_mul(R, term, Y)
        out = [R.add(o, t) for o, t in zip(out, term)]
    inv = R.inv(g.det())
    return BinaryCubic(R, *(R.mul(inv, o) for o in out))


def _substitute_quad(R: CoeffRing, form: dict, g: Mat) -> dict:
    """Q(x) -> Q(x g) for a ternary form keyed 'ij'."""
    out = {k: R.zero for k in _QUAD_FIELDS}
    for key, a in form.items():
        i, j = int(key[0]), int(key[1])
        for k in range(3):
            for l in range(3):
                c = R.mul(a, R.mul(g[k][i], g[l][j]))
                kk = f"{min(k, l)}{max(k, l)}"
                out[kk] = R.add(out[kk], c)
    return out


def act4(g: GroupElem4, v: TernaryQuadPair) -> TernaryQuadPair:
    """Substitute x -> x g3 in both forms, then mix the pair by g2^-T."""
    R = v.ring
    A = _substitute_quad(R, v.A, g.g3)
    B = _substitute_quad(R, v.B, g.g3)
    (p11, p12), (p21, p22) = g.g2
    inv = R.inv(_det2(R, g.g2))
    # g2^-T = det^-1 [[p22, -p21], [-p12, p11]]
    m11, m12 = R.mul(inv, p22), R.mul(inv, R.neg(p21))
    m21, m22 = R.mul(inv, R.neg(p12)), R.mul(inv, p11)
    A2 = {k: R.add(R.mul(m11, A[k]), R.mul(m12, B[k])) for k in _QUAD_FIELDS}
    B2 = {k: R.add(R.mul(m21, A[k]), R.mul(m22, B[k])) for k in _QUAD_FIELDS}
    return TernaryQuadPair(R, A2, B2)


def disc(v: PrehomVector) -> Elem:
    return disc3(v) if isinstance(v, BinaryCubic) else disc4(v)


def act(g, v: PrehomVector) -> PrehomVector:
    return act3(g, v) if isinstance(v, BinaryCubic) else act4(g, v)


def parse_coeffs(ring: CoeffRing, text: str) -> list[Elem]:
    """Comma-separated coefficients; each is an integer or ':'-separated t-coefficients."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if ":" in tok:
            out.append(ring.elem([int(x) for x in tok.split(":")]))
        else:
            out.append(ring.elem(int(tok)))
    return out


def format_elem(ring: CoeffRing, x: Elem) -> str:
    if ring.N == 1:
        return str(x[0])
    return ":".join(str(c) for c in x)

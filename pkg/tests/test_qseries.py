from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from resolvent import qseries as Q
from resolvent.qseries import LaurentQPoly

q_, t_ = sp.symbols("q t")
F_SYMPY = (1 + t_**2 + t_**3 + t_**4 - 2 * t_**5 + 2 * q_ * t_**6 + (q_ - 1) * t_**7 + q_ * t_**8
           - q_ * t_**9 + (q_ - 1) * q_ * t_**10 - 2 * q_ * t_**11 + 2 * q_**2 * t_**12 - q_**2 * t_**13
           - q_**2 * t_**14 - q_**2 * t_**15 - q_**2 * t_**17)
# numerator and denominator monomials q^a t^b of 1/(1 - q^a t^b)
I_SYMPY = {
    3: (1 + t_ + t_**2 + t_**3 + t_**4, [(0, 2), (1, 6)]),
    4: (F_SYMPY, [(0, 1), (0, 2), (1, 6), (2, 8), (3, 12)]),
}


def _truncate(expr, order):
    p = sp.Poly(sp.expand(expr), t_)
    return sum((c * t_**m[0] for m, c in p.terms() if m[0] <= order), sp.Integer(0))


def sympy_coeffs(num, factors, order, subs=None):
    """t-coefficients of num / prod(1 - q^a t^b) by truncated geometric series in sympy."""
    acc = _truncate(num, order)
    for a, b in factors:
        mono = q_**a * t_**b
        if subs:
            mono = mono.subs(subs, simultaneous=True)
        geo = sum(mono**k for k in range(order // b + 1))
        acc = _truncate(acc * geo, order)
    out = []
    for b in range(order + 1):
        c = sp.expand(sp.Poly(acc, t_).coeff_monomial(t_**b) * q_**80)
        pq = sp.Poly(c, q_) if c != 0 else None
        terms = {} if pq is None else {m[0] - 80: Fraction(int(v.p), int(v.q)) for m, v in pq.terms()}
        out.append(LaurentQPoly(terms))
    return out


def poly(*cs):
    return LaurentQPoly({k: c for k, c in enumerate(cs)})


@pytest.fixture(scope="module")
def oracle4():
    return sympy_coeffs(*I_SYMPY[4], 20)


def test_i3_first_terms_by_hand():
    hand = [poly(1), poly(1), poly(2), poly(2), poly(3), poly(2), poly(3, 1), poly(2, 1), poly(3, 2),
            poly(2, 2), poly(3, 3)]
    assert Q.local_table(3, 10).coeffs == hand


def test_i3_matches_sympy():
    assert Q.local_table(3, 24).coeffs == sympy_coeffs(*I_SYMPY[3], 24)


def test_i4_matches_sympy(oracle4):
    assert Q.local_table(4, 20).coeffs == oracle4


def test_i4_degree_profile_frozen():
    assert Q.degree_profile(4, 20) == [0, 0, 0, 0, 0, 0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 5]


def test_global_substitution_d3_matches_printed_form():
    num = 1 + q_ * t_ + q_**2 * t_**2 + q_**3 * t_**3 + q_**4 * t_**4
    assert Q.global_table(3, 18).coeffs == sympy_coeffs(num, [(2, 2), (5, 6)], 18)


def test_cohomology_substitution_d3():
    num = 1 + q_ * t_ + q_**2 * t_**2 + q_**3 * t_**3 + q_**4 * t_**4
    assert Q.cohomology_series(3, 18).coeffs == sympy_coeffs(num, [(2, 2), (4, 6)], 18)


def test_substitutions_against_sympy_d4():
    num, factors = I_SYMPY[4]
    sub = {q_: 1 / q_, t_: q_ * t_}
    assert Q.global_table(4, 20).coeffs == sympy_coeffs(num.subs(sub, simultaneous=True), factors, 20, sub)


def test_global_d3_b2():
    assert Q.global_table(3, 2)[2] == LaurentQPoly({2: 2})


@pytest.mark.parametrize("d", [3, 4])
def test_substitute_commutes_with_expand(d):
    r = Q.igusa_rational(d)
    for spec in (Q.GLOBAL, Q.COHOMOLOGY):
        assert Q.expand(Q.substitute(r, spec), 30).coeffs == Q.expand(r, 30).substitute(spec).coeffs


def test_unsupported_degree():
    with pytest.raises(Q.UnsupportedDegree):
        Q.igusa_rational(5)
    with pytest.raises(Q.UnsupportedDegree):
        Q.igusa_rational(2)


def test_cohomology_table_entries():
    assert Q.cohomology_table(3, 4, 4)[(2, 2)] == 2
    assert Q.cohomology_table(4, 4, 4)[(2, 2)] == 3
    assert Q.cohomology_table(3, 0, 0) == {(0, 0): 1}


def test_betti_examples():
    assert Q.betti_numbers(3, 6) == [3, 0, 1]
    assert Q.betti_numbers(3, 0) == [1]


@given(d=st.sampled_from([3, 4]), b=st.integers(0, 40))
def test_betti_reassemble(d, b):
    betti = Q.betti_numbers(d, b)
    assert all(v == 0 for v in betti[1::2])
    assert LaurentQPoly({i // 2: v for i, v in enumerate(betti) if i % 2 == 0}) == Q.local_table(d, b)[b]


def test_degree_profile_d3():
    assert Q.degree_profile(3, 60) == [b // 6 for b in range(61)]
    assert Q.degree_profile(3, 6)[5] == 0 and Q.degree_profile(3, 6)[6] == 1


def test_degree_profile_d4_bounded():
    prof = Q.degree_profile(4, 60)
    assert all(prof[b] <= b // 4 for b in range(61))
    assert [b for b in range(61) if prof[b] == b // 4] == [b for b in range(61) if b not in (4, 5)]


def test_recurrence_check_examples():
    g = Q.global_table(4, 60)
    den = Q.substitute(Q.igusa_rational(4), Q.GLOBAL).denominator
    assert Q.recurrence_check(g, den)
    assert not Q.recurrence_check(g, Q.BiPoly({(0, 0): 1, (0, 1): -1}))
    assert Q.recurrence_check(Q.TruncatedTSeries.zero(60), den)


def test_recurrence_check_with_numerator_degree():
    r = Q.substitute(Q.igusa_rational(4), Q.GLOBAL)
    k = r.numerator.t_degree()
    s = Q.global_table(4, k + 2 * r.denominator.t_degree())
    assert Q.recurrence_check(s, r.denominator, numerator_degree=k)
    with pytest.raises(Q.ExpandFurther):
        Q.recurrence_check(Q.global_table(4, 60), r.denominator, numerator_degree=k)
    with pytest.raises(Q.ExpandFurther):
        Q.recurrence_check(Q.global_table(4, 10), r.denominator)


def test_denominator_slopes():
    assert Q.denominator_slopes(3) == {0, Fraction(1, 6)}
    assert Q.denominator_slopes(4) == {0, Fraction(1, 6), Fraction(1, 4)}
    assert Q.denominator_slopes(Q.RationalQT(Q.BiPoly({(0, 0): 1}))) == {0}


def test_conjecture5_examples():
    assert Q.conjecture5_check(Q.local_table(3, 40), "b")
    s = Q.TruncatedTSeries(2, [poly(1), LaurentQPoly(), LaurentQPoly({1: 1})])
    assert not Q.conjecture5_check(s, "a")
    assert Q.conjecture5_check(Q.TruncatedTSeries(0, [poly(1)]), "a")
    with pytest.raises(ValueError):
        Q.conjecture5_check(Q.TruncatedTSeries(1, [poly(1), poly(-1)]), "a")
    with pytest.raises(ValueError):
        Q.conjecture5_check(Q.TruncatedTSeries(0, [poly(1)]), "c")


def test_secondary_d4():
    rep = Q.secondary_term_check(4, 220)
    assert rep.passed and rep.period == 24 and len(rep.fitted) == 24


def test_secondary_d3():
    rep = Q.secondary_term_check(3, 60)
    assert rep.passed and rep.period == 6


def test_secondary_detects_perturbation():
    s = Q.global_table(4, 220)
    s.coeffs[100] = s.coeffs[100] + Q.ONE
    rep = Q.secondary_term_check(4, 220, series=s)
    assert not rep.passed and rep.first_failure == 100


@pytest.mark.parametrize("d", [3, 4])
def test_duality(d):
    assert Q.duality_holds(d, 30)


@pytest.mark.parametrize("d", [3, 4])
def test_nonnegative_integral(d):
    for table in (Q.local_table, Q.global_table, Q.cohomology_series):
        assert Q.nonnegative_integral(table(d, 40))


def test_json_roundtrip():
    s = Q.global_table(4, 12)
    back = Q.TruncatedTSeries.from_json(s.to_json(d=4, kind="global"))
    assert back.coeffs == s.coeffs
    assert Q.table_rows_csv(Q.local_table(3, 12))[6] == ["6", "0:3;1:1"]


@given(st.dictionaries(st.integers(-5, 5), st.integers(-9, 9), max_size=5),
       st.dictionaries(st.integers(-5, 5), st.integers(-9, 9), max_size=5))
def test_laurent_ring_axioms(a, b):
    x, y = LaurentQPoly(a), LaurentQPoly(b)
    assert x * y == y * x
    assert (x + y) - y == x
    assert LaurentQPoly.from_pairs(x.to_pairs()) == x
    assert (x * y)(3) == x(3) * y(3)

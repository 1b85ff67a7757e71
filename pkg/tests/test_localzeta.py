import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from resolvent import localzeta as L


def test_mu_g():
    assert L.mu_G(3, 5) == Fraction(4, 5) * Fraction(24, 25)
    assert L.mu_G(4, 7) == Fraction(6, 7) * Fraction(48, 49) ** 2 * Fraction(342, 343)
    for bad in ((3, 3), (3, 9), (5, 5), (4, 2)):
        with pytest.raises(ValueError):
            L.mu_G(*bad)


@pytest.mark.parametrize("d,p,b,count,total", [(3, 5, 0, 480, 5**4), (3, 5, 1, 60000, 5**8),
                                                (3, 7, 0, 2016, 7**4)])
def test_exact_counts(d, p, b, count, total):
    r = L.density_exact(d, p, b)
    assert (r.count, r.total) == (count, total)
    assert r.coefficient == L.predicted_coefficient(d, p, b)


@pytest.mark.parametrize("b", [0, 1])
def test_p11_matches_prediction(b):
    r = L.density_exact(3, 11, b)
    assert r.density == L.predicted_density(3, 11, b)


def test_d4_field_count():
    r = L.density_exact(4, 5, 0)
    assert r.count == 5**12 * L.mu_G(4, 5) and r.coefficient == 1


@pytest.mark.parametrize("d,p,n", [(3, 5, 2), (3, 7, 2), (4, 5, 1)])
def test_histogram_mass(d, p, n):
    h = L.exact_histogram(d, p, n)
    assert len(h) == n + 1 and sum(h) == p ** (L.DIM[d] * n)


def test_histogram_refines():
    # counts of val = 0 do not depend on how many t-digits are kept beyond the first
    h1 = L.exact_histogram(3, 5, 1)
    h2 = L.exact_histogram(3, 5, 2)
    assert h2[0] == h1[0] * 5**4 and h2[1] + h2[2] == h1[1] * 5**4


def test_budget():
    with pytest.raises(L.BudgetExceeded):
        L.density_exact(3, 11, 2)
    with pytest.raises(L.BudgetExceeded):
        L.density_exact(4, 5, 0, budget=10**6)


def test_mc_sample_floor():
    with pytest.raises(ValueError):
        L.density_mc(3, 5, 0, 9999, 0)


def test_mc_against_exact():
    exact = float(L.density_exact(3, 5, 1).density)
    r = L.density_mc(3, 5, 1, 200_000, seed=4)
    assert abs(r.density - exact) <= 4 * r.stderr
    assert L.mc_verdict(r)[0] == "within-CI"
    assert sum(r.histogram) == 200_000


def test_mc_reproducible():
    a = L.density_mc(4, 5, 1, 20_000, seed=9)
    b = L.density_mc(4, 5, 1, 20_000, seed=9)
    c = L.density_mc(4, 5, 1, 20_000, seed=10)
    assert a.histogram == b.histogram and a.histogram != c.histogram


def test_mc_verdict_rule_of_three():
    r = L.DensityResult(3, 5, 10, "montecarlo", [0] * 11, 10**4, samples=10**4, hits=0, seed=0)
    assert r.stderr == 0.0
    assert L.mc_verdict(r)[0] == "within-CI"
    r.hits = 100
    assert L.mc_verdict(r)[0] == "mismatch"


def test_synthetic_event_unbiased():
    """Twenty seeded estimates of P(x = 0) = 1/p all fall within 4 sigma."""
    p = 7
    zs = []
    for seed in range(20):
        r = L.synthetic_event_estimate(p, 50_000, seed)
        zs.append((r.density - 1 / p) / r.stderr)
    assert max(abs(z) for z in zs) < 4
    assert abs(sum(zs) / math.sqrt(len(zs))) < 4


def test_compare_local():
    rows = L.compare_local(3, 5, 1, mc_plan=[(2, 50_000, 1)])
    assert [r.verdict for r in rows] == ["match", "match", "within-CI"]
    assert rows[0].expected == "1"


def test_etale_weighted_count():
    assert [L.etale_weighted_count(d) for d in (1, 2, 3, 4)] == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        L.etale_weighted_count(0)


@given(st.sampled_from([5, 7, 11, 13]), st.integers(0, 12))
def test_prediction_is_density(p, b):
    # predicted densities of val = b sum to at most one
    total = sum(L.predicted_density(3, p, k) for k in range(b + 1))
    assert 0 < total <= 1


def test_json_roundtrip():
    for r in (L.density_exact(3, 5, 1), L.density_mc(3, 5, 0, 10_000, 2)):
        data = json.loads(json.dumps(r.to_json()))
        back = L.DensityResult.from_json(data)
        assert back == r
    assert L.density_exact(3, 5, 1).to_json()["coefficient"] == "1"

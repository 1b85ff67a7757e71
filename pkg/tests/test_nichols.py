import itertools
import json
import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from resolvent import nichols as N
from resolvent import perms as P

E = N.TensorElem


def rand_elem(d, deg, rng, terms=3):
    m = N.alphabet(d).size
    return E(d, deg, {tuple(rng.randrange(m) for _ in range(deg)): rng.randint(-3, 3) for _ in range(terms)})


def test_braiding_examples():
    c = N.braiding_eps(3)
    a = N.alphabet(3)
    x, y = a.letter(1, 2), a.letter(2, 3)
    # the left letter gets conjugated by the right one
    assert c.on_pair(x, x) == (-1, x, x)
    assert c.on_pair(x, y) == (-1, y, a.letter(1, 3))
    for bad in (2, 6):
        with pytest.raises(ValueError):
            N.braiding_eps(bad)


def test_braiding_is_signed_permutation():
    # c is a signed permutation matrix of V (x) V
    mat = N.braiding_eps(4).matrix()
    assert all(sum(abs(v) for v in row) == 1 for row in mat)
    assert all(sum(abs(row[j]) for row in mat) == 1 for j in range(len(mat)))


@pytest.mark.parametrize("d", [3, 4, 5])
def test_braid_equation(d):
    assert N.braid_equation_holds(d)


def test_shuffle_units_and_degree_one():
    rng = random.Random(0)
    x = rand_elem(3, 3, rng)
    one = E.scalar(3)
    assert N.shuffle_product(one, x) == x == N.shuffle_product(x, one)
    a = N.alphabet(3)
    u, v = E.word(3, (a.letter(1, 2),)), E.word(3, (a.letter(2, 3),))
    c = N.braiding_eps(3)
    assert N.shuffle_product(u, v) == u.tensor(v) + c(u.tensor(v))


@pytest.mark.parametrize("d", [3, 4])
def test_shuffle_associative(d):
    rng = random.Random(d)
    for _ in range(100):
        x, y, z = (rand_elem(d, rng.randint(0, 2), rng, 2) for _ in range(3))
        assert N.shuffle_product(N.shuffle_product(x, y), z) == N.shuffle_product(x, N.shuffle_product(y, z))


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=40)
def test_shuffle_realizations_agree(seed, m, n):
    rng = random.Random(seed)
    x, y = rand_elem(4, m, rng), rand_elem(4, n, rng)
    assert N.shuffle_product(x, y, "left") == N.shuffle_product(x, y, "right")


@pytest.mark.parametrize("n,dim", [(0, 1), (1, 3), (2, 4), (3, 3), (4, 1), (5, 0)])
def test_symmetrizer_d3(n, dim):
    assert N.quantum_symmetrizer_dim(3, n) == dim


def test_symmetrizer_degree_one():
    for d in (3, 4, 5):
        assert N.quantum_symmetrizer_dim(d, 1) == d * (d - 1) // 2


def test_symmetrizer_modular_matches_exact():
    for n in range(5):
        assert N.quantum_symmetrizer_dim(4, n, "modular") == N.quantum_symmetrizer_dim(4, n, "exact")


def test_symmetrizer_budget():
    with pytest.raises(N.BudgetExceeded):
        N.quantum_symmetrizer_dim(4, 9, "exact")


def test_degree_two_symmetrizer_is_one_plus_c():
    c = N.braiding_eps(4)
    for w, col in N._symmetrizer_columns(4, 2).items():
        e = E.word(4, w)
        assert E(4, 2, col) == e + c(e)


@pytest.mark.parametrize("d,count", [(3, 5), (4, 17)])
def test_relations(d, count):
    rels = N.quadratic_relations(d)
    assert len(rels) == count and rels.span_dim() == count
    c = N.braiding_eps(d)
    assert all((r + c(r)).is_zero() for r in rels.basis)
    assert N.relations_stable(rels, "geometric") and N.relations_stable(rels, "standard")


def test_relations_fill_kernel_of_one_plus_c():
    # dim ker(1+c) in degree 2 = m^2 - rank of the symmetrizer in degree 2
    for d in (3, 4):
        m = N.alphabet(d).size
        assert m * m - N.quantum_symmetrizer_dim(d, 2) == len(N.quadratic_relations(d))


def test_hilbert_target():
    assert N.hilbert_target(3) == [1, 3, 4, 3, 1]
    assert sum(N.hilbert_target(4)) == 576


def test_groebner_dims(rs3, rs4):
    assert rs3.dims.dims[:5] == [1, 3, 4, 3, 1] and rs3.dims.total == 12
    assert rs4.dims.dims[:13] == N.hilbert_target(4)
    assert rs4.dims.total == 576 and rs4.dims.top_degree == 12 and rs4.dims.palindromic()


def test_symmetrizer_matches_groebner_d4(rs4):
    for n in range(7):
        assert N.quantum_symmetrizer_dim(4, n) == rs4.dims.dims[n]


def test_confluence(rs3, rs4):
    assert N.check_confluence(rs3) == []
    assert N.check_confluence(rs4, 6) == []


def test_normal_form(rs4):
    rng = random.Random(5)
    for r in N.quadratic_relations(4).basis:
        assert N.normal_form(rs4, r).is_zero()
    for _ in range(50):
        x = rand_elem(4, rng.randint(2, 6), rng)
        nf = N.normal_form(rs4, x)
        assert N.normal_form(rs4, nf) == nf
        assert N.normal_form(rs4, x, "rewrite") == nf
        assert all(rs4.is_normal(w) for w in nf.terms)
    with pytest.raises(N.DegreeBeyondCompletion):
        N.normal_form(rs4, E.word(4, (0,) * 14))


def test_multiply_associative(rs4):
    rng = random.Random(8)
    norm = [w for k in range(1, 5) for w in rs4.normal[k]]
    for _ in range(60):
        u, v, w = (rng.choice(norm) for _ in range(3))
        left = {}
        for a, c in rs4.multiply(u, v).items():
            for b, e in rs4.multiply(a, w).items():
                left[b] = left.get(b, 0) + c * e
        right = {}
        for a, c in rs4.multiply(v, w).items():
            for b, e in rs4.multiply(u, a).items():
                right[b] = right.get(b, 0) + c * e
        assert {k: x for k, x in left.items() if x} == {k: x for k, x in right.items() if x}


def test_sd_action(rs4):
    ident = N.sd_action(4, P.identity(4))
    w = rs4.normal[3][0]
    assert ident.on_normal(rs4, w) == {w: 1}
    g = P.transposition(1, 2, 4)
    geo, std = N.sd_action(4, g), N.sd_action(4, g, "standard")
    for b in range(5):
        mg, ms = geo.matrix(rs4, b), std.matrix(rs4, b)
        assert ms == [[(-1) ** b * x for x in row] for row in mg]
    with pytest.raises(ValueError):
        N.sd_action(4, g, "weird")


def test_sd_action_is_homomorphism(rs3):
    for g, h in itertools.product(P.all_perms(3), repeat=2):
        A, B, AB = (N.sd_action(3, x).matrix(rs3, 2) for x in (g, h, P.compose(g, h)))
        prod = [[sum(A[i][k] * B[k][j] for k in range(len(A))) for j in range(len(A))] for i in range(len(A))]
        assert prod == AB


def test_rewrite_json_roundtrip(rs3):
    back = N.RewriteSystem.from_json(json.loads(json.dumps(rs3.to_json())))
    assert back.dims.dims == rs3.dims.dims and back.rules.keys() == rs3.rules.keys()
    assert all(back.word_nf(w) == rs3.word_nf(w) for w in itertools.product(range(3), repeat=3))


def test_corrupt_cache_recomputes(tmp_path, caplog):
    path = tmp_path / "groebner" / "bd3.json"
    path.parent.mkdir(parents=True)
    path.write_text("{not json")
    with caplog.at_level(logging.WARNING):
        rs = N.load_or_complete(3, tmp_path)
    assert "unreadable" in caplog.text and rs.dims.total == 12
    assert json.loads(path.read_text())["code_version"]
    again = N.load_or_complete(3, tmp_path)
    assert again.dims.dims == rs.dims.dims

from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as o
from gtyes import gfcodes as gf
from gtyes.model import DomainError

# published Conway polynomials, lowest degree first
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (3, 3): (1, 2, 0, 1),
    (7, 2): (3, 6, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 3): (3, 3, 0, 1),
    (2, 10): (1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1),
}


@pytest.mark.parametrize("pr,poly", CONWAY.items())
def test_conway_values(pr, poly):
    assert gf.conway_polynomial(*pr) == poly


@pytest.mark.parametrize("q,pr", [(2, (2, 1)), (9, (3, 2)), (1024, (2, 10)), (49, (7, 2))])
def test_prime_power(q, pr):
    assert gf.prime_power(q) == pr


@pytest.mark.parametrize("q", [1, 6, 12, 100])
def test_prime_power_rejects(q):
    with pytest.raises(DomainError):
        gf.prime_power(q)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_field_matches_schoolbook(q):
    fld = gf.field_make(q)
    ref = o.PolyField(fld.p, fld.modulus)
    for a, b in product(range(q), repeat=2):
        assert fld.add(a, b) == ref.add(a, b)
        assert fld.mul(a, b) == ref.mul(a, b)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32])
def test_field_axioms(q):
    fld = gf.field_make(q)
    A, M = fld.add_table, fld.mul_table
    idx = np.arange(q)
    assert (A == A.T).all() and (M == M.T).all()
    assert (A[0] == idx).all() and (M[1] == idx).all() and (M[0] == 0).all()
    for a in range(q):
        assert fld.add(a, fld.neg(a)) == 0
        if a:
            assert fld.mul(a, fld.inv(a)) == 1
            assert sorted(M[a]) == list(range(q))
    # associativity and distributivity on all triples
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert (A[A[a, b], c] == A[a, A[b, c]]).all()
    assert (M[M[a, b], c] == M[a, M[b, c]]).all()
    assert (M[a, A[b, c]] == A[M[a, b], M[a, c]]).all()


def test_big_field_without_tables():
    fld = gf.field_make(2**12)
    assert fld.mul_table is None
    a = 1234
    assert fld.mul(a, fld.inv(a)) == 1
    assert fld.add(a, a) == 0


def test_field_size_cap():
    with pytest.raises(DomainError):
        gf.Field(2**17)


def test_qary_entropy_values():
    assert gf.qary_entropy(4, 0.5) == pytest.approx(0.8962406251802891, rel=1e-12)
    assert gf.qary_entropy(2, 0.5) == pytest.approx(1.0, rel=1e-12)


@given(st.integers(2, 64), st.floats(1e-6, 1 - 1e-6))
def test_qary_entropy_reference(q, x):
    assert o.rel_err(gf.qary_entropy(q, x), o.ref_qary_entropy(q, x)) <= 1e-12


def test_gv_dimension():
    assert gf.gv_dimension(4, 20, 0.5) == 2
    assert gf.gv_dimension(2, 10, 0.5) == 0
    with pytest.raises(DomainError):
        gf.gv_dimension(2, 10, 0.6)


def test_distance_target():
    assert gf.distance_target(6, Fraction(2, 3)) == 4
    assert gf.distance_target(6, 2 / 3) == 4
    assert gf.distance_target(7, 0.5) == 4


def test_construct_examples():
    c = gf.construct_code(4, 2, 1, min_dist=1)
    assert c.generator == ((1, 0),) and c.min_dist == 1
    c = gf.construct_code(2, 3, 1, 1.0)
    assert c.generator == ((1, 1, 1),) and c.min_dist == 3
    assert gf.construct_code(5, 4, 2, 0.5).min_dist >= 2


def test_search_rescues_hamming():
    with pytest.raises(gf.ConstructionError):
        gf.construct_code(2, 7, 4, min_dist=3, search=False)
    c = gf.construct_code(2, 7, 4, min_dist=3)
    assert c.min_dist == 3


def test_impossible_code_fails_fast():
    # no [6,4,3]_4 code exists
    with pytest.raises(gf.ConstructionError) as ei:
        gf.construct_code(4, 6, 4, min_dist=3)
    assert ei.value.best_distance < 3


def test_construct_deterministic():
    a = gf.construct_code(7, 6, 2, Fraction(2, 3))
    b = gf.construct_code(7, 6, 2, Fraction(2, 3))
    assert a.generator == b.generator


def test_code_text_roundtrip():
    c = gf.construct_code(7, 6, 2, Fraction(2, 3))
    back = gf.LinearCode.from_text(c.to_text())
    assert back.generator == c.generator and back.min_dist == c.min_dist


def test_code_text_rejects_wrong_distance():
    c = gf.construct_code(5, 4, 2, 0.5)
    head, *rest = c.to_text().splitlines()
    q, m, k, dist = head.split()
    bad = "\n".join([f"{q} {m} {k} {int(dist) + 1}"] + rest) + "\n"
    with pytest.raises(DomainError):
        gf.LinearCode.from_text(bad)


@given(st.sampled_from([2, 3, 4, 5, 7]), st.integers(2, 7), st.data())
@settings(max_examples=30)
def test_min_distance_matches_pairs(q, m, data):
    k = data.draw(st.integers(1, 2 if q > 3 else 3))
    fld = gf.field_make(q)
    gen = data.draw(st.lists(st.lists(st.integers(0, q - 1), min_size=m, max_size=m), min_size=k, max_size=k))
    if not any(any(r) for r in gen):
        return
    arr = np.array(gen, dtype=np.int64)
    words = gf.encode_all(fld, arr)
    if len({tuple(w) for w in words}) < len(words):
        return  # degenerate generator
    ref = o.naive_min_distance(o.PolyField(fld.p, fld.modulus), gen)
    assert gf.min_distance(fld, arr) == ref


def test_codewords_form_subspace():
    c = gf.construct_code(4, 5, 2, 0.5)
    words = {tuple(w) for w in c.codewords()}
    assert len(words) == c.size
    fld = c.field
    for a in list(words)[:6]:
        for b in list(words)[:6]:
            assert tuple(fld.add(x, y) for x, y in zip(a, b)) in words


@pytest.mark.slow
def test_greedy_meets_gv_on_grid():
    """Without search the greedy construction reaches every GV point on the grid."""
    points = 0
    for q in (2, 3, 4, 5, 7, 8):
        for m in range(1, 25):
            for j in range(1, 20):
                delta = j / 20
                if delta > 1 - 1 / q:
                    continue
                k = gf.gv_dimension(q, m, delta)
                if k < 1 or q**k > 2**16:
                    continue
                c = gf.construct_code(q, m, k, delta, search=False)
                assert c.min_dist >= gf.distance_target(m, delta)
                points += 1
    assert points == 977

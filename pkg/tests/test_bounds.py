import math
from math import comb

import pytest
from hypothesis import given, strategies as st

import oracles as o
from gtyes import bounds as b
from gtyes.bounds import BoundQuery as Q
from gtyes.model import DomainError


def test_ceil_log2_exact():
    assert [b.ceil_log2(x) for x in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]
    assert b.ceil_log2(2**200 + 1) == 201
    with pytest.raises(DomainError):
        b.ceil_log2(0)


# entropy -------------------------------------------------------------------

def test_binary_entropy_values():
    assert b.binary_entropy(0.5) == 1.0
    assert b.binary_entropy(0.25) == pytest.approx(0.811278, abs=1e-6)


@given(st.floats(0.001, 0.999))
def test_binary_entropy_symmetric(x):
    assert b.binary_entropy(x) == pytest.approx(b.binary_entropy(1 - x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.1, 1.5])
def test_binary_entropy_domain(x):
    with pytest.raises(DomainError):
        b.binary_entropy(x)


def test_entropy_upper_values():
    assert b.entropy_upper_bound(1, 2) == pytest.approx(1.22134, abs=1e-5)
    # (1/4) log2(4e) = 0.86067...; the worked example's 0.86762 is a slip
    assert b.entropy_upper_bound(1, 4) == pytest.approx(0.8606737602222408, rel=1e-12)


def test_entropy_dominance_grid():
    for bb in range(2, 65):
        for a in range(1, bb):
            assert b.entropy_upper_bound(a, bb) >= b.binary_entropy(a / bb)


@pytest.mark.parametrize("a,bb", [(0, 3), (3, 3), (4, 3)])
def test_entropy_upper_domain(a, bb):
    with pytest.raises(DomainError):
        b.entropy_upper_bound(a, bb)


# counting ------------------------------------------------------------------

@pytest.mark.parametrize("n,d,t,y", [(4, 1, 2, 2), (6, 2, 4, 3), (4, 1, 4, 1)])
def test_min_yes_examples(n, d, t, y):
    assert b.min_yes_exact(n, d, t) == y


def test_min_yes_infeasible():
    assert b.min_yes_exact(8, 1, 2) is None
    assert b.evaluate("min-yes-exact", Q(8, 1, 2)).value == math.inf


@given(st.integers(1, 30), st.data())
def test_min_yes_is_minimal(n, data):
    d = data.draw(st.integers(1, n))
    t = data.draw(st.integers(1, 40))
    y = b.min_yes_exact(n, d, t)
    tot = lambda k: sum(comb(t, i) for i in range(k + 1))
    if y is None:
        assert 2**t < comb(n, d)
    else:
        assert tot(y) >= comb(n, d) and (y == 0 or tot(y - 1) < comb(n, d))


# adaptive bounds -----------------------------------------------------------

def test_adaptive_lower_examples():
    assert b.adaptive_yes_lower(Q(5, 5, 9, 3)).value == 5
    assert b.adaptive_yes_lower(Q(16, 1, 16, 8)).value == pytest.approx(1.638, abs=1e-3)
    r = b.adaptive_yes_lower(Q(16, 1, 4, 3))
    assert r.value == 2 and r.case_taken == "y>t/2"


def test_adaptive_upper_examples():
    assert b.adaptive_yes_upper(Q(7, 2, 7, 1)).value == 2
    assert b.adaptive_yes_upper(Q(8, 1, 6, 3)).value == 4
    # 6 / log2(31/6 - 1); the worked example rounds this to 2.913
    assert b.adaptive_yes_upper(Q(64, 1, 30, 6)).value == pytest.approx(2.9141864059810088, rel=1e-12)


def test_unresolved_takes_safe_branch():
    lo = b.adaptive_yes_lower(Q(64, 2, 20))
    assert lo.case_taken == "unresolved" and lo.value == min(lo.branches.values())
    hi = b.adaptive_yes_upper(Q(64, 2, 20))
    assert hi.value == max(hi.branches.values())


# family sizes ----------------------------------------------------------------

def test_size_examples():
    assert b.cff_pd_size_upper(Q(10, 1, 4, p=1, s=2)).value == 6
    assert b.cff_pd_size_upper(Q(10, 1, 4, p=1, s=3)).value == 6
    assert b.cff_pd_size_upper(Q(10, 2, 8, p=1, s=4)).value == pytest.approx(16 * math.e**2 + 1, rel=1e-12)
    assert b.cff_size_upper(Q(10, 1, 6, s=3)).value == 20
    assert b.cff_size_upper(Q(10, 2, 8, s=4)).value == pytest.approx(119.22, abs=5e-3)


def test_sep_size_examples():
    # 2^{2 log2(4e)} = 16 e^2 = 118.22; the worked example's 118.4 is a rounding slip
    assert b.sep_size_upper(Q(10, 1, 8, s=2)).value == pytest.approx(16 * math.e**2, rel=1e-12)
    assert b.sep_size_upper(Q(10, 2, 9, s=5)).value == 33
    assert b.sep_size_upper(Q(10, 1, 4, s=3)).value == 32


def test_size_needs_s():
    with pytest.raises(DomainError):
        b.cff_size_upper(Q(10, 1, 4))


def test_nonadaptive_lower_examples():
    r = b.nonadaptive_yes_lower(Q(1024, 1, 64, y=10))
    # the worked example quotes 1.427 from a rounded intermediate
    assert r.value == pytest.approx(1.4251932990503586, rel=1e-12)
    assert b.nonadaptive_yes_lower(Q(1025, 2, 64, y=40)).value == 10
    assert b.nonadaptive_yes_lower(Q(3, 3, 64, y=40)).value == 3


def test_exists_example():
    assert b.cff_pd_exists(Q(10, 1, 16, p=1, s=4)).value == pytest.approx(26.4, abs=0.05)


def test_nonadaptive_upper_examples():
    assert b.nonadaptive_yes_upper(Q(32, 1, 10, y=6)).value == pytest.approx(14.32, abs=0.01)
    r = b.nonadaptive_yes_upper(Q(256, 1, 4096))
    assert 0 < r.branches["mu-closed"] < math.inf


def test_twostage_examples():
    # 2 log2(8e) + log2(2e) + 2 = 13.33; the worked example's 10.9 is an arithmetic slip
    assert b.twostage_yes_upper(Q(16, 1, 10, p=1, y=9)).value == pytest.approx(13.32808512266689, rel=1e-12)
    v = b.twostage_yes_upper(Q(16, 2, 100, p=2, y=10)).value
    assert 0 < v < math.inf
    with pytest.raises(DomainError):
        b.twostage_yes_upper(Q(16, 2, 3, p=2))


def test_query_validation():
    for bad in [dict(n=2, d=3, t=4), dict(n=4, d=1, t=0), dict(n=4, d=1, t=4, s=5), dict(n=4, d=1, t=4, y=5),
                dict(n=4, d=1, t=4, p=0)]:
        with pytest.raises(DomainError):
            Q(**bad)


def test_evaluate_dispatch():
    assert set(b.EVALUATORS) == set(b.THEOREMS)
    with pytest.raises(DomainError):
        b.evaluate("nope", Q(4, 1, 4))
    d = b.evaluate("cff-size-upper", Q(4, 1, 6, s=3)).to_dict()
    assert d["inputs"] == {"n": 4, "d": 1, "t": 6, "s": 3}


# p = 1 specialisations -----------------------------------------------------

def _grid(count=200):
    pts = []
    for d in range(1, 9):
        for s in (1, 2, 3, 5, 8):
            for t in (s, 2 * s - 1, 2 * s, 3 * s + 1, 10 * s):
                pts.append((d, s, max(t, s)))
    return pts[:count]


def test_cff_size_specialisation():
    pts = _grid()
    assert len(pts) == 200
    for d, s, t in pts:
        a = b.cff_pd_size_upper(Q(max(d, 2), d, t, p=1, s=s)).value
        c = b.cff_size_upper(Q(max(d, 2), d, t, s=s)).value
        assert o.rel_err(a, c) <= 1e-12, (d, s, t)


def test_exists_specialisation():
    for d, s, t in _grid():
        a = b.cff_pd_exists(Q(max(d, 2), d, t, p=1, s=s)).value
        c = b.cff_exists(Q(max(d, 2), d, t, s=s)).value
        assert o.rel_err(a, c) <= 1e-12, (d, s, t)


def test_twostage_pd_specialisation():
    n_pts = 0
    for d in range(1, 6):
        for n in (2 * d, 4 * d, 50, 1000):
            for t in (2 * d, 2 * d + 3, 40, 400, 4000):
                for y in (None, d + 1, t // 2, t):
                    if n < 2 * d or t < 2 * d or (y is not None and y > t):
                        continue
                    a = b.twostage_yes_upper(Q(n, d, t, p=d, y=y))
                    c = b.twostage_yes_upper_pd(Q(n, d, t, y=y))
                    for key, val in a.branches.items():
                        other = c.branches[key.replace("(t+d-p+1)", "t")]
                        assert val == other or o.rel_err(val, other) <= 1e-12
                    n_pts += 1
    assert n_pts >= 200


# against the 256-bit reference -----------------------------------------------

@given(st.integers(1, 63), st.data())
def test_entropy_upper_reference(a, data):
    bb = data.draw(st.integers(a + 1, 64))
    assert o.rel_err(b.entropy_upper_bound(a, bb), o.ref_entropy_upper(a, bb)) <= 1e-12


@given(st.integers(2, 10**6), st.data())
def test_adaptive_reference(n, data):
    d = data.draw(st.integers(1, min(n - 1, 20)))
    t = data.draw(st.integers(2, 500))
    y = data.draw(st.integers(1, t))
    lo = b.adaptive_yes_lower(Q(n, d, t, y)).value
    assert o.rel_err(lo, o.ref_adaptive_lower(n, d, t, y)) <= 1e-12
    if t < n and y <= t / 3 and (t + 1) / y - 1 > 1:
        hi = b.adaptive_yes_upper(Q(n, d, t, y)).value
        assert o.rel_err(hi, o.ref_adaptive_upper(n, d, t, y)) <= 1e-12


@given(st.integers(1, 12), st.integers(1, 4), st.integers(1, 40), st.integers(1, 10))
def test_size_reference(d, p, s, extra):
    t = s + extra * s // 3
    v = b.cff_pd_size_upper(Q(max(d, p), d, t, p=p, s=s)).value
    if d == 1 and p == 1:
        return
    ref = o.ref_cff_pd_size_large_d(d, p, s, t) if d >= 2 * p else o.ref_cff_pd_size_small_d(d, p, s, t)
    assert o.rel_err(v, ref) <= 1e-12


@given(st.integers(1, 9), st.integers(1, 30), st.integers(0, 60))
def test_sep_reference(d, s, extra):
    t = s + extra
    v = b.sep_size_upper(Q(max(d, 2), d, t, s=s)).value
    assert o.rel_err(v, o.ref_sep_size(d, s, t)) <= 1e-12


@given(st.integers(1, 6), st.integers(1, 4), st.integers(1, 30), st.integers(0, 60))
def test_exists_reference(d, p, s, extra):
    t = s + extra
    v = b.cff_pd_exists(Q(max(d, 2), d, t, p=p, s=s)).value
    assert o.rel_err(v, o.ref_cff_pd_exists(d, p, s, t)) <= 1e-12


@given(st.integers(1, 8), st.integers(20, 10**5), st.integers(8, 4000))
def test_nonadaptive_lower_reference(d, n, t):
    q = Q(n, d, t, y=t)
    r = b.nonadaptive_yes_lower(q)
    assert o.rel_err(r.branches["y>t/2"], o.ref_nonadaptive_lower_rhs(n, d, t, True)) <= 1e-12
    lo = r.branches["y<=t/2"]
    ref = o.ref_nonadaptive_lower_rhs(n, d, t, False) if math.isfinite(lo) and lo > d else None
    if ref is not None:
        assert o.rel_err(lo, ref) <= 1e-12


@given(st.integers(1, 8), st.integers(2, 10**5), st.integers(10, 10**5), st.data())
def test_nonadaptive_upper_reference(d, n, t, data):
    n = max(n, d)
    y = data.draw(st.integers(1, t))
    r = b.nonadaptive_yes_upper(Q(n, d, t, y=y))
    assert o.rel_err(r.branches["t<2y"], o.ref_nonadaptive_upper(n, d, t)) <= 1e-12
    if math.isfinite(r.branches["mu-closed"]) and r.branches["mu-closed"] > 0:
        assert o.rel_err(r.branches["mu-closed"], o.ref_nonadaptive_upper(n, d, t, "mu")) <= 1e-12
    if t >= 2 * y and math.e * t / y > 2:
        assert o.rel_err(r.value, o.ref_nonadaptive_upper(n, d, t, y)) <= 1e-12


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**4), st.integers(0, 10**4), st.data())
def test_twostage_reference(d, p, n_extra, t_extra, data):
    n, t = d + p + n_extra, d + p + t_extra
    y = data.draw(st.integers(d + 1, t)) if t > d else None
    r = b.twostage_yes_upper(Q(n, d, t, p=p, y=y))
    assert o.rel_err(r.branches["y>(t+d-p+1)/2"], o.ref_twostage(n, d, t, p)) <= 1e-12
    chi = r.branches["chi-closed"]
    if math.isfinite(chi):
        assert o.rel_err(chi, o.ref_twostage(n, d, t, p, "chi")) <= 1e-12
    if y is not None and y <= (t + d - p + 1) / 2 and math.isfinite(r.value):
        assert o.rel_err(r.value, o.ref_twostage(n, d, t, p, y)) <= 1e-12

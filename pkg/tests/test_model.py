import pytest
from hypothesis import given, strategies as st

from gtyes.model import DefectiveSet, Design, DomainError, ResponseVector, Transcript, covers, respond, yes_count
from gtyes.rng import Stream, splitmix64, u64_block, uniform_block


def designs(max_t=8, max_n=8):
    return st.integers(1, max_t).flatmap(
        lambda t: st.lists(st.integers(0, (1 << t) - 1), min_size=1, max_size=max_n).map(
            lambda cols: Design(t, len(cols), tuple(cols))
        )
    )


def test_identity_response():
    I = Design.identity(3)
    assert str(respond(I, [1])) == "010"
    assert respond(I, []).weight == 0


def test_respond_is_or_of_columns():
    D = Design.from_columns(["110", "011"])
    assert str(respond(D, {0, 1})) == "111"
    assert yes_count(D, {0}) == 2


def test_respond_rejects_out_of_range():
    with pytest.raises(DomainError):
        respond(Design.identity(3), [3])


@given(designs(), st.data())
def test_respond_monotone(D, data):
    small = data.draw(st.sets(st.integers(0, D.n - 1)))
    extra = data.draw(st.sets(st.integers(0, D.n - 1)))
    assert covers(respond(D, small | extra).bits, respond(D, small).bits)


@given(designs())
def test_text_roundtrip(D):
    assert Design.from_text(D.to_text()) == D


def test_text_metadata_roundtrip():
    D = Design.from_rows(["101", "011"], d=1, s=2)
    text = D.to_text()
    assert text == "2 3\n# d=1 s=2\n101\n011\n"
    back = Design.from_text(text)
    assert back.meta == {"d": 1, "s": 2}


@pytest.mark.parametrize("bad", [
    "2 3\n101\n011",  # no trailing newline
    "2 3\n101\n",  # too few rows
    "2 3\n1010\n011\n",  # wrong width
    "2 3\n10x\n011\n",
    "two 3\n101\n011\n",
])
def test_text_rejects(bad):
    with pytest.raises(DomainError):
        Design.from_text(bad)


def test_column_fits_in_t():
    with pytest.raises(DomainError):
        Design(2, 1, (4,))


def test_external_indexing():
    D = DefectiveSet.from_external([1, 3])
    assert D.members == {0, 2}
    assert D.external() == [1, 3]


def test_response_vector_str():
    r = ResponseVector.from_str("0110")
    assert r.weight == 2 and str(r) == "0110"


def test_transcript_counts():
    tr = Transcript()
    tr.record([0, 1], True)
    tr.record([2], False)
    assert (tr.tests, tr.yeses) == (2, 1)


def test_pool_is_row():
    D = Design.from_rows(["110", "011"])
    assert D.pool(0) == {0, 1}
    assert D.pool(1) == {1, 2}


# rng -------------------------------------------------------------------------

def test_splitmix_reference_value():
    # first output of SplitMix64 from state 0
    assert splitmix64(0, 0) == 0xE220A8397B1DCDAF


@given(st.integers(0, 2**64 - 1), st.integers(0, 10**6))
def test_block_matches_scalar(seed, start):
    block = u64_block(seed, start, 5)
    assert [int(x) for x in block] == [splitmix64(seed, start + i) for i in range(5)]


def test_uniform_range():
    u = uniform_block(7, 0, 10_000)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.02


@given(st.integers(0, 2**32), st.integers(1, 30), st.data())
def test_sample_distinct_sorted(seed, n, data):
    k = data.draw(st.integers(0, n))
    out = Stream(seed).sample(n, k)
    assert out == sorted(set(out)) and len(out) == k and all(0 <= x < n for x in out)


def test_randbelow_covers_range():
    s = Stream(3)
    assert {s.randbelow(5) for _ in range(200)} == set(range(5))

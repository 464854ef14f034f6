import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syndromeid import gf2
from syndromeid.gf2 import BitMatrix, BitVector


def matrices(max_rows=6, max_cols=8):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=1, max_size=max_rows)
    )


def brute_rank(rows):
    # size of the span by enumeration
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return len(span).bit_length() - 1


def test_bitvector_basics():
    v = BitVector.from_list([1, 0, 1, 1])
    assert v.weight == 3
    assert v.support() == [0, 2, 3]
    assert str(v) == "1011"
    assert BitVector.from_string("1011") == v
    assert (v + v) == BitVector.zeros(4)
    assert v.dot(BitVector.from_list([1, 1, 1, 0])) == 0


def test_bitvector_length_mismatch():
    with pytest.raises(ValueError):
        BitVector.from_list([1, 0]) + BitVector.from_list([1, 0, 1])


def test_rank_examples():
    assert gf2.rank(BitMatrix.identity(4)) == 4
    assert gf2.rank(BitMatrix.zeros(3, 5)) == 0
    assert gf2.rank(BitMatrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2


def test_nullspace_examples():
    assert gf2.nullspace(BitMatrix.identity(3)) == []
    assert len(gf2.nullspace(BitMatrix.zeros(2, 3))) == 3
    assert gf2.nullspace(BitMatrix.from_lists([[1, 1]])) == [BitVector.from_list([1, 1])]


def test_columns_independent_examples():
    H = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1]])
    assert gf2.columns_independent(H, [])
    assert gf2.columns_independent(BitMatrix.identity(4), [0, 2, 3])
    assert not gf2.columns_independent(H, [0, 1, 2])
    assert gf2.columns_independent(H, [0, 1])


def test_text_round_trip():
    m = BitMatrix.from_lists([[1, 0, 1], [0, 1, 1]])
    text = m.to_text()
    assert text.splitlines()[0] == "2 3"
    assert BitMatrix.from_text(text) == m
    with pytest.raises(ValueError):
        BitMatrix.from_text("2 3\n101\n01")


def test_span_order_and_cap():
    rows = [0b001, 0b010, 0b100]
    assert gf2.span_masks(rows) == list(range(8))
    with pytest.raises(gf2.SpanTooLargeError):
        gf2.span_masks([1 << i for i in range(6)], cap_bits=5)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_transpose_and_span(rows):
    m = BitMatrix.from_lists(rows)
    r = gf2.rank(m)
    assert r == gf2.rank(m.transpose())
    assert r == brute_rank(list(m.rows))
    assert len(gf2.row_span(m)) == 2 ** r


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_nullspace_is_kernel(rows):
    m = BitMatrix.from_lists(rows)
    basis = gf2.nullspace(m)
    assert len(basis) == m.ncols - gf2.rank(m)
    for v in basis:
        assert (m @ v).weight == 0
    assert gf2.rank(BitMatrix.from_vectors(basis)) == len(basis) if basis else True


@settings(max_examples=40, deadline=None)
@given(matrices(max_rows=5, max_cols=7), st.data())
def test_columns_independent_bruteforce(rows, data):
    m = BitMatrix.from_lists(rows)
    cols = data.draw(st.sets(st.integers(0, m.ncols - 1)))
    brute = all(
        m.mul_mask(gf2.mask_from_indices(sub)) != 0
        for k in range(1, len(cols) + 1)
        for sub in itertools.combinations(sorted(cols), k)
    )
    assert gf2.columns_independent(m, cols) == brute


def test_submasks_enumerates_all():
    assert sorted(gf2.submasks(0b1011)) == sorted(
        {a for a in range(16) if a & 0b1011 == a}
    )

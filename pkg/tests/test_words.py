from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdlsys import (
    ResourceLimitError,
    abelianize,
    enumerate_words,
    fiber,
    left_quotient,
    multi_indices,
    multi_indices_up_to,
    multinomial_weight,
    transpose,
    words_up_to,
)

words_st = st.integers(1, 3).flatmap(
    lambda d: st.tuples(
        st.just(d), st.lists(st.integers(1, d), max_size=7).map(tuple)
    )
)


def test_enumerate_level_zero():
    assert enumerate_words(2, 0) == [()]


def test_enumerate_level_two_listing():
    assert enumerate_words(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_enumerate_count_d3():
    # oracle: d^N distinct words
    ws = enumerate_words(3, 2)
    assert len(ws) == 9
    assert len(set(ws)) == 9


def test_enumerate_cap(monkeypatch):
    monkeypatch.setenv("MDLSYS_MAX_WORDS", "100")
    with pytest.raises(ResourceLimitError):
        enumerate_words(2, 10)


def test_transpose_examples():
    assert transpose((1, 2, 1)) == (1, 2, 1)
    assert transpose((1, 2)) == (2, 1)
    assert transpose(()) == ()


@given(words_st)
def test_transpose_involution(dw):
    d, v = dw
    assert transpose(transpose(v)) == v
    assert abelianize(transpose(v), d) == abelianize(v, d)


def test_abelianize_examples():
    assert abelianize((1, 2, 1), 2) == (2, 1)
    assert abelianize((), 2) == (0, 0)
    assert abelianize((3, 1, 2), 3) == (1, 1, 1)


def test_multinomial_examples():
    assert multinomial_weight((1, 1)) == 2
    assert fiber((1, 1)) == [(1, 2), (2, 1)]
    assert multinomial_weight((0, 0, 0)) == 1


def test_multinomial_2_2_against_enumeration():
    # oracle: length-4 words over {1,2} with two of each letter
    count = sum(1 for v in enumerate_words(2, 4) if abelianize(v, 2) == (2, 2))
    assert count == 6
    assert multinomial_weight((2, 2)) == 6


def test_multinomial_exact_rational():
    w = multinomial_weight((3, 4, 1))
    assert isinstance(w, Fraction)
    assert w == Fraction(40320, 6 * 24)


def test_multinomial_cap():
    with pytest.raises(ResourceLimitError):
        multinomial_weight((30, 30))
    assert multinomial_weight((30, 30), max_total=None) > 10**16


def test_left_quotient():
    assert left_quotient(1, (1, 2)) == (2,)
    assert left_quotient(2, (1, 2)) is None
    assert left_quotient(1, ()) is None


@pytest.mark.parametrize("d", [1, 2, 3])
def test_fiber_sizes_match_weight(d):
    for n in multi_indices_up_to(d, 6 if d < 3 else 5):
        assert len(fiber(n)) == multinomial_weight(n)


@pytest.mark.parametrize("d", [2, 3])
def test_level_weights_sum_to_dN(d):
    for N in range(11):
        total = sum(multinomial_weight(n) for n in multi_indices(d, N))
        assert total == d**N


def test_words_up_to_order_and_count():
    ws = words_up_to(2, 3)
    assert ws[0] == ()
    assert len(ws) == 1 + 2 + 4 + 8
    lengths = [len(v) for v in ws]
    assert lengths == sorted(lengths)

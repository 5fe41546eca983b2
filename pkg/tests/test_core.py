import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hallustat.core import (
    Alphabet,
    Str,
    count_upto,
    empty_string,
    shortlex_index,
    shortlex_string,
    strings_of_length,
    strings_upto,
)
from hallustat.errors import DomainError


def test_alphabet_validation():
    with pytest.raises(DomainError):
        Alphabet(1)
    with pytest.raises(DomainError):
        Alphabet(0)
    with pytest.raises(DomainError):
        Alphabet(3, ("a", "b"))  # label count mismatch
    with pytest.raises(DomainError):
        Alphabet(2, ("a", "a"))  # duplicate labels
    assert Alphabet(2).size == 2
    assert Alphabet(3, ("x", "y", "z")).labels == ("x", "y", "z")


def test_str_validation():
    a = Alphabet(2)
    with pytest.raises(DomainError):
        Str(a, (0, 2))
    with pytest.raises(DomainError):
        Str(a, (-1,))
    assert len(Str(a, (0, 1, 1))) == 3
    assert len(empty_string(a)) == 0


def test_count_upto_small_values():
    a = Alphabet(2)
    assert count_upto(a, 0) == 1
    assert count_upto(a, 1) == 3
    assert count_upto(a, 3) == 15
    assert count_upto(Alphabet(3), 2) == 13
    with pytest.raises(DomainError):
        count_upto(a, -1)


def test_count_upto_matches_enumeration():
    # closed form vs. literal enumeration, exact integers
    for q in (2, 3, 5):
        a = Alphabet(q)
        for n in range(0, 9):
            expected = sum(q**k for k in range(n + 1))
            assert count_upto(a, n) == expected


def test_count_upto_is_exact_at_large_n():
    a = Alphabet(2)
    assert count_upto(a, 99) == 2**100 - 1  # no float could represent this


def test_empty_string_is_rank_zero():
    for q in (2, 3, 5):
        a = Alphabet(q)
        assert shortlex_index(empty_string(a)) == 0
        assert shortlex_string(a, 0) == empty_string(a)


def test_shortlex_rank_roundtrip():
    for q in (2, 3, 5):
        a = Alphabet(q)
        top = min(100_000, count_upto(a, 8))
        for rank in range(top):
            s = shortlex_string(a, rank)
            assert shortlex_index(s) == rank


def test_shortlex_order_is_length_then_lex():
    a = Alphabet(3)
    ranked = [shortlex_string(a, r) for r in range(count_upto(a, 3))]
    keys = [s.sort_key() for s in ranked]
    assert keys == sorted(keys)
    # and ties in length are broken lexicographically on symbols
    for prev, cur in zip(ranked, ranked[1:]):
        if len(prev) == len(cur):
            assert prev.symbols < cur.symbols


def test_shortlex_string_rejects_negative_rank():
    with pytest.raises(DomainError):
        shortlex_string(Alphabet(2), -1)


def test_strings_of_length_enumeration():
    a = Alphabet(2)
    assert [s.symbols for s in strings_of_length(a, 0)] == [()]
    assert [s.symbols for s in strings_of_length(a, 2)] == [
        (0, 0), (0, 1), (1, 0), (1, 1)]


def test_strings_upto_matches_ranks():
    a = Alphabet(3)
    listed = list(strings_upto(a, 4))
    assert len(listed) == count_upto(a, 4)
    for rank, s in enumerate(listed):
        assert shortlex_index(s) == rank


def test_text_rendering():
    a = Alphabet(2, ("a", "b"))
    assert Str(a, (0, 1, 1)).text() == "abb"
    assert empty_string(a).text() == ""


@given(q=st.sampled_from([2, 3, 5]), n=st.integers(min_value=0, max_value=30))
def test_count_upto_recurrence(q, n):
    a = Alphabet(q)
    if n == 0:
        assert count_upto(a, 0) == 1
    else:
        assert count_upto(a, n) == count_upto(a, n - 1) + q**n


@settings(max_examples=200)
@given(q=st.sampled_from([2, 3, 5]), rank=st.integers(min_value=0, max_value=10**12))
def test_roundtrip_at_random_large_ranks(q, rank):
    a = Alphabet(q)
    assert shortlex_index(shortlex_string(a, rank)) == rank


def test_cross_alphabet_comparison_is_unequal():
    s2 = empty_string(Alphabet(2))
    s3 = empty_string(Alphabet(3))
    assert s2 != s3


def test_brute_force_rank_table():
    # independent ranking: sort all strings up to length 4 by (len, symbols)
    a = Alphabet(2)
    brute = sorted(
        (Str(a, t) for n in range(5) for t in itertools.product(range(2), repeat=n)),
        key=lambda s: s.sort_key(),
    )
    for rank, s in enumerate(brute):
        assert shortlex_index(s) == rank
        assert shortlex_string(a, rank) == s

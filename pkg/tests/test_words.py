import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from freehol import words as W

letters = st.integers(1, 3)
word = st.lists(letters, max_size=7).map(tuple)


def test_concat_examples():
    assert W.concat((1, 2), ()) == (1, 2)
    assert W.concat((), ()) == ()
    assert W.concat((1,), (2, 1)) == (1, 2, 1)


def test_reverse_examples():
    assert W.reverse((1, 2, 3)) == (3, 2, 1)
    assert W.reverse(()) == ()
    assert W.reverse((1, 1)) == (1, 1)


def test_enumerate_examples():
    assert W.enumerate_words(2, 0) == [()]
    assert W.enumerate_words(2, 1) == [(1,), (2,)]
    assert W.enumerate_words(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_enumerate_matches_sorted_brute_force():
    for n, k in [(3, 3), (2, 5), (4, 2)]:
        brute = sorted(itertools.product(range(1, n + 1), repeat=k))
        assert W.enumerate_words(n, k) == brute


def test_enumerate_cap():
    with pytest.raises(W.EnumerationCapError):
        W.enumerate_words(4, 10, cap=1000)


def test_rank_roundtrip():
    for n, k in [(2, 4), (3, 3)]:
        for r, w in enumerate(W.enumerate_words(n, k)):
            assert W.rank(w, n) == r
            assert W.unrank(r, n, k) == w


def test_insert_examples():
    assert W.insert(1, 0, (2,)) == (1, 2)
    assert W.insert(1, 1, (2,)) == (2, 1)
    assert W.insert(2, 1, (1, 1)) == (1, 2, 1)
    with pytest.raises(W.WordError):
        W.insert(1, 3, (1, 2))


def test_deletions_examples():
    assert W.deletions(1, (1, 2, 1, 1)) == Counter({(2, 1, 1): 1, (1, 2, 1): 2})
    assert W.deletions(2, (1, 1)) == Counter()
    assert W.deletions(1, (1,)) == Counter({(): 1})


def test_letter_counts_examples():
    assert W.letter_counts((1, 2, 1), 2) == (2, 1)
    assert W.letter_counts((), 3) == (0, 0, 0)
    lam = [w for w in W.enumerate_words(2, 2) if W.letter_counts(w, 2) == (1, 1)]
    assert lam == [(1, 2), (2, 1)]
    assert len(lam) == W.multinomial((1, 1)) == 2


def test_bad_letter():
    with pytest.raises(W.WordError):
        W.check_word((0, 1), 2)
    with pytest.raises(W.WordError):
        W.letter_counts((3,), 2)


def test_factorial_guard():
    assert W.multi_factorial((3, 2)) == 12
    with pytest.raises(OverflowError):
        W.multi_factorial((11, 10))


@given(word, word, word)
def test_concat_associative(a, b, c):
    assert W.concat(W.concat(a, b), c) == W.concat(a, W.concat(b, c))
    assert W.concat((), a) == a == W.concat(a, ())


@given(word, word)
def test_reverse_antihomomorphism(a, b):
    assert W.reverse(W.concat(a, b)) == W.concat(W.reverse(b), W.reverse(a))
    assert W.reverse(W.reverse(a)) == a


@given(word, letters)
def test_deletion_count_matches_letter_count(w, j):
    assert sum(W.deletions(j, w).values()) == W.letter_counts(w, 3)[j - 1]


def test_insertion_deletion_duality():
    n = 3
    for k in range(4):
        for alpha in W.enumerate_words(n, k + 1):
            for j in range(1, n + 1):
                dels = W.deletions(j, alpha)
                for beta in W.enumerate_words(n, k):
                    hits = sum(W.insert(j, m, beta) == alpha for m in range(k + 1))
                    assert hits == dels.get(beta, 0)


def test_lambda_cardinality_exhaustive():
    for n in (1, 2, 3):
        for k in range(9):
            counts = Counter(W.letter_counts(w, n) for w in W.enumerate_words(n, k))
            for p in W.multi_indices(n, k):
                assert counts[p] == W.multinomial(p) == math.factorial(k) // W.multi_factorial(p)
                assert W.words_with_counts(p) == sorted(w for w in W.enumerate_words(n, k)
                                                        if W.letter_counts(w, n) == p)

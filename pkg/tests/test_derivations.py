import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_series
from freehol import words as W
from freehol.derivations import oracle_partial, partial, partial_k
from freehol.series import FreeSeries, Tail, block_norms, multiply


def test_examples():
    F = FreeSeries.from_dict({(1, 2, 1): 1}, 2)
    assert partial(F, 1).to_dict().keys() == {(2, 1), (1, 2)}
    G = FreeSeries.from_dict({(1, 1): 1}, 1)
    assert partial(G, 1).scalar((1,)) == 2
    assert partial(FreeSeries.constant(5, 2), 1).nnz() == 0
    assert partial(FreeSeries.variable(2, 2), 1).nnz() == 0
    with pytest.raises(W.WordError):
        partial(F, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_insertion_equals_deletion(seed, n):
    rng = np.random.default_rng(seed)
    F = rand_series(rng, n, 4 if n < 3 else 3, integer=True, density=0.6)
    for j in range(1, n + 1):
        assert partial(F, j).pad(F.degree).equals(oracle_partial(F, j).pad(F.degree))


def test_leibniz_and_commutation(rng):
    for _ in range(10):
        F, G = rand_series(rng, 2, 3, integer=True), rand_series(rng, 2, 2, integer=True)
        for j in (1, 2):
            assert partial(multiply(F, G), j).equals(multiply(partial(F, j), G) + multiply(F, partial(G, j)))
        assert partial_k(F, (1, 2)).equals(partial_k(F, (2, 1)))


def test_matrix_coefficients(rng):
    F = rand_series(rng, 2, 3, q=2)
    assert partial(F, 2).max_abs_diff(oracle_partial(F, 2)) < 1e-13


def test_derivative_tail_bounds_true_blocks():
    # F = sum t^k Z^k on n = 1, so dF has blocks (k+1) t^(k+1)
    t = 0.7
    F = FreeSeries.from_dict({(1,) * k: t**k for k in range(5)}, 1, tail=Tail(1.0, t))
    dF = partial(F, 1)
    assert np.allclose(block_norms(dF), [(k + 1) * t ** (k + 1) for k in range(4)])
    for k in range(4, 80):
        assert (k + 1) * t ** (k + 1) <= dF.tail.block_bound(k) + 1e-12


def test_tailed_constant_rejected():
    with pytest.raises(ValueError):
        partial(FreeSeries.constant(1, 1).with_tail(Tail(1, 0.5)), 1)
    with pytest.raises(ValueError):
        partial_k(FreeSeries.variable(1, 1), ())

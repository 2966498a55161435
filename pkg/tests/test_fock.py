import math

import numpy as np
import pytest

from conftest import rand_series
from freehol import words as W
from freehol.fock import (
    TruncatedFock,
    assemble,
    default_level,
    left_creation,
    op_norm,
    right_creation,
    word_operator,
)
from freehol.series import FreeSeries, block_norms


def test_space_layout():
    sp = TruncatedFock(3, 3)
    assert sp.dim == (3**4 - 1) // 2
    assert sp.basis() == [sp.word(r) for r in range(sp.dim)]
    assert sp.rank(()) == 0
    assert sp.basis()[1:4] == W.enumerate_words(3, 1)


def test_left_creation_examples():
    sp = TruncatedFock(2, 3)
    S1, S2 = left_creation(sp, 1).toarray(), left_creation(sp, 2).toarray()
    assert np.array_equal(S1 @ sp.vacuum(), sp.basis_vector((1,)))
    assert np.abs(S1.conj().T @ S2).max() == 0
    assert np.array_equal(S1.conj().T @ S1, sp.level_projection(range(3)).toarray())
    with pytest.raises(IndexError):
        left_creation(sp, 3)


def test_creation_against_basis_action():
    sp = TruncatedFock(3, 2)
    for i in (1, 2, 3):
        S, R = left_creation(sp, i).toarray(), right_creation(sp, i).toarray()
        for w in sp.basis():
            e = sp.basis_vector(w)
            if len(w) < sp.N:
                assert np.array_equal(S @ e, sp.basis_vector((i,) + w))
                assert np.array_equal(R @ e, sp.basis_vector(w + (i,)))
            else:
                assert not (S @ e).any() and not (R @ e).any()


def test_right_creation_examples():
    sp = TruncatedFock(2, 3)
    R1 = right_creation(sp, 1).toarray()
    assert np.array_equal(R1 @ sp.vacuum(), sp.basis_vector((1,)))
    R12 = word_operator(sp, (1, 2), "right").toarray()
    assert np.array_equal(R12 @ sp.vacuum(), sp.basis_vector((2, 1)))
    low = sp.level_projection(range(sp.N - 1)).toarray()
    for i in (1, 2):
        for j in (1, 2):
            R, S = right_creation(sp, i).toarray(), left_creation(sp, j).toarray()
            assert np.array_equal(R @ S @ low, S @ R @ low)


def test_assemble_examples(rng):
    sp = TruncatedFock(2, 3)
    assert np.array_equal(assemble(FreeSeries.constant(1, 2), sp).toarray(), np.eye(sp.dim))
    Z1 = assemble(FreeSeries.variable(1, 2), sp, 0.5).toarray()
    assert np.array_equal(Z1, 0.5 * left_creation(sp, 1).toarray())


def test_assemble_matches_word_operators(rng):
    sp = TruncatedFock(2, 3)
    F = rand_series(rng, 2, 3, q=2)
    expect = sum(np.kron(a, 0.7 ** len(w) * word_operator(sp, w).toarray()) for w, a in F.items())
    assert np.allclose(assemble(F, sp, 0.7).toarray(), expect, atol=1e-13)


def test_op_norm_examples():
    sp = TruncatedFock(2, 4)
    assert op_norm(assemble(FreeSeries.constant(1, 2), sp)) == pytest.approx(1)
    assert op_norm(0.7 * left_creation(sp, 1)) == pytest.approx(0.7)
    assert op_norm(left_creation(sp, 1) + left_creation(sp, 2)) == pytest.approx(math.sqrt(2))


def test_op_norm_sparse_path(rng):
    sp = TruncatedFock(2, 10)
    assert sp.dim > 2000
    F = rand_series(rng, 2, 3)
    A = assemble(F, sp)
    assert op_norm(A) == pytest.approx(np.linalg.norm(A.toarray(), 2), rel=1e-10)


def test_homogeneous_norm_identity(rng):
    for n, k, q in [(2, 3, 1), (3, 2, 1), (2, 2, 2)]:
        F = rand_series(rng, n, k, q=q).homogeneous(k)
        for N in (k, k + 2):
            for r in (1.0, 0.6):
                norm = op_norm(assemble(F, TruncatedFock(n, N), r))
                assert norm == pytest.approx(r**k * block_norms(F)[k], rel=1e-10)


def test_monotone_in_r_and_N(rng):
    F = rand_series(rng, 2, 3)
    sp = TruncatedFock(2, 5)
    vals = [op_norm(assemble(F, sp, r)) for r in np.linspace(0, 0.99, 12)]
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
    byN = [op_norm(assemble(F, TruncatedFock(2, N))) for N in range(1, 8)]
    assert all(b >= a - 1e-10 for a, b in zip(byN, byN[1:]))


def test_truncation_does_not_stabilize():
    # 1 + Z on n = 1: truncations are 2 cos(pi / (2N + 3)), strictly increasing towards 2
    F = FreeSeries.from_dict({(): 1, (1,): 1}, 1)
    for N in (1, 3, 6):
        assert op_norm(assemble(F, TruncatedFock(1, N))) == pytest.approx(2 * math.cos(math.pi / (2 * N + 3)))


def test_tail_error_bar(rng):
    t = 0.5
    F = FreeSeries.from_dict({(1,) * k: t**k for k in range(30)}, 1)
    head = F.truncate(5)
    sp = TruncatedFock(1, 29)
    r = 0.9
    full = op_norm(assemble(F, sp, r))
    bar = sum((r * t) ** k for k in range(6, 30))
    assert abs(full - op_norm(assemble(head, sp, r))) <= bar + 1e-12


def test_default_level():
    assert default_level(2, 3) == 8
    assert default_level(2, 12) == 14 or TruncatedFock(2, default_level(2, 12)).dim <= 200_000
    assert default_level(4, 9) >= 9

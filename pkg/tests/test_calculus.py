import math
import warnings

import numpy as np
import pytest

from conftest import brute_eval, rand_series, rand_tuple, word_product
from freehol.calculus import (
    BallWarning,
    OperatorTuple,
    UnitaryError,
    beta_U_series,
    beta_U_tuple,
    boundary_norm,
    cp_iterate,
    evaluate,
    evaluate_polynomial,
    hinf_norm,
    hp_norm,
    joint_spectral_radius,
    metric_rho,
    reconstruction_operator,
    row_norm,
)
from freehol.fock import TruncatedFock, assemble, op_norm
from freehol.series import FreeSeries, ShapeMismatch, Tail
from freehol import words as W


def test_evaluate_examples():
    T = OperatorTuple.of([[0.5]], [[0.25]])
    F = FreeSeries.from_dict({(): 1, (1,): 2, (1, 2): 4}, 2)
    assert evaluate(F, T).value[0, 0] == pytest.approx(1 + 1 + 0.5)
    assert evaluate(FreeSeries.constant(2, 2), OperatorTuple.zeros(2, 3)).value == pytest.approx(2 * np.eye(3))


def test_evaluate_matches_word_products(rng):
    for q in (1, 2):
        F = rand_series(rng, 2, 4, q=q)
        T = rand_tuple(rng, 2, 3)
        assert np.allclose(evaluate_polynomial(F, T), brute_eval(F, T.mats), atol=1e-12)


def test_evaluate_with_tail_brackets_limit():
    # sum t^k Z^k at the scalar x is 1 / (1 - t x)
    t, x = 0.5, 0.9
    F = FreeSeries.from_dict({(1,) * k: t**k for k in range(6)}, 1, tail=Tail(1.0, t))
    ev = evaluate(F, OperatorTuple.of([[x]]))
    assert abs(ev.value[0, 0] - 1 / (1 - t * x)) <= ev.tail_bound
    assert ev.tail_bound < 0.1


def test_evaluate_outside_ball_warns():
    F = FreeSeries.from_dict({(1,): 1}, 1, tail=Tail(1.0, 1.0))
    with pytest.warns(BallWarning):
        ev = evaluate(F, OperatorTuple.of([[1.2]]))
    assert ev.tail_bound is None and "tail_unbounded" in ev.flags


def test_evaluate_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        evaluate(FreeSeries.variable(1, 2), OperatorTuple.zeros(3, 2))


def test_cp_iterate_is_word_sum(rng):
    T = rand_tuple(rng, 2, 3)
    for k in range(4):
        brute = sum(word_product(T.mats, w) @ word_product(T.mats, w).conj().T for w in W.enumerate_words(2, k))
        assert np.allclose(cp_iterate(T, k), brute, atol=1e-13)
    assert row_norm(T) == pytest.approx(math.sqrt(np.linalg.norm(cp_iterate(T, 1), 2)))


def test_joint_spectral_radius_commuting_diagonal():
    # diagonal tuple: spectral radius is max_j (sum_i |lam_ij|^2)^(1/2)
    T = OperatorTuple.of(np.diag([0.6, 0.1]), np.diag([0.3, 0.2]))
    sd = joint_spectral_radius(T, 40)
    assert sd.estimate == pytest.approx(math.sqrt(0.45), rel=1e-2)
    assert sd.bound >= math.sqrt(0.45) - 1e-12


def test_joint_spectral_radius_nilpotent():
    T = OperatorTuple.of([[0, 1], [0, 0]], [[0, 0], [0, 0]])
    sd = joint_spectral_radius(T, 8)
    assert sd.gelfand[0] == 1 and sd.gelfand[1] == 0 and sd.bound == 0
    with pytest.raises(ValueError):
        joint_spectral_radius(T, 0)


def test_reconstruction_power_norms(rng):
    T = rand_tuple(rng, 2, 2, 0.9)
    sp = TruncatedFock(2, 5)
    X = reconstruction_operator(T, sp).matrix.toarray()
    P = X.copy()
    for k in range(1, 6):
        assert np.linalg.norm(P, 2) == pytest.approx(math.sqrt(np.linalg.norm(cp_iterate(T, k), 2)), rel=1e-10)
        P = P @ X
    assert not P.any()


def test_hinf_monomial():
    F = FreeSeries.from_dict({(1, 2): 2.0}, 2)
    rep = hinf_norm(F, (0.5, 0.9), TruncatedFock(2, 3))
    assert rep.per_r == pytest.approx((0.5, 1.62))
    assert rep.sup == pytest.approx(1.62)
    assert rep.upper == pytest.approx(2, abs=1e-6)
    assert rep.gap == pytest.approx(2 * (1 - 0.81))


def test_hinf_brackets_truncations(rng):
    F = rand_series(rng, 2, 2)
    rep = hinf_norm(F, (0.5, 0.99), TruncatedFock(2, 4))
    # truncations only bound the full-space norm from below
    assert rep.sup <= op_norm(assemble(F, TruncatedFock(2, 7))) + 1e-12
    assert op_norm(assemble(F, TruncatedFock(2, 7))) <= rep.upper + 1e-9
    assert rep.lower <= rep.upper


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_hp_monomial_exact(p):
    # ||r Z|| = r, so the H^p norm is (p + 1)^(-1/p)
    F = FreeSeries.from_dict({(1,): 1.0}, 2)
    rep = hp_norm(F, p, cells=400)
    exact = (p + 1) ** (-1 / p)
    assert rep.lower - 1e-12 <= exact <= rep.upper + 1e-12
    assert rep.width < 5e-5
    assert rep.certified_upper >= exact - 1e-9


def test_hp_log_convex_tighter_than_riemann(rng):
    F = rand_series(rng, 2, 2)
    tight = hp_norm(F, 2.0, cells=200)
    loose = hp_norm(F, 2.0, cells=200, method="riemann")
    assert tight.width < loose.width
    assert loose.lower - 1e-9 <= tight.lower <= tight.upper <= loose.upper + 1e-9


def test_hp_errors():
    F = FreeSeries.variable(1, 1)
    with pytest.raises(ValueError):
        hp_norm(F, 0.5)
    with pytest.raises(ValueError):
        hp_norm(F, 2, method="simpson")
    with pytest.raises(ValueError):
        hp_norm(FreeSeries.from_dict({(1,): 1}, 1, tail=Tail(1.0, 1.5)), 2)


def test_hp_with_tail_brackets_exact():
    # n = 1, coefficients t^k: ||F(rS)|| = 1 / (1 - rt)
    t = 0.5
    F = FreeSeries.from_dict({(1,) * k: t**k for k in range(8)}, 1, tail=Tail(1.0, t))
    rep = hp_norm(F, 1.0, cells=400, space=TruncatedFock(1, 40))
    exact = -math.log(1 - t) / t
    # lower is valid on the full space; upper only bounds the truncated model
    assert rep.lower <= exact <= rep.certified_upper


def test_metric_rho_closed_form():
    F = FreeSeries.from_dict({(1,): 1.0}, 2)
    G = FreeSeries.zero(2)
    rep = metric_rho(F, G, 20)
    expect = sum(0.5**m * (1 - 0.5**m) / (2 - 0.5**m) for m in range(1, 21))
    assert rep.value == pytest.approx(expect, abs=1e-14)
    assert rep.truncation_error == 0.5**20
    assert metric_rho(F, F).value == 0


def test_beta_U_permutation_and_errors(rng):
    T = rand_tuple(rng, 2, 3)
    swap = np.array([[0, 1], [1, 0]])
    B = beta_U_tuple(T, swap)
    assert np.array_equal(B[1], T[2]) and np.array_equal(B[2], T[1])
    F = FreeSeries.from_dict({(1, 2): 3.0, (1, 1): 1.0}, 2)
    G = beta_U_series(F, swap)
    assert G.scalar((2, 1)) == 3 and G.scalar((2, 2)) == 1
    with pytest.raises(UnitaryError):
        beta_U_tuple(T, np.eye(2) * 1.1)


def test_beta_U_series_commutes_with_evaluation(rng):
    from scipy.stats import unitary_group

    U = unitary_group.rvs(3, random_state=1)
    F, T = rand_series(rng, 3, 3), rand_tuple(rng, 3, 2)
    # substituting Z_j -> sum_i U_ij Z_i and evaluating at T equals evaluating F at beta_U(T)
    assert np.allclose(evaluate_polynomial(beta_U_series(F, U), T), evaluate_polynomial(F, beta_U_tuple(T, U)))


def test_boundary_norm_increases_with_level(rng):
    F = rand_series(rng, 2, 2)
    a = boundary_norm(F, 1.0, TruncatedFock(2, 2))
    b = boundary_norm(F, 1.0, TruncatedFock(2, 5))
    assert a <= b + 1e-12

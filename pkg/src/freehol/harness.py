"""Random instances and the verification suites.

Randomness: every (seed, suite, instance) triple gets its own
``numpy.random.Generator(Philox(SeedSequence([seed, crc32(suite), instance])))``,
so instances reproduce independently of execution order and of which other
suites run.

A row records ``lhs`` and ``rhs`` of one checked relation.  Inequalities
``lhs <= rhs`` have ``slack = rhs - lhs``; identities record the error as
``lhs`` against ``rhs = 0``.  A row passes when ``slack >= -tolerance``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import zlib
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from typing import Callable, Iterable

import numpy as np
from scipy.stats import unitary_group

from . import words as W
from .calculus import (
    OperatorTuple,
    beta_U_series,
    beta_U_tuple,
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
from .certify import boundary_norm_bounds
from .derivations import oracle_partial, partial, partial_k
from .fock import TruncatedFock, assemble, op_norm
from .series import (
    FreeSeries,
    Tail,
    block_norms,
    evaluate_commutative,
    multiply,
    radius_estimate,
    scale,
    symmetrize,
)
from .transforms import (
    cauch_conj_matrix,
    cauchy_kernel,
    cauchy_transform,
    dirichlet_boundary_check,
    herglotz_check,
    pluriharmonic_re,
    poisson_defect_bound,
    poisson_kernel,
    poisson_transform,
    positive_real_part,
)

CAPS = {"n": 4, "d": 16, "D": 12, "N": 12}
CSV_HEADER = ("suite", "instance", "quantity", "lhs", "rhs", "slack", "pass")


class SizeCapError(ValueError):
    pass


def rng_for(seed: int, suite: str, instance: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed & (2**64 - 1), zlib.crc32(suite.encode()), instance])
    return np.random.Generator(np.random.Philox(ss))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _cgauss(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def gen_row_contraction(seed, n: int, d: int, target_norm: float) -> OperatorTuple:
    """Complex Gaussian tuple rescaled to the requested row norm."""
    if target_norm < 0:
        raise ValueError("target norm must be non-negative")
    rng = _rng(seed)
    mats = _cgauss(rng, (n, d, d))
    if target_norm == 0:
        return OperatorTuple.zeros(n, d)
    return OperatorTuple(mats * (target_norm / row_norm(OperatorTuple(mats))))


def gen_series(seed, n: int, D: int, profile: str = "polynomial", t: float = 0.5, q: int = 1,
               density: float = 1.0, integer: bool = False) -> FreeSeries:
    """Random series.

    ``polynomial``: complex Gaussian coefficients (each kept with probability
    ``density``; small integers when ``integer``), no tail.
    ``geometric``: each block rescaled to ``b_k = t**k`` exactly, with tail ``(1, t)``.
    """
    rng = _rng(seed)
    blocks = []
    for k in range(D + 1):
        shape = (n**k, q, q)
        if integer:
            b = (rng.integers(-3, 4, shape) + 1j * rng.integers(-3, 4, shape)).astype(complex)
        else:
            b = _cgauss(rng, shape)
        if density < 1:
            b *= (rng.random(n**k) < density)[:, None, None]
        blocks.append(b)
    if profile == "polynomial":
        return FreeSeries(n, q, tuple(blocks))
    if profile == "geometric":
        F = FreeSeries(n, q, tuple(blocks))
        bn = block_norms(F)
        scaled = tuple(b * (t**k / bn[k]) if bn[k] > 0 else b for k, b in enumerate(blocks))
        return FreeSeries(n, q, scaled, Tail(1.0, t))
    raise ValueError(f"unknown profile {profile!r}")


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng)


@dataclass(frozen=True)
class VerdictRow:
    suite: str
    instance: int
    quantity: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def as_csv(self) -> list[str]:
        return [self.suite, str(self.instance), self.quantity, repr(float(self.lhs)),
                repr(float(self.rhs)), repr(float(self.slack)), "1" if self.passed else "0"]


DEFAULT_TOLERANCES = {
    "exact": 0.0,
    "norm_identity": 1e-10,
    "radius": 0.10,
    "inequality": 1e-9,
    "calculus": 1e-9,
    "kernel": 1e-10,
    "neumann": 1e-12,
    "hp_width": 1e-3,
    "metric": 1e-12,
    "symmetrize": 1e-12,
    "herglotz": 1e-9,
}


@dataclass
class SuiteConfig:
    seed: int = 0
    n: int | None = None
    d: int | None = None
    D: int | None = None
    N: int | None = None
    trials: int | None = None
    tolerances: dict = field(default_factory=dict)
    suites: list = field(default_factory=list)
    unsafe_sizes: bool = False

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name, cap in CAPS.items():
            v = getattr(self, name)
            if v is not None and (v < (1 if name in "nd" else 0)):
                raise ValueError(f"{name} = {v} is not a valid size")
            if v is not None and v > cap and not self.unsafe_sizes:
                raise SizeCapError(f"{name} = {v} exceeds cap {cap}; pass unsafe_sizes to override")
        if self.trials is not None and self.trials < 0:
            raise ValueError("trials must be non-negative")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise KeyError(f"unknown suite(s): {', '.join(unknown)}")

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def count(self, default: int) -> int:
        return default if self.trials is None else self.trials

    @classmethod
    def from_dict(cls, d: dict) -> SuiteConfig:
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise KeyError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> SuiteConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class _Rows:
    """Collects rows for one suite."""

    def __init__(self, suite: str, cfg: SuiteConfig):
        self.suite = suite
        self.cfg = cfg
        self.rows: list[VerdictRow] = []

    def rng(self, instance: int) -> np.random.Generator:
        return rng_for(int(self.cfg.seed), self.suite, instance)

    def leq(self, instance: int, quantity: str, lhs: float, rhs: float, tol: float) -> None:
        slack = rhs - lhs
        ok = bool(slack >= -tol) and math.isfinite(slack)
        self.rows.append(VerdictRow(self.suite, instance, quantity, float(lhs), float(rhs), float(slack), ok))

    def zero(self, instance: int, quantity: str, error: float, tol: float) -> None:
        self.leq(instance, quantity, error, 0.0, tol)


def _size(cfg_value, default):
    return default if cfg_value is None else cfg_value


def _random_point(rng, n: int, d: int, low: float = 0.05, high: float = 0.95) -> OperatorTuple:
    return gen_row_contraction(rng, n, d, float(rng.uniform(low, high)))


def _maxabs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


# suites --------------------------------------------------------------------------


def suite_homogeneous_norm(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(100)):
        rng = R.rng(i)
        n = _size(cfg.n, 2 + i % 2)
        k = int(rng.integers(0, min(_size(cfg.D, 6), 6) + 1))
        coeffs = _cgauss(rng, n**k)
        blocks = [np.zeros((n**j, 1, 1), complex) for j in range(k)] + [coeffs.reshape(-1, 1, 1)]
        F = FreeSeries(n, 1, tuple(blocks))
        space = TruncatedFock(n, k)
        b = float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))
        norm = op_norm(assemble(F, space))
        R.zero(i, "homogeneous_norm_identity", abs(norm - b) / b, cfg.tol("norm_identity"))


def suite_hadamard_radius(R: _Rows):
    cfg = R.cfg
    ts = (0.3, 0.5, 0.8)
    for i in range(cfg.count(9)):
        rng = R.rng(i)
        t = ts[i % 3]
        F = gen_series(rng, _size(cfg.n, 2), 16, "geometric", t=t)
        est = radius_estimate(F, (8, 16))
        rel = abs(est.point - 1 / t) * t
        R.leq(i, f"radius_relative_error_t={t}", rel, cfg.tol("radius"), 0.0)


def suite_cauchy_estimates(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n = _size(cfg.n, 2)
        D = _size(cfg.D, int(rng.integers(1, 5)))
        F = gen_series(rng, n, D)
        space = TruncatedFock(n, _size(cfg.N, D))
        bn = block_norms(F)
        for rho in (0.5, 0.9):
            M = op_norm(assemble(F, space, rho))
            worst = max(bn[k] * rho**k for k in range(D + 1))
            # b_k <= M(rho) / rho**k, multiplied through by rho**k
            R.leq(i, f"coefficient_bound_rho={rho}", worst, M, cfg.tol("inequality"))


def _vanishing_below(rng, n: int, D: int, m: int) -> FreeSeries:
    F = gen_series(rng, n, D)
    blocks = tuple(np.zeros_like(b) if k < m else b for k, b in enumerate(F.blocks))
    return FreeSeries(n, 1, blocks)


def suite_schwartz(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        m = 1 + i % 2
        D = _size(cfg.D, int(rng.integers(m, 5)))
        F = _vanishing_below(rng, n, D, m)
        upper = boundary_norm_bounds(F).upper
        F = scale(F, 1.0 / upper)
        X = _random_point(rng, n, d)
        FX = evaluate_polynomial(F, X)
        R.leq(i, f"schwartz_norm_m={m}", np.linalg.norm(FX, 2), row_norm(X) ** m, cfg.tol("inequality"))
        spec_F = float(np.max(np.abs(np.linalg.eigvals(FX))))
        R.leq(i, f"schwartz_spectral_radius_m={m}", spec_F, joint_spectral_radius(X).bound ** m,
              cfg.tol("inequality"))
        R.leq(i, "schwartz_block_norms", float(np.max(block_norms(F))), 1.0, cfg.tol("inequality"))


def _random_poly_pair(rng, cfg):
    n = _size(cfg.n, int(rng.integers(1, 4)))
    D1, D2 = (int(x) for x in rng.integers(0, _size(cfg.D, 6) + 1, 2))
    dens = 0.5 if n == 3 else 1.0
    F = gen_series(rng, n, D1, integer=True, density=dens)
    G = gen_series(rng, n, D2, integer=True, density=dens)
    return n, F, G


def suite_derivations(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(200)):
        rng = R.rng(i)
        n, F, G = _random_poly_pair(rng, cfg)
        j = int(rng.integers(1, n + 1))
        R.zero(i, "insertion_vs_deletion", partial(F, j).max_abs_diff(oracle_partial(F, j)), cfg.tol("exact"))
        lhs = partial(multiply(F, G), j)
        rhs = multiply(partial(F, j), G) + multiply(F, partial(G, j))
        R.zero(i, "leibniz_rule", lhs.max_abs_diff(rhs), cfg.tol("exact"))
        a, b = (int(x) for x in rng.integers(1, n + 1, 2))
        R.zero(i, "mixed_partials", partial_k(F, (a, b)).max_abs_diff(partial_k(F, (b, a))), cfg.tol("exact"))


def suite_mixed_partials(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(100)):
        rng = R.rng(i)
        n, F, _ = _random_poly_pair(rng, cfg)
        a, b = (int(x) for x in rng.integers(1, n + 1, 2))
        R.zero(i, "mixed_partials", partial_k(F, (a, b)).max_abs_diff(partial_k(F, (b, a))), cfg.tol("exact"))


def _tuple_below_radius(rng, n: int, d: int, limit: float = 0.95, K: int = 24) -> OperatorTuple:
    """A tuple with ``g_K < limit``; row norms up to 1.3 are tried, so some lie outside the ball."""
    while True:
        T = gen_row_contraction(rng, n, d, float(rng.uniform(0.05, 1.3)))
        if joint_spectral_radius(T, K).estimate < limit:
            return T


def suite_cauchy_transform(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(100)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        D = _size(cfg.D, int(rng.integers(1, 5)))
        F = gen_series(rng, n, D)
        T = _tuple_below_radius(rng, n, d)
        space = TruncatedFock(n, _size(cfg.N, D + 1))
        err = _maxabs(evaluate(F, T).value - cauchy_transform(T, assemble(F, space)))
        R.zero(i, "calculus_equals_cauchy_transform", err, cfg.tol("calculus"))


def suite_cauchy_kernel(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        space = TruncatedFock(n, _size(cfg.N, 4))
        T = _random_point(rng, n, d)
        X = _random_point(rng, n, d)
        CT, CX = cauchy_kernel(T, space), cauchy_kernel(X, space)
        R.leq(i, "cauchy_kernel_norm_bound", CT.norm(), 1 / (1 - row_norm(T)), cfg.tol("kernel"))
        diff = reconstruction_operator(T - X, space).matrix
        resolvent = CT.matrix @ (diff @ CX.matrix)
        R.zero(i, "resolvent_identity", _maxabs(CT.matrix - CX.matrix - resolvent), cfg.tol("kernel"))
        R.zero(i, "neumann_sum_vs_inverse", CT.neumann_defect, cfg.tol("neumann"))


def suite_poisson(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        D = _size(cfg.D, int(rng.integers(1, 4)))
        N = _size(cfg.N, D + int(rng.integers(0, 3)))
        space = TruncatedFock(n, N)
        T = _random_point(rng, n, d)
        K = poisson_kernel(T, space)
        R.zero(i, "poisson_kernel_gram", _maxabs(K.gram() - K.expected_gram()), cfg.tol("kernel"))
        p = gen_series(rng, n, D)
        pT = evaluate_polynomial(p, T)
        err = float(np.linalg.norm(poisson_transform(T, assemble(p, space), K) - pT, 2))
        t = row_norm(T)
        bound = t ** (2 * (N - D + 1)) * (1 + float(np.linalg.norm(pT, 2)))
        R.leq(i, "poisson_reproduction_bound", err, bound, cfg.tol("inequality"))
        R.leq(i, "poisson_reproduction_coefficient_bound", err, poisson_defect_bound(T, p, N),
              cfg.tol("inequality"))


def suite_unitary(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(30)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2 + i % 2), _size(cfg.d, 3)
        U = random_unitary(rng, n)
        T = _random_point(rng, n, d)
        B = beta_U_tuple(T, U)
        err = max(_maxabs(cp_iterate(B, k) - cp_iterate(T, k)) for k in range(5))
        R.zero(i, "unitary_word_sums", err, cfg.tol("kernel"))
        D = _size(cfg.D, int(rng.integers(1, 4)))
        f = gen_series(rng, n, D)
        space = TruncatedFock(n, _size(cfg.N, D))
        lhs = cauchy_transform(T, assemble(beta_U_series(f, U), space))
        rhs = cauchy_transform(B, assemble(f, space))
        R.zero(i, "cauchy_equivariance", _maxabs(lhs - rhs), cfg.tol("calculus"))


def suite_reconstruction(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(4)):
        rng = R.rng(i)
        n = _size(cfg.n, 2)
        d = _size(cfg.d, int(rng.integers(1, 9)))
        N = _size(cfg.N, 8)
        space = TruncatedFock(n, N)
        T = gen_row_contraction(rng, n, d, float(rng.uniform(0.3, 1.2)))
        X = reconstruction_operator(T, space).matrix.tocsr()
        P = X
        for k in range(1, N + 1):
            lhs = op_norm(P)
            rhs = math.sqrt(float(np.linalg.norm(cp_iterate(T, k), 2)))
            R.zero(i, f"reconstruction_power_norm_k={k}", abs(lhs - rhs) / max(rhs, 1e-300),
                   cfg.tol("norm_identity"))
            P = (P @ X).tocsr()


def suite_hardy(R: _Rows):
    cfg = R.cfg
    ps = (1.0, 2.0, 3.0)
    for i in range(cfg.count(6)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        D = _size(cfg.D, 3)
        p = ps[i % 3]
        F = gen_series(rng, n, D)
        space = TruncatedFock(n, _size(cfg.N, D + 2))
        rep = hp_norm(F, p, cells=1000, space=space)
        R.leq(i, f"hp_bracket_width_p={p:g}", rep.width, cfg.tol("hp_width"), 0.0)
        T = _random_point(rng, n, d)
        t = row_norm(T)
        fT = float(np.linalg.norm(evaluate_polynomial(F, T), 2))
        R.leq(i, f"hp_von_neumann_p={p:g}", fT, (1 - t) ** (-1 / p) * rep.certified_upper, cfg.tol("inequality"))
        one = hp_norm(F, 1.0, cells=1000, space=space) if p != 1 else rep
        hinf = hinf_norm(F, (0.5, 0.9, 0.99), space)
        R.leq(i, f"norm_chain_one_le_p={p:g}", one.lower, rep.certified_upper, cfg.tol("inequality"))
        R.leq(i, f"norm_chain_p_le_inf_p={p:g}", rep.lower, hinf.upper, cfg.tol("inequality"))
        bn = block_norms(F)
        worst = max(bn[k] - (p * k + 1) ** (1 / p) * rep.lower for k in range(D + 1))
        R.leq(i, f"hp_coefficient_bound_p={p:g}", worst, 0.0, cfg.tol("inequality"))


def suite_metric_rho(R: _Rows):
    cfg = R.cfg
    tol = cfg.tol("metric")
    for i in range(cfg.count(100)):
        rng = R.rng(i)
        n = _size(cfg.n, 2)
        D = _size(cfg.D, int(rng.integers(1, 4)))
        F, G, H = (gen_series(rng, n, D) for _ in range(3))
        space = TruncatedFock(n, _size(cfg.N, D))
        fg = metric_rho(F, G, space=space).value
        gf = metric_rho(G, F, space=space).value
        fh = metric_rho(F, H, space=space).value
        gh = metric_rho(G, H, space=space).value
        R.zero(i, "rho_identity", metric_rho(F, F, space=space).value, tol)
        R.zero(i, "rho_symmetry", abs(fg - gf), tol)
        R.leq(i, "rho_triangle", fh, fg + gh, tol)
    # partial sums of one geometric-profile series approach it monotonically
    rng = R.rng(10**6)
    D = _size(cfg.D, 10)
    G = gen_series(rng, _size(cfg.n, 2), D, "geometric", t=0.5)
    space = TruncatedFock(G.n, _size(cfg.N, D))
    exact = G.with_tail(None)
    dist = [metric_rho(G.truncate(m), exact, space=space).value for m in range(D + 1)]
    for m in range(D):
        R.leq(10**6 + m, f"weierstrass_partial_sum_m={m + 1}", dist[m + 1], dist[m], 0.0)
    R.zero(10**6 + D, "weierstrass_limit", dist[D], tol)


def suite_cauch_conj(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        D = _size(cfg.D, int(rng.integers(1, 5)))
        f = gen_series(rng, n, D)
        blocks = (f.blocks[0].real.astype(complex),) + f.blocks[1:]
        f = FreeSeries(n, 1, blocks)
        T = _random_point(rng, n, d)
        space = TruncatedFock(n, _size(cfg.N, D))
        err = _maxabs(cauch_conj_matrix(T, pluriharmonic_re(f), space) - evaluate_polynomial(f, T))
        R.zero(i, "cauchy_conjugate_representation", err, cfg.tol("calculus"))


def suite_symmetrization(R: _Rows):
    cfg = R.cfg
    inst = 0
    for n in (1, 2, 3):
        for k in range(9):
            err = 0
            for w_counts in W.multi_indices(n, k):
                found = sum(1 for w in W.enumerate_words(n, k) if W.letter_counts(w, n) == w_counts)
                err = max(err, abs(found - W.multinomial(w_counts)))
            R.zero(inst, f"lambda_cardinality_n={n}_k={k}", float(err), cfg.tol("exact"))
            inst += 1
    for i in range(cfg.count(20)):
        rng = R.rng(1000 + i)
        n = _size(cfg.n, int(rng.integers(1, 4)))
        D = _size(cfg.D, int(rng.integers(0, 5)))
        coeffs = {p: complex(*rng.standard_normal(2)) for k in range(D + 1) for p in W.multi_indices(n, k)}
        lam = _cgauss(rng, n) * 0.9
        F = symmetrize(coeffs, n, D)
        value = evaluate_polynomial(F, OperatorTuple(lam.reshape(n, 1, 1)))[0, 0]
        direct = evaluate_commutative(coeffs, lam)
        R.zero(1000 + i, "symmetrized_diagonal_evaluation", abs(value - direct), cfg.tol("symmetrize"))


def suite_von_neumann(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(50)):
        rng = R.rng(i)
        n, d = _size(cfg.n, 2), _size(cfg.d, 3)
        D = _size(cfg.D, int(rng.integers(1, 5)))
        F = gen_series(rng, n, D)
        T = _random_point(rng, n, d)
        upper = boundary_norm_bounds(F).upper
        R.leq(i, "von_neumann_inequality", float(np.linalg.norm(evaluate_polynomial(F, T), 2)), upper,
              cfg.tol("inequality"))


def suite_herglotz(R: _Rows):
    cfg = R.cfg
    for i in range(cfg.count(20)):
        rng = R.rng(i)
        n = _size(cfg.n, 2)
        D = _size(cfg.D, int(rng.integers(1, 4)))
        g = positive_real_part(gen_series(rng, n, D), margin=float(rng.uniform(0.0, 0.2)))
        space = TruncatedFock(n, _size(cfg.N, D + 2))
        rep = herglotz_check(pluriharmonic_re(g), (0.3, 0.6, 0.9, 0.99, 1.0), space)
        R.leq(i, "herglotz_positivity", -rep.min_eig, 0.0, cfg.tol("herglotz"))


def suite_dirichlet(R: _Rows):
    cfg = R.cfg
    grid = (0.5, 0.9, 0.99, 0.999)
    cases = [
        ("polynomial", lambda rng: gen_series(rng, 2, 3), "continuous"),
        ("geometric_0.99", lambda rng: FreeSeries.from_dict({(1,) * k: 0.99**k for k in range(40)}, 1,
                                                             tail=Tail(1.0, 0.99)), "continuous"),
        ("unit_blocks", lambda rng: FreeSeries.from_dict({(1,) * k: 1.0 for k in range(40)}, 1,
                                                         tail=Tail(1.0, 1.0)), "discontinuous"),
    ]
    for i, (name, make, expected) in enumerate(cases):
        F = make(R.rng(i))
        rep = dirichlet_boundary_check(F, grid, TruncatedFock(F.n, min(F.degree, 40 if F.n == 1 else 5)))
        R.zero(i, f"dirichlet_verdict_{name}", 0.0 if rep.verdict == expected else 1.0, cfg.tol("exact"))


SUITES: dict[str, Callable[[_Rows], None]] = {
    "homogeneous_norm": suite_homogeneous_norm,
    "hadamard_radius": suite_hadamard_radius,
    "cauchy_estimates": suite_cauchy_estimates,
    "schwartz": suite_schwartz,
    "derivations": suite_derivations,
    "mixed_partials": suite_mixed_partials,
    "cauchy_transform": suite_cauchy_transform,
    "cauchy_kernel": suite_cauchy_kernel,
    "poisson": suite_poisson,
    "unitary": suite_unitary,
    "reconstruction": suite_reconstruction,
    "hardy": suite_hardy,
    "metric_rho": suite_metric_rho,
    "cauch_conj": suite_cauch_conj,
    "symmetrization": suite_symmetrization,
    "von_neumann": suite_von_neumann,
    "herglotz": suite_herglotz,
    "dirichlet": suite_dirichlet,
}


def run_suite(cfg: SuiteConfig, names: Iterable[str] | None = None) -> list[VerdictRow]:
    """Run the configured suites; rows come back ordered by (suite, instance)."""
    names = list(cfg.suites if names is None else names)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    rows: list[VerdictRow] = []
    for name in names:
        collector = _Rows(name, cfg)
        SUITES[name](collector)
        rows.extend(sorted(collector.rows, key=lambda r: r.instance))
    return rows


def all_passed(rows: Iterable[VerdictRow]) -> bool:
    return all(r.passed for r in rows)


def rows_to_csv(rows: Iterable[VerdictRow], timestamp: bool = True) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()

"""Functional calculus at matrix tuples and the function-space norms built on it.

A tuple ``T = (T_1, ..., T_n)`` is stored as one array of shape ``(n, d, d)``.
``evaluate(F, T)`` returns ``sum_alpha A_alpha (x) T_alpha`` with the
coefficient factor first, so a ``q x q`` coefficient series yields a
``qd x qd`` matrix.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import words as W
from .certify import boundary_norm_bounds
from .fock import FockOperator, TruncatedFock, assemble, default_level, homogeneous_matrix, left_creation
from .series import FreeSeries, ShapeMismatch, Tail, block_norms

UNITARY_TOL = 1e-10
DEFAULT_DEPTH = 24
#: dense per-degree word products are built when n**k * d * d stays below this
DENSE_PRODUCT_LIMIT = 4_000_000
#: relative inflation applied to floating-point bounds that can be attained exactly
_ROUNDING = 1 + 1e-12


class UnitaryError(ValueError):
    pass


class BallWarning(UserWarning):
    """The evaluation point may lie outside the domain of convergence."""


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    mats: np.ndarray

    def __post_init__(self):
        m = np.array(self.mats, dtype=complex)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ShapeMismatch(f"expected (n, d, d), got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("tuple entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "mats", m)

    @classmethod
    def of(cls, *mats) -> OperatorTuple:
        return cls(np.stack([np.asarray(a, dtype=complex) for a in mats]))

    @classmethod
    def zeros(cls, n: int, d: int) -> OperatorTuple:
        return cls(np.zeros((n, d, d), dtype=complex))

    @property
    def n(self) -> int:
        return self.mats.shape[0]

    @property
    def d(self) -> int:
        return self.mats.shape[1]

    def __getitem__(self, i: int) -> np.ndarray:
        """1-based access: ``T[1]`` is the first operator."""
        if not 1 <= i <= self.n:
            raise IndexError(f"operator {i} outside 1..{self.n}")
        return self.mats[i - 1]

    def __sub__(self, other: OperatorTuple) -> OperatorTuple:
        return OperatorTuple(self.mats - other.mats)

    def __mul__(self, c) -> OperatorTuple:
        return OperatorTuple(self.mats * c)

    __rmul__ = __mul__


def as_tuple(T) -> OperatorTuple:
    return T if isinstance(T, OperatorTuple) else OperatorTuple(np.asarray(T))


def row_norm(T) -> float:
    """``||sum T_i T_i^*||^{1/2}``, the norm of the row ``[T_1 ... T_n]``."""
    T = as_tuple(T)
    return float(np.linalg.norm(np.concatenate(list(T.mats), axis=1), 2))


def cp_map(T, X: np.ndarray) -> np.ndarray:
    """``sum_i T_i X T_i^*``."""
    M = as_tuple(T).mats
    return np.einsum("iab,bc,idc->ad", M, X, M.conj())


def cp_iterate(T, k: int) -> np.ndarray:
    """``sum_{|alpha|=k} T_alpha T_alpha^*``, computed as ``Phi^k(I)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    T = as_tuple(T)
    X = np.eye(T.d, dtype=complex)
    for _ in range(k):
        X = cp_map(T, X)
    return (X + X.conj().T) / 2


def _cp_norms(T: OperatorTuple, K: int) -> np.ndarray:
    """``||Phi^k(I)||`` for ``k = 0..K``."""
    out = np.empty(K + 1)
    X = np.eye(T.d, dtype=complex)
    for k in range(K + 1):
        out[k] = np.linalg.norm((X + X.conj().T) / 2, 2)
        X = cp_map(T, X)
    return out


@dataclass(frozen=True)
class SpectralData:
    """Gelfand sequence ``g_k = ||Phi^k(I)||^{1/2k}``, ``k = 1..K``.

    ``estimate`` is ``g_K``.  Every ``g_k`` is an upper bound for the joint
    spectral radius (submultiplicativity), so ``bound = min g_k`` is one too.
    """

    gelfand: tuple[float, ...]
    estimate: float
    K: int
    bound: float


def joint_spectral_radius(T, K: int = DEFAULT_DEPTH) -> SpectralData:
    if K < 1:
        raise ValueError("depth K must be >= 1")
    T = as_tuple(T)
    norms = _cp_norms(T, K)
    g = tuple(float(norms[k] ** (1.0 / (2 * k))) for k in range(1, K + 1))
    return SpectralData(g, g[-1], K, min(g))


def word_product(T, w) -> np.ndarray:
    T = as_tuple(T)
    out = np.eye(T.d, dtype=complex)
    for x in w:
        out = out @ T[x]
    return out


def reconstruction_operator(T, space: TruncatedFock) -> FockOperator:
    """``sum_i S_i (x) T_i^*`` with the Fock factor first."""
    T = as_tuple(T)
    if T.n != space.n:
        raise ShapeMismatch(f"tuple has n={T.n}, space has n={space.n}")
    total = sp.csr_matrix((space.dim * T.d, space.dim * T.d), dtype=complex)
    for i in range(1, T.n + 1):
        total = total + sp.kron(left_creation(space, i).matrix, sp.csr_matrix(T[i].conj().T), format="csr")
    return FockOperator(space, total.tocsr(), T.d)


# evaluation -------------------------------------------------------------------


def _products_dense(M: np.ndarray, k: int) -> np.ndarray:
    """All ``T_alpha`` with ``|alpha| = k`` stacked by rank."""
    n, d, _ = M.shape
    P = np.eye(d, dtype=complex)[None]
    for _ in range(k):
        # T_{i alpha} = T_i T_alpha, rank(i alpha) = (i-1) n**k + rank(alpha)
        P = np.einsum("iab,jbc->ijac", M, P).reshape(-1, d, d)
    return P


def _block_value(F: FreeSeries, k: int, M: np.ndarray, cache: dict) -> np.ndarray:
    n, d, _ = M.shape
    q = F.q
    A = F.blocks[k]
    nz = np.flatnonzero(np.any(A != 0, axis=(1, 2)))
    if nz.size == 0:
        return np.zeros((q * d, q * d), dtype=complex)
    if n**k * d * d <= DENSE_PRODUCT_LIMIT and nz.size * 4 >= n**k:
        P = _products_dense(M, k)[nz]
    else:
        # word trie: T_{alpha i} = T_alpha T_i, each prefix computed once
        rows = []
        for r in nz:
            w = W.unrank(int(r), n, k)
            for j in range(1, k + 1):
                if w[:j] not in cache:
                    cache[w[:j]] = cache[w[: j - 1]] @ M[w[j - 1] - 1]
            rows.append(cache[w])
        P = np.stack(rows)
    # sum_alpha A_alpha (x) T_alpha
    return np.einsum("auv,aij->uivj", A[nz], P).reshape(q * d, q * d)


def evaluate_polynomial(F: FreeSeries, T) -> np.ndarray:
    T = as_tuple(T)
    if T.n != F.n:
        raise ShapeMismatch(f"series has n={F.n}, tuple has n={T.n}")
    cache = {(): np.eye(T.d, dtype=complex)}
    total = np.zeros((F.q * T.d, F.q * T.d), dtype=complex)
    for k in range(F.degree + 1):
        total += _block_value(F, k, T.mats, cache)
    return total


def series_tail_bound(tail: Tail, start: int, T: OperatorTuple, exact_terms: int = 48) -> float | None:
    """Bound on ``sum_{k >= start} c t**k ||Phi^k(I)||^{1/2}``; ``None`` if it may diverge.

    Terms up to ``start + exact_terms`` use the computed norms.  Beyond that,
    ``||Phi^{jL + i}|| <= ||Phi^L||^j ||Phi^i||`` gives ``||Phi^k||^{1/2} <= C s**k``
    with ``s = g_L`` for the best depth ``L``.
    """
    c, t = tail.c, tail.t
    if c == 0 or t == 0:
        return 0.0
    K = start + exact_terms
    norms = _cp_norms(T, K)
    half = np.sqrt(norms)
    exact = float(sum(c * t**k * half[k] for k in range(start, K + 1)))
    g = np.array([norms[k] ** (1.0 / (2 * k)) for k in range(1, K + 1)])
    L = int(np.argmin(g)) + 1
    s = float(g[L - 1])
    if s == 0:
        return exact * _ROUNDING
    if t * s >= 1:
        return None
    C = max(float(half[i] / s**i) for i in range(L))
    return (exact + c * C * (t * s) ** (K + 1) / (1 - t * s)) * _ROUNDING


@dataclass(frozen=True, eq=False)
class Evaluation:
    value: np.ndarray
    tail_bound: float | None
    flags: tuple[str, ...] = ()


def evaluate(F: FreeSeries, T) -> Evaluation:
    """``F(T)`` from the stored blocks, plus a rigorous bound on the unstored part.

    The ball-membership check is advisory: a warning is issued when the
    spectral-radius bound of ``T`` is not below the certified radius.
    """
    T = as_tuple(T)
    value = evaluate_polynomial(F, T)
    flags = []
    if F.tail is None:
        tail_bound = 0.0
    else:
        tail_bound = series_tail_bound(F.tail, F.degree + 1, T)
        if tail_bound is None:
            flags.append("tail_unbounded")
            radius = math.inf if F.tail.t == 0 else 1.0 / F.tail.t
            warnings.warn(f"spectral radius bound not below certified radius {radius:.4g}", BallWarning)
    return Evaluation(value, tail_bound, tuple(flags))


# Fock-model norms -------------------------------------------------------------------


def _fock_space(F: FreeSeries, space: TruncatedFock | None) -> TruncatedFock:
    if space is None:
        return TruncatedFock(F.n, default_level(F.n, F.degree, F.q))
    if space.n != F.n:
        raise ShapeMismatch(f"series has n={F.n}, space has n={space.n}")
    return space


class _RadialModel:
    """``r -> ||F(rS)||`` on a fixed truncation, with the homogeneous parts precomputed."""

    def __init__(self, F: FreeSeries, space: TruncatedFock):
        self.F = F
        self.space = space
        top = min(F.degree, space.N)
        if F.q == 1:
            parts = [homogeneous_matrix(space, k, F.blocks[k][:, 0, 0]) for k in range(top + 1)]
        else:
            parts = [assemble(F.homogeneous(k), space).matrix for k in range(top + 1)]
        self.dense = space.dim * F.q < 2000
        self.parts = [p.toarray() if self.dense else p.tocsr() for p in parts]

    def __call__(self, r: float) -> float:
        from .fock import op_norm

        total = sum((r**k) * p for k, p in enumerate(self.parts))
        if self.dense:
            return float(np.linalg.norm(total, 2))
        return op_norm(total)


def boundary_norm(F: FreeSeries, r: float = 1.0, space: TruncatedFock | None = None) -> float:
    """``||F(rS)||`` on the truncated Fock space (a lower bound for the full norm)."""
    return _RadialModel(F, _fock_space(F, space))(r)


@dataclass(frozen=True)
class HinfReport:
    """``per_r`` are truncated-model norms; ``sup`` is their maximum (a lower bound).

    ``upper`` is a certified upper bound for ``sup_{r<1} ||F(rS)||`` on the full
    Fock space and ``lower`` a certified lower bound for it.  ``gap`` bounds
    ``||F(S) - F(r_max S)||`` by ``sum_k (1 - r_max**k) b_k``.
    """

    grid: tuple[float, ...]
    per_r: tuple[float, ...]
    sup: float
    lower: float
    upper: float
    gap: float
    method: str
    flags: tuple[str, ...] = ()


def hinf_norm(F: FreeSeries, grid=(0.5, 0.9, 0.99), space: TruncatedFock | None = None) -> HinfReport:
    grid = tuple(float(r) for r in grid)
    if not grid or any(not 0 <= r < 1 for r in grid):
        raise ValueError("grid must be a non-empty subset of [0, 1)")
    space = _fock_space(F, space)
    model = _RadialModel(F, space)
    per_r = tuple(model(r) for r in grid)
    sup = max(per_r)
    flags = []
    bracket = boundary_norm_bounds(F, 1.0)
    upper = bracket.upper
    if math.isinf(upper):
        flags.append("upper_unbounded")
    lower = max(sup, bracket.lower if F.tail is None else 0.0)
    rmax = max(grid)
    bn = block_norms(F)
    gap = float(sum((1 - rmax**k) * b for k, b in enumerate(bn)))
    if F.tail:
        gap += F.tail.sum_bound(F.degree + 1, 1.0)
    if space.N < F.degree:
        flags.append("truncation_below_degree")
    if any(b < a - 1e-9 * max(1.0, a) for a, b in zip(per_r, per_r[1:])) and list(grid) == sorted(grid):
        flags.append("non_monotone")
    return HinfReport(grid, per_r, sup, lower, upper, gap, bracket.method, tuple(flags))


# H^p -------------------------------------------------------------------------


@dataclass(frozen=True)
class HpReport:
    """``lower``/``upper`` bracket the integral over the truncated model.

    ``certified_upper`` bounds the norm on the full Fock space from above
    (certified boundary norms on coarse nodes); ``lower`` is also a valid lower
    bound there because truncation only decreases norms.
    """

    p: float
    lower: float
    upper: float
    certified_upper: float
    cells: int
    flags: tuple[str, ...] = ()

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _cell_weights(r0: float, r1: float) -> tuple[float, float]:
    """``int_{r0}^{r1} (1 - lam(r), lam(r)) dr`` with ``lam`` linear in ``log r``."""
    h = r1 - r0
    s0, s1 = math.log(r0), math.log(r1)
    # int (log r - s0) dr = [r log r - r] - s0 h
    integral = (r1 * s1 - r1) - (r0 * s0 - r0) - s0 * h
    w1 = integral / (s1 - s0)
    return h - w1, w1


def _log_convex_bracket(r: np.ndarray, phi: np.ndarray, phi_hi: np.ndarray | None = None) -> tuple[float, float]:
    """Integral bracket for a nondecreasing ``phi`` that is convex in ``log r``.

    Upper: chords in ``log r`` between nodes (evaluated with ``phi_hi`` when
    only upper values are known at the nodes).  Lower: the previous cell's
    secant extended forward, which a convex function stays above.
    Cells touching ``r = 0`` fall back to monotone Riemann bounds.
    """
    if phi_hi is None:
        phi_hi = phi
    lo = hi = 0.0
    for i in range(len(r) - 1):
        r0, r1 = r[i], r[i + 1]
        h = r1 - r0
        if r0 == 0:
            lo += h * phi[i]
            hi += h * phi_hi[i + 1]
            continue
        a, b = _cell_weights(r0, r1)
        hi += a * phi_hi[i] + b * phi_hi[i + 1]
        if i >= 1 and r[i - 1] > 0:
            s_prev, s0, s1 = math.log(r[i - 1]), math.log(r0), math.log(r1)
            # rounding can make the secant slope slightly negative; monotonicity caps it at 0
            slope = max(0.0, (phi[i] - phi[i - 1]) / (s0 - s_prev))
            lo += phi[i] * h + slope * b * (s1 - s0)
        else:
            lo += h * phi[i]
    return lo, hi


def hp_norm(
    F: FreeSeries,
    p: float = 2.0,
    cells: int = 1000,
    space: TruncatedFock | None = None,
    nodes: int = 32,
    method: str = "log_convex",
) -> HpReport:
    """``(int_0^1 ||F(rS)||^p dr)^{1/p}``.

    ``r -> ||F(rS)||`` is nondecreasing, and by gauge invariance it is
    log-subharmonic and radial, hence convex in ``log r``.  ``method`` selects
    the plain left/right Riemann bracket (``"riemann"``) or the tighter chord
    and secant bracket that uses convexity (``"log_convex"``).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if cells < 1 or nodes < 1:
        raise ValueError("need at least one cell")
    if method not in ("riemann", "log_convex"):
        raise ValueError(f"unknown method {method!r}")
    flags = []
    if F.tail is not None and F.tail.t > 1:
        raise ValueError(f"tail ratio {F.tail.t} > 1: the radial maximal function is not integrable")
    if space is None:
        # many radii are sampled, so the model defaults to the smallest level covering the degree plus two
        space = TruncatedFock(F.n, min(F.degree + 2, default_level(F.n, F.degree, F.q)))
    space = _fock_space(F, space)
    model = _RadialModel(F, space)
    r = np.linspace(0.0, 1.0, cells + 1)
    M = np.array([model(x) for x in r])
    tail_at = np.zeros_like(r)
    if F.tail:
        tail_at = np.array([F.tail.sum_bound(F.degree + 1, x) for x in r])
    lower_vals = np.maximum(M - tail_at, 0.0)
    upper_vals = M + tail_at
    if np.isinf(upper_vals[-1]):
        flags.append("unbounded_at_boundary")

    def bracket(phi_lo, phi_hi, grid):
        if method == "riemann":
            h = np.diff(grid)
            return float(np.sum(h * phi_lo[:-1])), float(np.sum(h * phi_hi[1:]))
        lo, _ = _log_convex_bracket(grid, phi_lo)
        _, hi = _log_convex_bracket(grid, phi_lo, phi_hi)
        return lo, hi

    if F.tail:
        # tail-perturbed values are no longer log-convex; stay with monotone sums
        h = np.diff(r)
        lo_int = float(np.sum(h * lower_vals[:-1] ** p))
        hi_int = float(np.sum(h * upper_vals[1:] ** p))
    else:
        lo_int, hi_int = bracket(M**p, M**p, r)
    lower = lo_int ** (1 / p)
    upper = hi_int ** (1 / p) if math.isfinite(hi_int) else math.inf

    # certified upper bound from full-space norm bounds on coarse nodes
    rc = np.linspace(0.0, 1.0, nodes + 1)
    ub = np.array([boundary_norm_bounds(F, float(x)).upper for x in rc])
    if np.isinf(ub[-1]):
        flags.append("certified_upper_unbounded")
        cert = math.inf
    elif F.tail:
        cert = float(np.sum(np.diff(rc) * ub[1:] ** p)) ** (1 / p)
    else:
        lo_model = np.array([model(float(x)) for x in rc]) ** p
        cert = _log_convex_bracket(rc, lo_model, ub**p)[1] ** (1 / p) if method == "log_convex" else (
            float(np.sum(np.diff(rc) * ub[1:] ** p)) ** (1 / p)
        )
    cert = max(cert, upper) if math.isfinite(upper) else cert
    return HpReport(float(p), float(lower), float(upper), float(cert), cells, tuple(flags))


# metric rho ------------------------------------------------------------------


@dataclass(frozen=True)
class RhoReport:
    value: float
    terms: int
    truncation_error: float
    per_m: tuple[float, ...] = field(default=(), repr=False)


def metric_rho(F: FreeSeries, G: FreeSeries, M: int = 20, space: TruncatedFock | None = None) -> RhoReport:
    """``sum_{m <= M} 2**-m x_m / (1 + x_m)``, ``x_m = ||(F - G)(r_m S)||``, ``r_m = 1 - 2**-m``."""
    if (F.n, F.q) != (G.n, G.q):
        raise ShapeMismatch("series differ in n or q")
    if M < 1:
        raise ValueError("need at least one term")
    diff = F - G
    space = space or TruncatedFock(F.n, default_level(F.n, diff.degree, F.q))
    model = _RadialModel(diff, space)
    xs = [model(1.0 - 2.0**-m) for m in range(1, M + 1)]
    total = float(sum(0.5**m * x / (1 + x) for m, x in enumerate(xs, start=1)))
    return RhoReport(total, M, 0.5**M, tuple(xs))


# unitary action -------------------------------------------------------------------


def _check_unitary(U: np.ndarray, n: int) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (n, n):
        raise ShapeMismatch(f"U must be {n}x{n}, got {U.shape}")
    if np.linalg.norm(U.conj().T @ U - np.eye(n), 2) > UNITARY_TOL:
        raise UnitaryError("U is not unitary within tolerance")
    return U


def beta_U_tuple(T, U) -> OperatorTuple:
    """``B_j = sum_i U[i, j] T_i``."""
    T = as_tuple(T)
    U = _check_unitary(U, T.n)
    return OperatorTuple(np.einsum("ij,iab->jab", U, T.mats))


def beta_U_series(F: FreeSeries, U) -> FreeSeries:
    """Substitute ``Z_j -> sum_i U[i, j] Z_i``: ``U`` acts on every word axis of each block."""
    U = _check_unitary(U, F.n)
    blocks = []
    for k in range(F.degree + 1):
        A = F.block_tensor(k)
        for axis in range(k):
            A = np.moveaxis(np.tensordot(U, A, axes=(1, axis)), 0, axis)
        blocks.append(np.ascontiguousarray(A.reshape(F.n**k, F.q, F.q)))
    return FreeSeries(F.n, F.q, tuple(blocks), F.tail)

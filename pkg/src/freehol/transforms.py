"""Cauchy and Poisson kernels on the truncated Fock space, and pluriharmonic functions.

Operators here act on ``F^2_N (x) C^d`` with the Fock factor first: the
coordinate of ``e_alpha (x) y`` is ``rank(alpha) * d + index(y)``.  (The
boundary operators from :func:`freehol.fock.assemble` are scalar, so
``A (x) I_d`` is just ``kron(A, I_d)``.)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import words as W
from .calculus import (
    OperatorTuple,
    _cp_norms,
    as_tuple,
    cp_iterate,
    evaluate_polynomial,
    reconstruction_operator,
    row_norm,
)
from .certify import boundary_norm_bounds
from .derivations import partial_k
from .fock import FockOperator, TruncatedFock, assemble, default_level, op_norm
from .series import FreeSeries, ShapeMismatch, add, block_norms, scale

DELTA_CLAMP = 1e-10
ROW_NORM_SLACK = 1e-12
DENSE_INVERSE_LIMIT = 6000


def _check_space(T: OperatorTuple, space: TruncatedFock) -> None:
    if T.n != space.n:
        raise ShapeMismatch(f"tuple has n={T.n}, space has n={space.n}")


def vacuum_embedding(space: TruncatedFock, d: int) -> np.ndarray:
    """``J x = 1 (x) x``."""
    J = np.zeros((space.dim * d, d), dtype=complex)
    J[:d] = np.eye(d)
    return J


def _word_adjoint_stack(T: OperatorTuple, space: TruncatedFock, left: np.ndarray | None = None) -> np.ndarray:
    """Column ``[L T_beta^*]_beta`` over all ``|beta| <= N`` in rank order.

    Built level by level from ``T_{beta i}^* = T_i^* T_beta^*``;
    ``rank(beta i) = rank(beta) n + i - 1``.
    """
    d, n = T.d, T.n
    Ts = np.conj(np.swapaxes(T.mats, 1, 2))
    level = np.eye(d, dtype=complex)[None]
    out = [level]
    for _ in range(space.N):
        level = np.einsum("iab,jbc->jiac", Ts, level).reshape(-1, d, d)
        out.append(level)
    stack = np.concatenate(out)
    if left is not None:
        stack = np.einsum("ab,kbc->kac", left, stack)
    return stack.reshape(space.dim * d, d)


# Cauchy ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CauchyKernel:
    """``C_T = (I - sum S_i (x) T_i^*)^{-1} = sum_{|alpha| <= N} S_alpha (x) T_{reverse(alpha)}^*``.

    ``neumann_defect`` is the largest entry difference between the direct
    inverse and the finite Neumann sum, which is exact on the truncation.
    """

    tuple: OperatorTuple
    space: TruncatedFock
    matrix: np.ndarray
    neumann_defect: float

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def neumann_sum(T, space: TruncatedFock) -> np.ndarray:
    """``sum_{k <= N} X^k`` for the reconstruction operator ``X``; exact since ``X^{N+1} = 0``."""
    T = as_tuple(T)
    X = reconstruction_operator(T, space).matrix
    I = sp.identity(X.shape[0], dtype=complex, format="csr")
    C = I
    for _ in range(space.N):
        C = I + X @ C
    return C.toarray()


def cauchy_kernel(T, space: TruncatedFock) -> CauchyKernel:
    T = as_tuple(T)
    _check_space(T, space)
    X = reconstruction_operator(T, space).matrix
    m = X.shape[0]
    if m > DENSE_INVERSE_LIMIT:
        raise MemoryError(f"kernel of size {m} exceeds the dense limit {DENSE_INVERSE_LIMIT}")
    direct = np.linalg.inv(np.eye(m, dtype=complex) - X.toarray())
    series = neumann_sum(T, space)
    defect = float(np.max(np.abs(direct - series)))
    return CauchyKernel(T, space, direct, defect)


def cauchy_vector(T, space: TruncatedFock) -> np.ndarray:
    """``W y = sum_{|beta| <= N} e_beta (x) T_beta^* y``, i.e. ``C_T(R_1, ..., R_n)(1 (x) y)``."""
    T = as_tuple(T)
    _check_space(T, space)
    return _word_adjoint_stack(T, space)


def cauchy_vector_via_right(T, space: TruncatedFock) -> np.ndarray:
    """Same vector through the right creation operators: ``(I - sum R_i (x) T_i^*)^{-1} J``."""
    from .fock import right_creation

    T = as_tuple(T)
    _check_space(T, space)
    m = space.dim * T.d
    X = sp.csr_matrix((m, m), dtype=complex)
    for i in range(1, T.n + 1):
        X = X + sp.kron(right_creation(space, i).matrix, sp.csr_matrix(T[i].conj().T), format="csr")
    J = vacuum_embedding(space, T.d)
    out = J.copy()
    for _ in range(space.N):
        out = J + X @ out
    return out


def _fock_matrix(A) -> sp.spmatrix | np.ndarray:
    if isinstance(A, FockOperator):
        if A.q != 1:
            raise ShapeMismatch("transforms take scalar boundary operators (q = 1)")
        return A.matrix
    return A


def cauchy_transform(T, A) -> np.ndarray:
    """``C_T(A) = W^* (A (x) I) J``; ``A`` is a scalar operator on the truncated Fock space."""
    T = as_tuple(T)
    M = _fock_matrix(A)
    if not isinstance(A, FockOperator):
        raise TypeError("A must be a FockOperator")
    Wv = cauchy_vector(T, A.space)
    # (A (x) I)(1 (x) x) = A e_0 (x) x
    col = M[:, [0]]
    col = col.toarray() if sp.issparse(col) else np.asarray(col)
    return Wv.conj().T @ np.kron(col, np.eye(T.d))


def cauchy_derivative_repr(T, F: FreeSeries, indices, space: TruncatedFock | None = None) -> np.ndarray:
    """``(d^k F / dZ_{i1} ... dZ_{ik})(T)`` through the Fock space.

    The Cauchy vector is differentiated word by word: its block at ``beta``
    becomes ``(d^k T_beta / dT_{i1} ... dT_{ik})^*``, and the result is paired
    with ``F(S)(1 (x) x)``.
    """
    T = as_tuple(T)
    if F.q != 1:
        raise ShapeMismatch("scalar series only")
    if F.tail is not None:
        raise ValueError("the Fock representation is exact for polynomials only")
    space = space or TruncatedFock(F.n, F.degree)
    _check_space(T, space)
    indices = tuple(indices)
    d = T.d
    blocks = np.zeros((space.dim, d, d), dtype=complex)
    k = len(indices)
    for beta in W.iter_words(T.n, space.N):
        if len(beta) < k:
            continue
        dm = partial_k(FreeSeries.monomial(beta, T.n), indices)
        if not any(b.any() for b in dm.blocks):
            continue
        blocks[space.rank(beta)] = evaluate_polynomial(dm, T).conj().T
    Wd = blocks.reshape(space.dim * d, d)
    A = assemble(F, space)
    col = A.matrix[:, [0]].toarray()
    return Wd.conj().T @ np.kron(col, np.eye(d))


def derivative_estimate(T, f_norm: float, exact_terms: int = 64) -> float:
    """``f_norm * sum_{k >= 1} k**1.5 ||Phi^{k-1}(I)||^{1/2}``; ``inf`` if not certified finite.

    Bounds ``||(df/dZ_i)(T)||`` for ``||f||_inf <= f_norm``.
    """
    T = as_tuple(T)
    K = exact_terms
    norms = _cp_norms(T, K)
    half = np.sqrt(norms)
    total = float(sum(k**1.5 * half[k - 1] for k in range(1, K + 2)))
    g = np.array([norms[k] ** (1.0 / (2 * k)) for k in range(1, K + 1)])
    L = int(np.argmin(g)) + 1
    s = float(g[L - 1])
    if s > 0:
        # ||Phi^j||^{1/2} <= C s**j; the terms k**1.5 C s**(k-1) then decay with ratio below rho
        C = max(float(half[i] / s**i) for i in range(L))
        rho = ((K + 3) / (K + 2)) ** 1.5 * s
        if rho >= 1:
            return math.inf
        total += (K + 2) ** 1.5 * C * s ** (K + 1) / (1 - rho)
    return f_norm * total


# Poisson ----------------------------------------------------------------------


def defect_root(T) -> np.ndarray:
    """``Delta_T = (I - sum T_i T_i^*)^{1/2}``, clamping roundoff-sized negative eigenvalues."""
    T = as_tuple(T)
    if row_norm(T) > 1 + ROW_NORM_SLACK:
        raise ValueError(f"row norm {row_norm(T):.6g} > 1: not a row contraction")
    G = np.eye(T.d) - cp_iterate(T, 1)
    w, V = np.linalg.eigh((G + G.conj().T) / 2)
    if w.min() < -DELTA_CLAMP:
        raise ValueError(f"defect operator has eigenvalue {w.min():.3g}")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.conj().T


@dataclass(frozen=True, eq=False)
class PoissonKernel:
    """``K y = sum_{|alpha| <= N} e_alpha (x) Delta T_alpha^* y``."""

    tuple: OperatorTuple
    space: TruncatedFock
    delta: np.ndarray
    K: np.ndarray

    def gram(self) -> np.ndarray:
        return self.K.conj().T @ self.K

    def expected_gram(self) -> np.ndarray:
        """``I - Phi^{N+1}(I)`` (the sum telescopes)."""
        return np.eye(self.tuple.d) - cp_iterate(self.tuple, self.space.N + 1)


def poisson_kernel(T, space: TruncatedFock) -> PoissonKernel:
    T = as_tuple(T)
    _check_space(T, space)
    delta = defect_root(T)
    return PoissonKernel(T, space, delta, _word_adjoint_stack(T, space, left=delta))


def poisson_transform(T, A, kernel: PoissonKernel | None = None) -> np.ndarray:
    """``K^* (A (x) I) K``."""
    T = as_tuple(T)
    if not isinstance(A, FockOperator):
        raise TypeError("A must be a FockOperator")
    M = _fock_matrix(A)
    kernel = kernel or poisson_kernel(T, A.space)
    if kernel.space != A.space:
        raise ShapeMismatch("kernel and operator live on different truncations")
    d, dim = T.d, A.space.dim
    # (A (x) I) K, contracting the Fock index only
    AK = (M @ kernel.K.reshape(dim, d * d)).reshape(dim * d, d)
    out = kernel.K.conj().T @ AK
    return np.asarray(out)


def poisson_polynomial_correction(T, p: FreeSeries, N: int) -> np.ndarray:
    """``p(T) - P_T(p(S)) = sum_beta a_beta T_beta Phi^{N - |beta| + 1}(I)`` on level ``N``."""
    T = as_tuple(T)
    if p.q != 1 or p.tail is not None:
        raise ValueError("scalar polynomial expected")
    out = np.zeros((T.d, T.d), dtype=complex)
    Phi = [cp_iterate(T, j) for j in range(N + 2)]
    for beta, a in p.items():
        if len(beta) > N:
            continue
        Tb = np.eye(T.d, dtype=complex)
        for x in beta:
            Tb = Tb @ T[x]
        out += a[0, 0] * Tb @ Phi[N - len(beta) + 1]
    return out


def poisson_defect_bound(T, p: FreeSeries, N: int) -> float:
    """``sum_beta |a_beta| ||T||**(2(N - |beta| + 1) + |beta|)``, a bound on the correction norm."""
    t = row_norm(T)
    return float(sum(abs(a[0, 0]) * t ** (2 * (N - len(b) + 1) + len(b)) for b, a in p.items() if len(b) <= N))


# pluriharmonic functions ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PluriharmonicFunction:
    """``u(X) = holo(X) + anti(X)^*``; the constant term is kept in ``holo`` only."""

    holo: FreeSeries
    anti: FreeSeries

    def __post_init__(self):
        if (self.holo.n, self.holo.q) != (self.anti.n, self.anti.q):
            raise ShapeMismatch("holomorphic and adjoint parts differ in n or q")
        if self.anti.blocks[0].any():
            raise ValueError("the adjoint part must have zero constant term")

    @property
    def n(self) -> int:
        return self.holo.n

    def is_self_adjoint(self, atol: float = 0.0) -> bool:
        c = self.holo.blocks[0][0]
        if not np.allclose(c, c.conj().T, rtol=0, atol=atol):
            return False
        D = max(self.holo.degree, self.anti.degree)
        h, a = self.holo.pad(D), self.anti.pad(D)
        return all(np.allclose(x, y, rtol=0, atol=atol) for x, y in zip(h.blocks[1:], a.blocks[1:]))

    def __add__(self, other: PluriharmonicFunction) -> PluriharmonicFunction:
        return PluriharmonicFunction(add(self.holo, other.holo), add(self.anti, other.anti))

    def scale(self, c: complex) -> PluriharmonicFunction:
        """``c u``: the adjoint part picks up ``conj(c)``."""
        return PluriharmonicFunction(scale(self.holo, c), scale(self.anti, np.conj(c)))


def _without_constant(F: FreeSeries) -> FreeSeries:
    blocks = (np.zeros_like(F.blocks[0]),) + F.blocks[1:]
    return FreeSeries(F.n, F.q, blocks, F.tail)


def pluriharmonic_re(F: FreeSeries) -> PluriharmonicFunction:
    """``Re F = (F + F^*) / 2``."""
    half = scale(F, 0.5)
    c = F.blocks[0][0]
    holo_blocks = ((c + c.conj().T)[None] / 2,) + half.blocks[1:]
    holo = FreeSeries(F.n, F.q, holo_blocks, half.tail)
    return PluriharmonicFunction(holo, _without_constant(half))


def holomorphic(F: FreeSeries) -> PluriharmonicFunction:
    """``F`` itself as a pluriharmonic pair with zero adjoint part."""
    return PluriharmonicFunction(F, FreeSeries.zero(F.n, F.q, F.degree))


def eval_pluriharmonic(u: PluriharmonicFunction, T) -> np.ndarray:
    T = as_tuple(T)
    out = evaluate_polynomial(u.holo, T) + evaluate_polynomial(u.anti, T).conj().T
    if u.is_self_adjoint():
        out = (out + out.conj().T) / 2
    return out


def assemble_pluriharmonic(u: PluriharmonicFunction, space: TruncatedFock, r: float = 1.0) -> np.ndarray:
    """``u(rS)`` on the truncated Fock space (dense)."""
    out = assemble(u.holo, space, r).toarray() + assemble(u.anti, space, r).toarray().conj().T
    if u.is_self_adjoint():
        out = (out + out.conj().T) / 2
    return out


def pluriharmonic_conjugate(u: PluriharmonicFunction) -> PluriharmonicFunction:
    """``v = (f - f^*) / (2i)`` for ``u = Re f`` with ``f(0)`` real, so ``v(0) = 0``.

    ``f`` is read off the holomorphic part of ``u``: its constant is ``f(0)``
    and its other coefficients are half those of ``f``.
    """
    c = u.holo.blocks[0][0]
    if np.any(np.abs(c.imag) > 0) or not np.allclose(c, c.T, rtol=0, atol=0):
        raise ValueError("f(0) must be real")
    if not u.is_self_adjoint():
        raise ValueError("u must be the real part of a free holomorphic function")
    part = scale(_without_constant(u.holo), -1j)
    return PluriharmonicFunction(part, _without_constant(part))


def holomorphic_from_pair(u: PluriharmonicFunction, v: PluriharmonicFunction) -> FreeSeries:
    """``u + i v`` as a free holomorphic series; the adjoint parts must cancel."""
    w = u + v.scale(1j)
    if any(b.any() for b in w.anti.blocks):
        if np.max([np.max(np.abs(b)) for b in w.anti.blocks]) > 1e-12:
            raise ValueError("u + i v has a nonzero adjoint part")
    return w.holo


def cauch_conj_matrix(T, u: PluriharmonicFunction, space: TruncatedFock) -> np.ndarray:
    """``(2W - J)^* (u(S) (x) I) J``, which reproduces ``f(T)`` for ``u = Re f`` with ``f(0)`` real."""
    T = as_tuple(T)
    _check_space(T, space)
    d = T.d
    Wv = cauchy_vector(T, space)
    J = vacuum_embedding(space, d)
    U = assemble_pluriharmonic(u, space)
    col = np.kron(U[:, [0]], np.eye(d))
    return (2 * Wv - J).conj().T @ col


# boundary behavior -------------------------------------------------------------


@dataclass(frozen=True)
class HerglotzReport:
    grid: tuple[float, ...]
    min_eigs: tuple[float, ...]
    level: int

    @property
    def min_eig(self) -> float:
        return min(self.min_eigs)


def herglotz_check(u: PluriharmonicFunction, grid, space: TruncatedFock | None = None) -> HerglotzReport:
    """Smallest eigenvalue of ``u(rS)`` on a truncation, for each ``r`` in the grid.

    The truncated ``S`` is a compression of the true one, so positivity of the
    true boundary values shows up here as well.
    """
    D = max(u.holo.degree, u.anti.degree)
    space = space or TruncatedFock(u.n, default_level(u.n, D, u.holo.q))
    eigs = tuple(float(np.linalg.eigvalsh(assemble_pluriharmonic(u, space, float(r)))[0]) for r in grid)
    return HerglotzReport(tuple(float(r) for r in grid), eigs, space.N)


def positive_real_part(h: FreeSeries, margin: float = 0.1) -> FreeSeries:
    """``c + h`` with ``c`` exceeding a certified bound on ``||h(S)||`` by ``margin``."""
    h0 = _without_constant(h)
    c = boundary_norm_bounds(h0, 1.0).upper + margin
    return add(FreeSeries.constant(c, h.n, h.q), h0)


@dataclass(frozen=True)
class DirichletReport:
    """Moduli ``||F(r_i S) - F(r_j S)||`` over a radius grid.

    ``model`` holds truncated-Fock values.  ``upper``/``lower`` are rigorous
    bounds on the full Fock space: the triangle inequality (plus the tail)
    above; below, the truncated value (a compression) or the image of the
    vacuum, ``(sum_k |r_i^k - r_j^k|**2 b_k**2)**(1/2)``, whichever is larger.
    """

    grid: tuple[float, ...]
    model: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    modulus_at_one: float
    verdict: str
    limit: np.ndarray | None
    flags: tuple[str, ...] = ()


def dirichlet_boundary_check(
    F: FreeSeries, grid, space: TruncatedFock | None = None, tol: float = 1e-2
) -> DirichletReport:
    """Does ``r -> F(rS)`` extend continuously to ``r = 1``?

    ``modulus_at_one`` is a rigorous upper bound on ``sup_{r_max <= s < 1}
    ||F(sS) - F(r_max S)||`` (``inf`` when the tail cannot certify it).
    The verdict is ``continuous`` when ``r -> F(rS)`` is certified Lipschitz on
    ``[0, 1]`` and the modulus is below ``tol``, ``discontinuous`` when the lower
    bounds already exceed ``tol`` between grid points near 1, and
    ``inconclusive`` otherwise.
    """
    grid = tuple(sorted(float(r) for r in grid))
    if not grid or grid[0] < 0 or grid[-1] > 1:
        raise ValueError("grid must lie in [0, 1]")
    if F.q != 1:
        raise ShapeMismatch("scalar series only")
    space = space or TruncatedFock(F.n, default_level(F.n, F.degree))
    parts = [assemble(F.homogeneous(k), space).toarray() for k in range(min(F.degree, space.N) + 1)]
    bn = block_norms(F)
    m = len(grid)
    model = np.zeros((m, m))
    upper = np.zeros((m, m))
    lower = np.zeros((m, m))
    ks = np.arange(len(bn))
    for i in range(m):
        for j in range(i + 1, m):
            r, s = grid[i], grid[j]
            w = np.abs(r**ks - s**ks)
            model[i, j] = op_norm(sum(((r**k) - (s**k)) * P for k, P in enumerate(parts)))
            hi = float(np.sum(w * bn))
            if F.tail:
                # |r^k - s^k| <= r^k + s^k
                hi += F.tail.sum_bound(F.degree + 1, r) + F.tail.sum_bound(F.degree + 1, s)
            upper[i, j] = hi
            lower[i, j] = max(model[i, j], float(np.sqrt(np.sum((w * bn) ** 2))))
    model, upper, lower = (x + x.T for x in (model, upper, lower))
    flags = []
    rmax = grid[-1]
    # sup_{rmax <= s < 1} ||F(sS) - F(rmax S)|| <= sum_k (1 - rmax^k) b_k (+ tail)
    modulus = float(np.sum((1 - rmax**ks) * bn))
    certified = True
    if F.tail:
        t, c, D = F.tail.t, F.tail.c, F.degree
        if t < 1:
            modulus += c * (t ** (D + 1) / (1 - t) - (rmax * t) ** (D + 1) / (1 - rmax * t))
        else:
            modulus = math.inf
            certified = False
            flags.append("tail_not_summable")
    limit = assemble(F, space, 1.0).toarray() if F.tail is None else None
    # the last grid cell: a surrogate for the behavior as r -> 1
    last = lower[m - 2, m - 1] if m > 1 else 0.0
    if certified:
        # a summable tail makes r -> F(rS) Lipschitz on [0, 1]
        verdict = "continuous"
        if modulus >= tol:
            flags.append("modulus_above_tolerance")
    elif last >= tol:
        verdict = "discontinuous"
        flags.append("modulus_not_vanishing")
    else:
        verdict = "inconclusive"
    flags.append("finite_truncation_surrogate")
    return DirichletReport(grid, model, upper, lower, modulus, verdict, limit, tuple(flags))

"""Full Fock space truncated at word length ``N``.

Basis vectors ``e_alpha`` are ordered by length, then lexicographically, so
the vacuum has rank 0.  Creation operators follow the compression convention:
they send the top level ``N`` to zero, which makes them partial isometries.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import words as W
from .series import FreeSeries, ShapeMismatch
from .words import Word

DENSE_NORM_LIMIT = 2000
NORM_TOL = 1e-10
#: default ceiling on dim * q when choosing a truncation level
MEMORY_BUDGET = 200_000


@dataclass(frozen=True)
class TruncatedFock:
    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.N < 0:
            raise ValueError("need n >= 1 and N >= 0")
        W.block_size(self.n, self.N)

    @functools.cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for k in range(self.N + 2):
            out.append(acc)
            acc += self.n**k
        return tuple(out)

    @property
    def dim(self) -> int:
        return self.offsets[self.N + 1]

    def level_size(self, k: int) -> int:
        return self.n**k

    def rank(self, w: Word) -> int:
        if len(w) > self.N:
            raise ValueError(f"word of length {len(w)} beyond level {self.N}")
        return self.offsets[len(w)] + W.rank(W.check_word(w, self.n), self.n)

    def word(self, r: int) -> Word:
        if not 0 <= r < self.dim:
            raise ValueError(f"rank {r} outside 0..{self.dim - 1}")
        k = int(np.searchsorted(self.offsets, r, side="right")) - 1
        return W.unrank(r - self.offsets[k], self.n, k)

    def basis(self) -> list[Word]:
        return list(W.iter_words(self.n, self.N))

    def basis_vector(self, w: Word) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.rank(w)] = 1.0
        return v

    def vacuum(self) -> np.ndarray:
        return self.basis_vector(())

    def level_projection(self, levels) -> sp.csr_matrix:
        diag = np.zeros(self.dim)
        for k in levels:
            diag[self.offsets[k]: self.offsets[k + 1]] = 1.0
        return sp.diags(diag, format="csr")


def default_level(n: int, degree: int, q: int = 1, budget: int = MEMORY_BUDGET) -> int:
    """``max(degree + 2, 8)`` lowered until ``dim * q`` fits the budget, never below ``degree``."""
    N = max(degree + 2, 8)
    while N > degree and TruncatedFock(n, N).dim * q > budget:
        N -= 1
    return N


@dataclass(frozen=True, eq=False)
class FockOperator:
    """An operator on ``F^2_N (x) C^q``.

    ``matrix`` is square of size ``dim * q``; the tensor layout is recorded by
    whoever builds it (``assemble`` puts the coefficient factor first, the
    Cauchy and Poisson machinery put the Fock factor first).
    """

    space: TruncatedFock
    matrix: sp.spmatrix | np.ndarray
    q: int = 1

    def __post_init__(self):
        m = self.space.dim * self.q
        if self.matrix.shape != (m, m):
            raise ShapeMismatch(f"matrix shape {self.matrix.shape} != {(m, m)}")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)

    def norm(self) -> float:
        return op_norm(self)

    @property
    def H(self) -> FockOperator:
        return FockOperator(self.space, self.matrix.conj().T, self.q)

    def __matmul__(self, other: FockOperator) -> FockOperator:
        return FockOperator(self.space, self.matrix @ other.matrix, self.q)

    def __add__(self, other: FockOperator) -> FockOperator:
        return FockOperator(self.space, self.matrix + other.matrix, self.q)

    def __sub__(self, other: FockOperator) -> FockOperator:
        return FockOperator(self.space, self.matrix - other.matrix, self.q)

    def __mul__(self, c) -> FockOperator:
        return FockOperator(self.space, self.matrix * c, self.q)

    __rmul__ = __mul__


def _check_letter(space: TruncatedFock, i: int) -> None:
    if not 1 <= i <= space.n:
        raise IndexError(f"generator {i} outside 1..{space.n}")


@functools.lru_cache(maxsize=256)
def _left(n: int, N: int, i: int) -> sp.csr_matrix:
    space = TruncatedFock(n, N)
    off = space.offsets
    rows, cols = [], []
    for k in range(N):
        j = np.arange(n**k)
        rows.append(off[k + 1] + (i - 1) * n**k + j)
        cols.append(off[k] + j)
    return _perm_matrix(space.dim, rows, cols)


@functools.lru_cache(maxsize=256)
def _right(n: int, N: int, i: int) -> sp.csr_matrix:
    space = TruncatedFock(n, N)
    off = space.offsets
    rows, cols = [], []
    for k in range(N):
        j = np.arange(n**k)
        rows.append(off[k + 1] + j * n + (i - 1))
        cols.append(off[k] + j)
    return _perm_matrix(space.dim, rows, cols)


def _perm_matrix(dim, rows, cols) -> sp.csr_matrix:
    r = np.concatenate(rows) if rows else np.zeros(0, int)
    c = np.concatenate(cols) if cols else np.zeros(0, int)
    m = sp.csr_matrix((np.ones(len(r), dtype=complex), (r, c)), shape=(dim, dim))
    m.data.setflags(write=False)
    return m


def left_creation(space: TruncatedFock, i: int) -> FockOperator:
    """``S_i e_alpha = e_{g_i alpha}``; zero on the top level."""
    _check_letter(space, i)
    return FockOperator(space, _left(space.n, space.N, i))


def right_creation(space: TruncatedFock, i: int) -> FockOperator:
    """``R_i e_alpha = e_{alpha g_i}``; zero on the top level."""
    _check_letter(space, i)
    return FockOperator(space, _right(space.n, space.N, i))


def word_operator(space: TruncatedFock, w: Word, side: str = "left") -> FockOperator:
    """``S_w = S_{w_1} ... S_{w_k}`` (or the right-creation product ``R_w``)."""
    mats = _left if side == "left" else _right
    out = sp.identity(space.dim, dtype=complex, format="csr")
    for x in w:
        _check_letter(space, x)
        out = out @ mats(space.n, space.N, x)
    return FockOperator(space, out)


def homogeneous_matrix(space: TruncatedFock, k: int, coeffs: np.ndarray) -> sp.csr_matrix:
    """``sum_{|alpha|=k} c_alpha S_alpha`` for scalar coefficients indexed by rank."""
    n, N, off = space.n, space.N, space.offsets
    dim = space.dim
    if k > N:
        return sp.csr_matrix((dim, dim), dtype=complex)
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return sp.csr_matrix((dim, dim), dtype=complex)
    rows, cols, vals = [], [], []
    for lev in range(N - k + 1):
        j = np.arange(n**lev)
        # S_alpha e_gamma = e_{alpha gamma}: rank(alpha gamma) = rank(alpha) n**lev + rank(gamma)
        rows.append((off[k + lev] + nz[:, None] * n**lev + j[None, :]).ravel())
        cols.append(np.broadcast_to(off[lev] + j, (nz.size, j.size)).ravel())
        vals.append(np.repeat(coeffs[nz], j.size))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def assemble(F: FreeSeries, space: TruncatedFock, r: float = 1.0) -> FockOperator:
    """``sum_{k <= min(D, N)} r**k sum_{|alpha|=k} A_alpha (x) S_alpha``."""
    if F.n != space.n:
        raise ShapeMismatch(f"series has n={F.n}, space has n={space.n}")
    if r < 0:
        raise ValueError("r must be non-negative")
    top = min(F.degree, space.N)
    q = F.q

    def scalar_part(u: int, v: int) -> sp.csr_matrix:
        total = sp.csr_matrix((space.dim, space.dim), dtype=complex)
        for k in range(top + 1):
            c = F.blocks[k][:, u, v]
            if c.any():
                total = total + (r**k) * homogeneous_matrix(space, k, c)
        return total

    if q == 1:
        return FockOperator(space, scalar_part(0, 0).tocsr(), 1)
    grid = [[scalar_part(u, v) for v in range(q)] for u in range(q)]
    return FockOperator(space, sp.bmat(grid, format="csr"), q)


def op_norm(A) -> float:
    """Largest singular value; dense SVD below ``DENSE_NORM_LIMIT``, ARPACK above."""
    M = A.matrix if isinstance(A, FockOperator) else A
    size = M.shape[0]
    if size == 0:
        return 0.0
    if size < DENSE_NORM_LIMIT:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M)
        return float(np.linalg.norm(dense, 2))
    M = sp.csr_matrix(M)
    if M.nnz == 0:
        return 0.0
    v0 = np.random.default_rng(0).standard_normal(min(M.shape))
    s = spla.svds(M, k=1, tol=NORM_TOL, v0=v0, maxiter=20 * size, return_singular_vectors=False)
    return float(s[0])

"""Certified two-sided bounds for ``||p(rS_1, ..., rS_n)||`` on the full Fock space.

Finite truncations only bound this norm from below: for ``n = 1`` the
truncated Toeplitz matrices of ``1 + z`` have norms ``2 cos(pi / (2N + 3))``,
which never reach 2.  For scalar polynomials the norm is characterized by a
semidefinite program instead.  ``gamma**2 - p(S)^* p(S)`` is a hermitian free
Toeplitz polynomial, and it is positive exactly when it equals
``sum_{alpha, beta} G_{alpha beta} S_alpha^* S_beta`` for a positive Gram
matrix ``G`` on words of length ``<= deg p`` (the free Fejer-Riesz
factorization).  The dual variables are the moments ``phi(S_w)`` of a state.

One interior-point solve therefore yields both a Gram certificate (upper
bound) and a moment matrix (lower bound).  Solver output is only approximately
feasible, so both are repaired before use: residuals of the linear
constraints are pushed onto the vacuum row of the Gram matrix and a negative
eigenvalue ``-eps`` is paid for by ``eps * (number of words)``; a slightly
indefinite moment matrix is shifted by ``eps I`` and renormalized.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import words as W
from .series import FreeSeries, block_norms

#: largest Gram size (number of words of length <= degree) handed to the solver
MAX_WORDS = 64


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float
    method: str

    @property
    def width(self) -> float:
        return self.upper - self.lower


@functools.lru_cache(maxsize=32)
def _structure(n: int, D: int):
    """Index pairs ``(alpha, beta)`` with ``beta = alpha w``, grouped by ``w``."""
    words = list(W.iter_words(n, D))
    index = {w: i for i, w in enumerate(words)}
    m = len(words)
    group, ia, ib = [], [], []
    for a in words:
        for rest in W.iter_words(n, D - len(a)):
            group.append(index[rest])
            ia.append(index[a])
            ib.append(index[a + rest])
    group, ia, ib = (np.array(x, dtype=int) for x in (group, ia, ib))
    # LMI basis: moment matrix M(y) = I + sum_w (Re y_w B_w + Im y_w i B_w + h.c.)
    M2 = 2 * m
    k = 2 * (m - 1)
    basis = np.zeros((k, M2, M2))
    for t in range(1, m):
        sel = group == t
        i, j = ia[sel], ib[sel]
        re = np.zeros((m, m))
        im = np.zeros((m, m))
        np.add.at(re, (i, j), 1.0)
        np.add.at(re, (j, i), 1.0)
        np.add.at(im, (i, j), 1.0)
        np.add.at(im, (j, i), -1.0)
        # real embedding of the hermitian matrices re and 1j*im
        basis[2 * (t - 1)] = np.block([[re, np.zeros_like(re)], [np.zeros_like(re), re]])
        basis[2 * (t - 1) + 1] = np.block([[np.zeros_like(im), -im], [im, np.zeros_like(im)]])
    basis.setflags(write=False)
    return m, group, ia, ib, basis


def _effective_degree(F: FreeSeries) -> int:
    bn = block_norms(F)
    nz = np.flatnonzero(bn)
    return int(nz[-1]) if nz.size else 0


def triangle_bound(F: FreeSeries, r: float = 1.0) -> float:
    """``sum_k r**k b_k`` (each homogeneous block has norm exactly ``b_k``), plus the tail."""
    bn = block_norms(F)
    total = float(sum(r**k * b for k, b in enumerate(bn)))
    if F.tail:
        total += F.tail.sum_bound(F.degree + 1, r)
    return total


def vacuum_bound(F: FreeSeries, r: float = 1.0) -> float:
    """``||F(rS)(1 (x) x)||`` maximized over unit ``x``: a lower bound for the norm."""
    stacked = np.concatenate([(r**k) * b.reshape(-1, F.q) for k, b in enumerate(F.blocks)])
    return float(np.linalg.norm(stacked, 2))


def boundary_norm_bounds(F: FreeSeries, r: float = 1.0, max_words: int = MAX_WORDS) -> NormBracket:
    """Two-sided bound on the full-Fock-space norm of ``F(rS)``.

    Scalar polynomials small enough for the solver get the semidefinite
    certificate; everything else falls back to the vacuum lower bound and the
    triangle upper bound.
    """
    lo_fallback, hi_fallback = vacuum_bound(F, r), triangle_bound(F, r)
    if F.tail is not None or F.q != 1:
        return NormBracket(lo_fallback, hi_fallback, "triangle")
    D = _effective_degree(F)
    if D == 0:
        c = abs(complex(F.blocks[0][0, 0, 0]))
        return NormBracket(c, c, "exact")
    m = sum(F.n**k for k in range(D + 1))
    if m > max_words:
        return NormBracket(lo_fallback, hi_fallback, "triangle")
    a = np.concatenate([(r**k) * F.blocks[k][:, 0, 0] for k in range(D + 1)])
    try:
        lo, hi = _solve(F.n, D, a)
    except (ArithmeticError, ValueError):
        return NormBracket(lo_fallback, hi_fallback, "triangle")
    # the cheap bounds stay valid; keep whichever side is tighter
    return NormBracket(max(lo, lo_fallback), min(hi, hi_fallback), "fejer_riesz")


def _solve(n: int, D: int, a: np.ndarray) -> tuple[float, float]:
    from cvxopt import matrix, solvers

    m, group, ia, ib, basis = _structure(n, D)
    pair = np.conj(a[ia]) * a[ib]
    pp = np.zeros(m, dtype=complex)
    np.add.at(pp, group, pair)
    # objective: phi(p^* p) = pp_0 + sum_w 2 Re(pp_w y_w)
    c = np.empty(2 * (m - 1))
    c[0::2] = 2 * pp[1:].real
    c[1::2] = -2 * pp[1:].imag
    k = len(c)
    M2 = 2 * m
    G = matrix(-basis.reshape(k, M2 * M2).T.copy())
    h = matrix(np.eye(M2))
    sol = solvers.sdp(matrix(-c), Gs=[G], hs=[h], options={"show_progress": False})
    if sol["x"] is None or sol["zs"] is None:
        raise ArithmeticError(f"solver status {sol['status']}")
    y = np.array(sol["x"]).ravel()
    Z = np.array(sol["zs"][0])

    # lower bound from the moment matrix
    yw = y[0::2] + 1j * y[1::2]
    Mom = np.eye(m, dtype=complex)
    sel = group > 0
    np.add.at(Mom, (ia[sel], ib[sel]), yw[group[sel] - 1])
    np.add.at(Mom, (ib[sel], ia[sel]), np.conj(yw[group[sel] - 1]))
    eps = max(0.0, -float(np.linalg.eigvalsh(Mom)[0]))
    val = (pp[0].real + c @ y + eps * pp[0].real) / (1 + eps)
    lower = math.sqrt(max(val, 0.0))

    # upper bound from the Gram certificate
    Gh = 2 * ((Z[:m, :m] + Z[m:, m:]) / 2 + 1j * (Z[m:, :m] - Z[:m, m:]) / 2).T
    Gh = (Gh + Gh.conj().T) / 2
    lhs = np.zeros(m, dtype=complex)
    np.add.at(lhs, group, Gh[ia, ib])
    res = -pp - lhs
    Gh[0, 1:] += res[1:]
    Gh[1:, 0] += np.conj(res[1:])
    eps = max(0.0, -float(np.linalg.eigvalsh(Gh)[0]))
    gamma2 = pp[0].real + float(np.trace(Gh).real) + eps * m
    upper = math.sqrt(max(gamma2, 0.0))
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise ArithmeticError("non-finite certificate")
    return lower, upper

"""Truncated free power series ``F = sum_alpha A_alpha (x) Z_alpha``.

Coefficients are stored degree by degree: ``blocks[k]`` is a complex array of
shape ``(n**k, q, q)`` whose first axis is the lexicographic rank of the word
(see :mod:`freehol.words`).  A series without a tail is exactly the polynomial
it stores; a :class:`Tail` ``(c, t)`` asserts ``block_norm(k) <= c * t**k``
for every ``k`` beyond the stored degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import words as W
from .words import Word


@dataclass(frozen=True)
class Tail:
    """Geometric bound on the unstored blocks: ``b_k <= c * t**k`` for ``k > D``."""

    c: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.t)):
            raise ValueError("tail constants must be finite")
        if self.c < 0 or self.t < 0:
            raise ValueError("tail constants must be non-negative")

    def is_trivial(self) -> bool:
        return self.c == 0 or self.t == 0

    def block_bound(self, k: int) -> float:
        return self.c * self.t**k

    def sum_bound(self, start: int, r: float = 1.0) -> float:
        """Bound on ``sum_{k >= start} r**k b_k``; ``inf`` when ``r*t >= 1``."""
        x = r * self.t
        if self.c == 0 or x == 0:
            return 0.0
        if x >= 1:
            return math.inf
        return self.c * x**start / (1 - x)


class ShapeMismatch(ValueError):
    pass


def _as_coeff(value, q: int) -> np.ndarray:
    a = np.asarray(value, dtype=complex)
    if a.ndim == 0:
        a = a * np.eye(q, dtype=complex)
    if a.shape != (q, q):
        raise ShapeMismatch(f"coefficient shape {a.shape} != {(q, q)}")
    return a


@dataclass(frozen=True, eq=False)
class FreeSeries:
    n: int
    q: int
    blocks: tuple[np.ndarray, ...]
    tail: Tail | None = None
    _norms: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.q < 1:
            raise ValueError("need n >= 1 and q >= 1")
        if not self.blocks:
            raise ValueError("a series stores at least the constant block")
        for k, b in enumerate(self.blocks):
            if b.shape != (self.n**k, self.q, self.q):
                raise ShapeMismatch(f"block {k} has shape {b.shape}")
            b.setflags(write=False)
        if self.tail is not None and self.tail.is_trivial():
            object.__setattr__(self, "tail", None)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, q: int = 1, degree: int = 0, tail: Tail | None = None) -> FreeSeries:
        blocks = tuple(np.zeros((n**k, q, q), dtype=complex) for k in range(degree + 1))
        return cls(n, q, blocks, tail)

    @classmethod
    def from_dict(
        cls,
        coeffs: Mapping[Word, object],
        n: int,
        q: int | None = None,
        degree: int | None = None,
        tail: Tail | None = None,
    ) -> FreeSeries:
        """Build from ``{word: coefficient}``; scalars become ``c * I_q``."""
        if q is None:
            q = 1
            for v in coeffs.values():
                a = np.asarray(v)
                if a.ndim == 2:
                    q = a.shape[0]
                    break
        top = max((len(w) for w in coeffs), default=0)
        if degree is None:
            degree = top
        elif top > degree:
            raise ValueError(f"word of length {top} beyond degree {degree}")
        blocks = [np.zeros((n**k, q, q), dtype=complex) for k in range(degree + 1)]
        for w, v in coeffs.items():
            w = W.check_word(w, n)
            blocks[len(w)][W.rank(w, n)] += _as_coeff(v, q)
        return cls(n, q, tuple(blocks), tail)

    @classmethod
    def constant(cls, c, n: int, q: int = 1) -> FreeSeries:
        return cls.from_dict({(): c}, n, q)

    @classmethod
    def monomial(cls, w: Word, n: int, c=1.0, q: int = 1) -> FreeSeries:
        return cls.from_dict({tuple(w): c}, n, q)

    @classmethod
    def variable(cls, i: int, n: int) -> FreeSeries:
        return cls.monomial((i,), n)

    # access ---------------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.blocks) - 1

    @property
    def is_polynomial(self) -> bool:
        return self.tail is None

    @property
    def is_scalar(self) -> bool:
        return self.q == 1

    def coeff(self, w: Word) -> np.ndarray:
        w = W.check_word(w, self.n)
        if len(w) > self.degree:
            return np.zeros((self.q, self.q), dtype=complex)
        return self.blocks[len(w)][W.rank(w, self.n)]

    def scalar(self, w: Word) -> complex:
        return complex(self.coeff(w)[0, 0])

    def items(self) -> Iterator[tuple[Word, np.ndarray]]:
        """Nonzero coefficients in degree-then-lexicographic order."""
        for k, b in enumerate(self.blocks):
            nz = np.flatnonzero(np.any(b != 0, axis=(1, 2)))
            for r in nz:
                yield W.unrank(int(r), self.n, k), b[r]

    def to_dict(self) -> dict[Word, np.ndarray]:
        return dict(self.items())

    def nnz(self) -> int:
        return sum(int(np.count_nonzero(np.any(b != 0, axis=(1, 2)))) for b in self.blocks)

    def homogeneous(self, k: int) -> FreeSeries:
        blocks = [np.zeros_like(b) for b in self.blocks[: k + 1]]
        if k <= self.degree:
            blocks[k] = self.blocks[k].copy()
        else:
            blocks += [np.zeros((self.n**j, self.q, self.q), complex) for j in range(len(blocks), k + 1)]
        return FreeSeries(self.n, self.q, tuple(blocks))

    def truncate(self, degree: int) -> FreeSeries:
        """The exact polynomial part up to ``degree`` (the tail is dropped)."""
        if degree > self.degree:
            return self.pad(degree).with_tail(None)
        return FreeSeries(self.n, self.q, self.blocks[: degree + 1])

    def pad(self, degree: int) -> FreeSeries:
        if degree <= self.degree:
            return self
        extra = tuple(np.zeros((self.n**k, self.q, self.q), complex) for k in range(self.degree + 1, degree + 1))
        return FreeSeries(self.n, self.q, self.blocks + extra, self.tail)

    def with_tail(self, tail: Tail | None) -> FreeSeries:
        return FreeSeries(self.n, self.q, self.blocks, tail)

    def block_tensor(self, k: int) -> np.ndarray:
        """Degree-``k`` coefficients as an array of shape ``(n,)*k + (q, q)``."""
        return self.blocks[k].reshape((self.n,) * k + (self.q, self.q))

    def equals(self, other: FreeSeries, atol: float = 0.0) -> bool:
        if (self.n, self.q) != (other.n, other.q):
            return False
        D = max(self.degree, other.degree)
        a, b = self.pad(D), other.pad(D)
        return all(np.allclose(x, y, rtol=0, atol=atol) if atol else np.array_equal(x, y)
                   for x, y in zip(a.blocks, b.blocks))

    def max_abs_diff(self, other: FreeSeries) -> float:
        D = max(self.degree, other.degree)
        a, b = self.pad(D), other.pad(D)
        return max(float(np.max(np.abs(x - y), initial=0.0)) for x, y in zip(a.blocks, b.blocks))

    # arithmetic sugar ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, FreeSeries):
            return add(self, other)
        return add(self, FreeSeries.constant(other, self.n, self.q))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, FreeSeries):
            return add(self, other, 1, -1)
        return add(self, FreeSeries.constant(other, self.n, self.q), 1, -1)

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, FreeSeries):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __repr__(self):
        return f"FreeSeries(n={self.n}, q={self.q}, degree={self.degree}, nnz={self.nnz()}, tail={self.tail})"


def _check_compatible(F: FreeSeries, G: FreeSeries) -> None:
    if F.n != G.n or F.q != G.q:
        raise ShapeMismatch(f"(n, q) = {(F.n, F.q)} vs {(G.n, G.q)}")


def scale(F: FreeSeries, a) -> FreeSeries:
    a = complex(a)
    tail = Tail(abs(a) * F.tail.c, F.tail.t) if F.tail else None
    return FreeSeries(F.n, F.q, tuple(a * b for b in F.blocks), tail)


def block_norms(F: FreeSeries) -> np.ndarray:
    """``b_k = || sum_{|alpha|=k} A_alpha^* A_alpha ||^{1/2}`` for ``k = 0..D``."""
    if F._norms:
        return F._norms[0]
    out = np.empty(F.degree + 1)
    for k, b in enumerate(F.blocks):
        if F.q == 1:
            out[k] = np.sqrt(np.sum(np.abs(b) ** 2))
        else:
            # stacked column [A_alpha]_{|alpha| = k}
            out[k] = np.linalg.norm(b.reshape(-1, F.q), 2)
    out.setflags(write=False)
    F._norms.append(out)
    return out


def _fold_into_tail(extra: np.ndarray, start: int, tail: Tail) -> Tail:
    """Enlarge ``tail`` so it also covers the block norms ``extra[k - start]``."""
    if not np.any(extra):
        return tail
    t = tail.t if tail.t > 0 else 1.0
    ks = np.arange(start, start + len(extra))
    need = float(np.max(extra / t**ks))
    return Tail(tail.c + need, t)


def add(F: FreeSeries, G: FreeSeries, a=1.0, b=1.0) -> FreeSeries:
    """``a F + b G`` with tails combined by the triangle inequality."""
    _check_compatible(F, G)
    a, b = complex(a), complex(b)
    if F.tail and G.tail:
        D = min(F.degree, G.degree)
        tail = Tail(abs(a) * F.tail.c + abs(b) * G.tail.c, max(F.tail.t, G.tail.t))
        # stored blocks beyond D are exact, but the other summand is only bounded there
        for S, w in ((F, a), (G, b)):
            if S.degree > D:
                tail = _fold_into_tail(abs(w) * block_norms(S)[D + 1:], D + 1, tail)
    elif F.tail or G.tail:
        T, P, wt, wp = (F, G, a, b) if F.tail else (G, F, b, a)
        D = T.degree
        tail = Tail(abs(wt) * T.tail.c, T.tail.t)
        if P.degree > D:
            tail = _fold_into_tail(abs(wp) * block_norms(P)[D + 1:], D + 1, tail)
    else:
        D = max(F.degree, G.degree)
        tail = None
    Fp, Gp = F.pad(D), G.pad(D)
    blocks = tuple(a * x + b * y for x, y in zip(Fp.blocks[: D + 1], Gp.blocks[: D + 1]))
    return FreeSeries(F.n, F.q, blocks, tail)


def _envelope_constant(F: FreeSeries, tau: float) -> float:
    """Smallest ``C`` with ``b_k(F) <= C tau**k`` for every ``k``."""
    bn = block_norms(F)
    ks = np.arange(len(bn))
    C = float(np.max(bn / tau**ks))
    if F.tail:
        C = max(C, F.tail.c * (F.tail.t / tau) ** (F.degree + 1))
    return C


def _poly_geometric(C: float, tau: float, start: int) -> Tail:
    """Geometric bound for ``(k+1) C tau**k`` over ``k >= start``.

    The linear factor is absorbed by slightly enlarging the ratio.
    """
    if C == 0 or tau == 0:
        return Tail(0.0, 0.0)
    grow = 1.0 + 1.0 / (start + 1)
    x = 1.0 / grow
    # (k+1) x**k is unimodal; its max over k >= start is at the larger of start and the peak
    peak = max(start, int(math.floor(-1.0 / math.log(x) - 1.0)))
    m = max((k + 1) * x**k for k in {start, peak, peak + 1})
    return Tail(C * m, tau * grow)


def multiply(F: FreeSeries, G: FreeSeries) -> FreeSeries:
    """Cauchy product: ``C_alpha = sum_{alpha = sigma beta} A_sigma B_beta``."""
    _check_compatible(F, G)
    n, q = F.n, F.q
    if F.tail or G.tail:
        D = min(S.degree for S in (F, G) if S.tail)
    else:
        D = F.degree + G.degree
    blocks = [np.zeros((n**k, q, q), dtype=complex) for k in range(D + 1)]
    for p in range(min(F.degree, D) + 1):
        A = F.blocks[p]
        if not A.any():
            continue
        for s in range(min(G.degree, D - p) + 1):
            B = G.blocks[s]
            if not B.any():
                continue
            # rank(sigma beta) = rank(sigma) * n**s + rank(beta)
            prod = np.einsum("aij,bjk->abik", A, B)
            blocks[p + s] += prod.reshape(n ** (p + s), q, q)
    tail = None
    if F.tail or G.tail:
        tau = max(S.tail.t for S in (F, G) if S.tail)
        CF, CG = _envelope_constant(F, tau), _envelope_constant(G, tau)
        tail = _poly_geometric(CF * CG, tau, D + 1)
    return FreeSeries(n, q, tuple(blocks), tail)


@dataclass(frozen=True)
class RadiusEstimate:
    """Finite-window Hadamard data; ``point`` is a proxy, never the true limsup."""

    point: float
    lower: float | None
    sequence: dict[int, float]
    flags: tuple[str, ...] = ()


def radius_estimate(F: FreeSeries, window: tuple[int, int] | None = None) -> RadiusEstimate:
    if window is None:
        window = (1, F.degree)
    k0, k1 = window
    if k0 < 1 or k1 < k0:
        raise ValueError(f"empty window {window}")
    if k1 > F.degree:
        raise ValueError(f"window end {k1} beyond stored degree {F.degree}")
    bn = block_norms(F)
    seq = {k: float(bn[k] ** (1.0 / k)) for k in range(k0, k1 + 1)}
    top = max(seq.values())
    point = math.inf if top == 0 else 1.0 / top
    flags = []
    if F.tail is None:
        # stored polynomial: every root eventually vanishes
        lower = math.inf
        flags.append("polynomial")
    else:
        all_roots = [bn[k] ** (1.0 / k) for k in range(1, F.degree + 1)]
        denom = max([F.tail.t] + all_roots)
        lower = math.inf if denom == 0 else 1.0 / denom
        flags.append("tail_certified")
    if top == 0:
        flags.append("window_blocks_zero")
    return RadiusEstimate(point, lower, seq, tuple(flags))


def dilate(F: FreeSeries, r: float) -> FreeSeries:
    """``F_r``: the coefficient at ``alpha`` scaled by ``r**|alpha|``."""
    if r < 0:
        raise ValueError("dilation radius must be non-negative")
    blocks = tuple(b * r**k for k, b in enumerate(F.blocks))
    tail = Tail(F.tail.c, r * F.tail.t) if F.tail else None
    return FreeSeries(F.n, F.q, blocks, tail)


def adjoint(F: FreeSeries) -> FreeSeries:
    """Conjugate-transpose every coefficient; word indices are unchanged."""
    blocks = tuple(np.conj(np.swapaxes(b, 1, 2)) for b in F.blocks)
    return FreeSeries(F.n, F.q, blocks, F.tail)


def gleason_decompose(F: FreeSeries, m: int) -> dict[Word, FreeSeries]:
    """Split ``F = sum_{|beta|=m} Z_beta Phi_beta`` when ``F`` vanishes below degree ``m``."""
    if m < 0 or m > F.degree:
        raise ValueError(f"degree {m} outside 0..{F.degree}")
    for k in range(m):
        if F.blocks[k].any():
            raise ValueError(f"nonzero coefficient at degree {k} < {m}")
    n, q = F.n, F.q
    out = {}
    for beta in W.enumerate_words(n, m):
        rb = W.rank(beta, n)
        blocks = tuple(
            F.blocks[m + k].reshape(n**m, n**k, q, q)[rb].copy() for k in range(F.degree - m + 1)
        )
        tail = Tail(F.tail.c * F.tail.t**m, F.tail.t) if F.tail else None
        out[beta] = FreeSeries(n, q, blocks, tail)
    return out


def gleason_reconstruct(parts: Mapping[Word, FreeSeries], n: int) -> FreeSeries:
    total = None
    for beta, phi in parts.items():
        term = multiply(FreeSeries.monomial(beta, n, q=phi.q), phi)
        total = term if total is None else add(total, term)
    return total


def symmetrize(coeffs: Mapping[tuple[int, ...], complex], n: int, degree: int) -> FreeSeries:
    """Free lift of ``sum_p a_p lambda**p``: ``c_alpha = (p!/|p|!) a_p`` on words with counts ``p``."""
    blocks = [np.zeros((n**k, 1, 1), dtype=complex) for k in range(degree + 1)]
    for p, a in coeffs.items():
        p = tuple(int(x) for x in p)
        if len(p) != n:
            raise ValueError(f"multi-index {p} has wrong length for n={n}")
        k = sum(p)
        if k > degree:
            raise ValueError(f"multi-index {p} beyond degree {degree}")
        weight = W.multi_factorial(p) / math.factorial(k)
        for w in W.words_with_counts(p):
            blocks[k][W.rank(w, n), 0, 0] += weight * a
    return FreeSeries(n, 1, tuple(blocks))


def evaluate_commutative(coeffs: Mapping[tuple[int, ...], complex], lam: Iterable[complex]) -> complex:
    """Direct ``sum_p a_p lambda**p`` for scalar points."""
    lam = list(lam)
    return sum(a * math.prod(l**e for l, e in zip(lam, p)) for p, a in coeffs.items())

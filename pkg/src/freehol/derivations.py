"""Free partial derivatives ``dF/dZ_j``.

The derivative deletes one occurrence of ``Z_j`` at a time.  Read from the
output side, the coefficient at ``beta`` collects every way of putting
``g_j`` back into ``beta``::

    B_beta = sum_{m=0}^{|beta|} A_{insert(j, m, beta)}

which on the block tensor of degree ``k + 1`` is a sum of slices, one per
axis.  :func:`oracle_partial` implements the deletion rule monomial by
monomial and is kept as an independent check.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import words as W
from .series import FreeSeries, _poly_geometric


def _check_index(j: int, n: int) -> None:
    if not 1 <= j <= n:
        raise W.WordError(f"derivation index {j} outside 1..{n}")


def _derivative_tail(F: FreeSeries):
    """``b_k(dF) <= (k+1) b_{k+1}(F) <= (k+1) c t**(k+1)`` for ``k >= D``, as a geometric tail."""
    if F.tail is None:
        return None
    c, t = F.tail.c, F.tail.t
    return _poly_geometric(c * t, t, F.degree)


def partial(F: FreeSeries, j: int) -> FreeSeries:
    _check_index(j, F.n)
    n, q = F.n, F.q
    if F.degree == 0:
        if F.tail is not None:
            raise ValueError("a tailed series must store degree >= 1 to be differentiated")
        return FreeSeries.zero(n, q)
    blocks = []
    for k in range(F.degree):
        A = F.block_tensor(k + 1)
        B = sum(np.take(A, j - 1, axis=m) for m in range(k + 1))
        blocks.append(np.ascontiguousarray(B.reshape(n**k, q, q)))
    return FreeSeries(n, q, tuple(blocks), _derivative_tail(F))


def partial_k(F: FreeSeries, indices: Sequence[int]) -> FreeSeries:
    """``d^k F / dZ_{i1} ... dZ_{ik}``: the innermost derivative ``i_k`` is applied first."""
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise ValueError("need at least one derivation index")
    for i in indices:
        _check_index(i, F.n)
    for i in reversed(indices):
        F = partial(F, i)
    return F


def oracle_partial(F: FreeSeries, j: int) -> FreeSeries:
    """Deletion-rule derivative, one monomial at a time (polynomials only)."""
    if F.tail is not None:
        raise ValueError("the deletion oracle handles polynomials only")
    _check_index(j, F.n)
    out: dict[W.Word, np.ndarray] = {}
    for w, a in F.items():
        for v, mult in W.deletions(j, w).items():
            out[v] = out.get(v, 0) + mult * a
    return FreeSeries.from_dict(out, F.n, F.q, max(F.degree - 1, 0))

import math

import numpy as np
import pytest

from conftest import rand_series
from freehol.certify import boundary_norm_bounds, triangle_bound, vacuum_bound
from freehol.fock import TruncatedFock, assemble, op_norm
from freehol.series import FreeSeries, Tail


def circle_sup(coeffs, m=20000):
    z = np.exp(2j * np.pi * np.arange(m) / m)
    return float(np.max(np.abs(np.polyval(coeffs[::-1], z))))


@pytest.mark.parametrize("coeffs", [[1, 1], [1, -2, 0.5j], [0.3, 1j, -1, 0.25]])
def test_single_variable_matches_circle_sup(coeffs):
    # n = 1: p(S) is a Toeplitz operator with norm sup |p| on the circle
    F = FreeSeries.from_dict({(1,) * k: a for k, a in enumerate(coeffs)}, 1)
    br = boundary_norm_bounds(F)
    target = circle_sup(coeffs)
    assert br.method == "fejer_riesz"
    assert br.lower - 1e-7 <= target <= br.upper + 1e-7
    assert br.width < 1e-5


def test_row_is_isometric():
    F = FreeSeries.from_dict({(1,): 1, (2,): 1}, 2)
    br = boundary_norm_bounds(F)
    assert br.lower <= math.sqrt(2) + 1e-9 <= br.upper + 2e-9
    assert br.width < 1e-6


def test_bracket_contains_truncations(rng):
    for _ in range(5):
        F = rand_series(rng, 2, 3)
        br = boundary_norm_bounds(F, 0.8)
        trunc = op_norm(assemble(F, TruncatedFock(2, 7), 0.8))
        assert trunc <= br.upper + 1e-8
        assert br.lower <= br.upper + 1e-12
        assert vacuum_bound(F, 0.8) <= br.upper + 1e-8 <= triangle_bound(F, 0.8) + 1e-8


def test_fallbacks():
    const = boundary_norm_bounds(FreeSeries.constant(3 + 4j, 2))
    assert (const.lower, const.upper, const.method) == (5, 5, "exact")
    tailed = FreeSeries.from_dict({(1,): 1}, 1, degree=2, tail=Tail(1, 0.5))
    assert boundary_norm_bounds(tailed).method == "triangle"
    big = FreeSeries.from_dict({(1, 2, 1, 2, 1, 2): 1}, 2)
    assert boundary_norm_bounds(big, max_words=16).method == "triangle"

import itertools

import numpy as np
import pytest

from freehol.series import FreeSeries


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def rand_series(rng, n, D, q=1, integer=False, density=1.0):
    coeffs = {}
    for k in range(D + 1):
        for w in itertools.product(range(1, n + 1), repeat=k):
            if rng.random() > density:
                continue
            if integer:
                a = rng.integers(-3, 4, (q, q)) + 1j * rng.integers(-3, 4, (q, q))
            else:
                a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
            coeffs[w] = a
    return FreeSeries.from_dict(coeffs, n, q, D)


def rand_tuple(rng, n, d, norm=0.7):
    from freehol.calculus import OperatorTuple, row_norm

    T = OperatorTuple(rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d)))
    return T * (norm / row_norm(T))


def word_product(mats, w):
    out = np.eye(mats.shape[1], dtype=complex)
    for x in w:
        out = out @ mats[x - 1]
    return out


def brute_eval(F, mats):
    """sum_alpha A_alpha (x) T_alpha from explicit word products."""
    d = mats.shape[1]
    total = np.zeros((F.q * d, F.q * d), dtype=complex)
    for w, a in F.items():
        total += np.kron(a, word_product(mats, w))
    return total

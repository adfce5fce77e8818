"""Shared fixtures and independent reference implementations.

The ``ref_*`` helpers are deliberately naive loops over atoms and pairs so
that they share no code with the library.
"""
import math

import numpy as np
import pytest

from lpcompact import AmbientSpace, MeasureSpace, Prefix


def ref_vec_norm(x, q):
    x = [abs(float(t)) for t in x]
    if math.isinf(q):
        return max(x)
    return sum(t ** q for t in x) ** (1.0 / q)


def ref_bochner(values, weights, p, q):
    """(sum_w ||v(omega)||_q^p)^(1/p) by a plain loop."""
    return sum(w * ref_vec_norm(v, q) ** p for v, w in zip(values, weights)) ** (1.0 / p)


def ref_pairwise(prefix_values, weights, p, q):
    L = len(prefix_values)
    D = np.zeros((L, L))
    for i in range(L):
        for j in range(L):
            D[i, j] = ref_bochner(np.asarray(prefix_values[i]) - np.asarray(prefix_values[j]),
                                  weights, p, q)
    return D


def random_prefix(rng, L=12, atoms=6, dim=3, scale=1.0, norm="l2", weights=None):
    space = MeasureSpace(rng.uniform(0.2, 1.0, atoms) if weights is None else weights)
    amb = AmbientSpace(dim, norm)
    return Prefix(space, amb, scale * rng.standard_normal((L, atoms, dim)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"acceptance {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

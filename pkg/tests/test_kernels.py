"""Compiled and pure-Python kernels must agree."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcompact import _pykernels as py
from lpcompact import kernels

try:
    from lpcompact import _ckernels as cy
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")
Q = [1.0, 2.0, 3.0, math.inf]


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    if cy is not None and not os.environ.get("LPCOMPACT_PURE"):
        assert kernels.BACKEND == "cython"


def test_pure_env_forces_fallback():
    code = "from lpcompact import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, LPCOMPACT_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


@needs_ext
@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(Q), st.sampled_from([1.0, 1.5, 2.0, 4.0]))
def test_parity(seed, q, p):
    rng = np.random.default_rng(seed)
    L, A, d = rng.integers(1, 12), rng.integers(1, 9), rng.integers(1, 5)
    vals = rng.standard_normal((L, A, d)) * 10.0 ** rng.uniform(-3, 3)
    w = rng.uniform(0.05, 1, A)
    x = vals.reshape(-1, d)
    assert np.allclose(cy.vector_norms(x, q), py.vector_norms(x, q), rtol=1e-13, atol=0)
    a = np.abs(vals[..., 0])
    assert np.allclose(cy.lp_rows(a, w, p), py.lp_rows(a, w, p), rtol=1e-13, atol=0)
    Dc, Dp = cy.pairwise_lp(vals, w, p, q), py.pairwise_lp(vals, w, p, q)
    assert np.allclose(Dc, Dp, rtol=1e-12, atol=0)
    oc, rc = cy.farthest_first(Dp)
    op, rp = py.farthest_first(Dp)
    assert np.array_equal(oc, op) and np.array_equal(rc, rp)
    centers = x[rng.integers(0, len(x), 3)]
    ac, dc = cy.first_min_assign(x, centers, q)
    ap, dp = py.first_min_assign(x, centers, q)
    assert np.array_equal(ac, ap) and np.allclose(dc, dp, rtol=1e-13, atol=1e-300)
    eps = float(rng.uniform(0.01, 5))
    assert np.array_equal(cy.farthest_first_points(x, q, eps), py.farthest_first_points(x, q, eps))


@needs_ext
def test_integer_ties_identical():
    x = np.array([[0.0], [1.0], [2.0], [1.0], [0.0]])
    centers = np.array([[0.5], [1.5], [0.5]])
    for q in Q:
        assert np.array_equal(cy.first_min_assign(x, centers, q)[0],
                              py.first_min_assign(x, centers, q)[0])


def test_farthest_first_properties(rng):
    pts = rng.standard_normal((40, 2))
    D = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    order, radii = kernels.farthest_first(D)
    assert order[0] == 0 and sorted(order) == list(range(40))
    assert np.all(np.diff(radii[1:]) <= 0)
    for k in range(1, 40):
        assert radii[k] == pytest.approx(D[np.ix_([order[k]], order[:k])].min())

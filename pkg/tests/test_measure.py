import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcompact import LpNorm, MeasureSpace, ScalarSample, as_norm, lp_norm, subset_measure

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
# magnitudes where the naive oracle cannot underflow
moderate = st.one_of(st.just(0.0), st.floats(1e-30, 1e6), st.floats(-1e6, -1e-30))
positive = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)
exponents = st.floats(1.0, 8.0)


@st.composite
def samples(draw, n_min=1, n_max=12, values=finite):
    n = draw(st.integers(n_min, n_max))
    w = draw(st.lists(positive, min_size=n, max_size=n))
    v = draw(st.lists(values, min_size=n, max_size=n))
    return ScalarSample(MeasureSpace(w), np.array(v))


class TestMeasureSpace:
    def test_normalized_by_default(self):
        s = MeasureSpace([1, 2, 3, 4])
        assert s.normalized
        assert abs(s.total_mass - 1.0) <= 1e-12
        assert s.weights.tolist() == pytest.approx([0.1, 0.2, 0.3, 0.4], rel=1e-15)

    def test_opt_out_keeps_weights(self):
        s = MeasureSpace([1.0, 2.5], normalize=False)
        assert not s.normalized
        assert s.total_mass == 3.5
        assert s.weights.tolist() == [1.0, 2.5]

    @pytest.mark.parametrize("w", [[], [1.0, 0.0], [1.0, -2.0], [1.0, math.inf], [math.nan]])
    def test_rejects_bad_weights(self, w):
        with pytest.raises(ValueError):
            MeasureSpace(w)

    def test_immutable(self):
        s = MeasureSpace.uniform(3)
        with pytest.raises(ValueError):
            s.weights[0] = 5.0

    def test_json_roundtrip(self):
        s = MeasureSpace([0.25, 0.25, 0.5])
        d = s.to_dict()
        assert d == {"weights": [0.25, 0.25, 0.5], "normalized": True}
        assert MeasureSpace.from_dict(d) == s
        raw = MeasureSpace([2.0, 3.0], normalize=False)
        assert MeasureSpace.from_dict(raw.to_dict()) == raw

    def test_many_atoms_total_mass(self):
        s = MeasureSpace(np.full(10_000, 0.1))
        assert abs(s.total_mass - 1.0) <= 1e-12


class TestLpNorm:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 7.0])
    def test_constant_one(self, p):
        s = MeasureSpace([0.3, 0.1, 0.6])
        assert lp_norm(ScalarSample(s, np.ones(3)), p) == pytest.approx(1.0, rel=1e-15)

    def test_zero(self):
        assert lp_norm(ScalarSample(MeasureSpace.uniform(4), np.zeros(4)), 3.0) == 0.0

    def test_two_atom_value(self):
        f = ScalarSample(MeasureSpace([0.5, 0.5]), np.array([1.0, 3.0]))
        assert lp_norm(f, 2) == pytest.approx(math.sqrt(5.0), rel=1e-15)

    @pytest.mark.parametrize("p", [0.5, 0.0, -1.0, math.inf, math.nan])
    def test_bad_exponent(self, p):
        with pytest.raises(ValueError):
            lp_norm(ScalarSample(MeasureSpace.uniform(2), np.ones(2)), p)

    def test_atom_count_mismatch(self):
        with pytest.raises(ValueError):
            ScalarSample(MeasureSpace.uniform(3), np.ones(4))

    def test_no_overflow_for_huge_values(self):
        f = ScalarSample(MeasureSpace.uniform(2), np.array([1e300, 1e300]))
        assert lp_norm(f, 4.0) == pytest.approx(1e300, rel=1e-14)

    def test_as_norm(self):
        assert isinstance(as_norm(2), LpNorm)
        n = LpNorm(3.0)
        assert as_norm(n) is n
        with pytest.raises(TypeError):
            as_norm("two")

    @given(samples(), exponents, st.floats(-50, 50))
    def test_homogeneous(self, f, p, c):
        g = ScalarSample(f.space, c * f.values)
        assert lp_norm(g, p) == pytest.approx(abs(c) * lp_norm(f, p), rel=1e-12, abs=1e-300)

    @given(samples(n_min=2), exponents, st.data())
    def test_triangle(self, f, p, data):
        v = data.draw(st.lists(finite, min_size=f.space.atom_count,
                               max_size=f.space.atom_count))
        g = ScalarSample(f.space, np.array(v))
        h = ScalarSample(f.space, f.values + g.values)
        assert lp_norm(h, p) <= (lp_norm(f, p) + lp_norm(g, p)) * (1 + 1e-12)

    @settings(max_examples=300)
    @given(samples(values=moderate), exponents)
    def test_oracle(self, f, p):
        ref = sum(w * abs(v) ** p for w, v in zip(f.space.weights, f.values)) ** (1 / p)
        assert lp_norm(f, p) == pytest.approx(ref, rel=1e-10, abs=1e-300)


class TestSubsetMeasure:
    def test_examples(self):
        s = MeasureSpace([0.25, 0.25, 0.5])
        assert subset_measure(s, [False] * 3) == 0.0
        assert subset_measure(s, [True] * 3) == s.total_mass
        assert subset_measure(s, [True, False, True]) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            subset_measure(MeasureSpace.uniform(3), [True, False])

    @given(st.lists(st.tuples(positive, st.booleans(), st.booleans()), min_size=1, max_size=30))
    def test_monotone_and_additive(self, rows):
        w, a, b = map(np.array, zip(*rows))
        s = MeasureSpace(w)
        a = a.astype(bool)
        b = b.astype(bool)
        assert subset_measure(s, a & b) <= subset_measure(s, a) + 1e-15
        disjoint_b = b & ~a
        total = subset_measure(s, a | disjoint_b)
        assert total == pytest.approx(subset_measure(s, a) + subset_measure(s, disjoint_b),
                                      rel=1e-12, abs=1e-15)


class TestProperties:
    @settings(max_examples=500)
    @given(samples(), exponents, positive)
    def test_chebyshev(self, f, p, r):
        mass = subset_measure(f.space, np.abs(f.values) > r)
        assert mass <= (lp_norm(f, p) / r) ** p * (1 + 1e-12)

    def test_strict_boundary(self):
        s = MeasureSpace.uniform(2)
        f = ScalarSample(s, np.array([1.0, 2.0]))
        assert subset_measure(s, np.abs(f.values) > 1.0) == 0.5

    @given(samples(), exponents, st.data())
    def test_monotone(self, f, p, data):
        extra = data.draw(st.lists(st.floats(0, 1e3), min_size=f.space.atom_count,
                                   max_size=f.space.atom_count))
        g = ScalarSample(f.space, np.abs(f.values) + np.array(extra))
        assert lp_norm(f, p) <= lp_norm(g, p) * (1 + 1e-12)

    @given(samples(), exponents, exponents)
    def test_nested_exponents(self, f, p1, p2):
        lo, hi = sorted((p1, p2))
        assert lp_norm(f, lo) <= lp_norm(f, hi) * (1 + 1e-12)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcompact import (
    AmbientSpace, CertificateRefused, CompactCover, ExtractionExhausted, MeasureSpace,
    PreconditionViolation, Prefix, SubsequenceCertificate, VectorFunction, certify_tightness,
    certify_ui, cluster_extract, covering_number, diagonal_extract, greedy_net, lemma_extract,
    projection_defect, quantize_first_min, theorem1_extract,
)
from lpcompact.scenarios import make_family

from conftest import random_prefix, ref_pairwise


def line(values):
    v = np.asarray(values, dtype=float).reshape(-1, 1)
    return VectorFunction(MeasureSpace.uniform(len(v)), AmbientSpace(1), v)


def brute_max(prefix, indices, p):
    pos = prefix.positions_of(indices)
    D = ref_pairwise(prefix.values[pos], prefix.space.weights, p, prefix.ambient.q)
    return D.max() if len(pos) > 1 else 0.0


class TestQuantization:
    def test_exact_center(self):
        net = CompactCover(AmbientSpace(1), [[0.0], [1.0], [2.0], [3.0]], 0.5)
        qz = quantize_first_min(line([3.0]), net)
        assert qz.assignment.tolist() == [3] and qz.sup_error == 0.0

    def test_tie_first_min(self):
        net = CompactCover(AmbientSpace(1), [[5.0], [0.0], [1.0]], 0.5)
        qz = quantize_first_min(line([0.5]), net)
        assert qz.assignment.tolist() == [1]

    def test_line_example(self):
        net = CompactCover(AmbientSpace(1), [[0.0], [1.0]], 0.5)
        qz = quantize_first_min(line([0.6]), net)
        assert qz.assignment.tolist() == [1]
        assert qz.sup_error == pytest.approx(0.4, abs=1e-15)

    def test_empty_net(self):
        with pytest.raises(ValueError):
            quantize_first_min(line([0.0]), CompactCover(AmbientSpace(1), np.zeros((0, 1)), 1))

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["l1", "l2", "linf"]))
    def test_first_min_oracle_and_idempotence(self, seed, norm):
        rng = np.random.default_rng(seed)
        amb = AmbientSpace(2, norm)
        # integer grid values create many exact ties
        centers = rng.integers(-2, 3, (6, 2)).astype(float)
        vals = rng.integers(-3, 4, (9, 2)).astype(float)
        F = VectorFunction(MeasureSpace.uniform(9), amb, vals)
        net = CompactCover(amb, centers, 1.0)
        qz = quantize_first_min(F, net)
        for a, v in enumerate(vals):
            d = [float(amb.norms(v - c)) for c in centers]
            assert qz.assignment[a] == d.index(min(d))
        again = quantize_first_min(qz.step_function, net)
        assert again.sup_error == 0.0
        assert np.array_equal(again.step_function.values, qz.step_function.values)


class TestProjectionDefect:
    def test_already_in_span(self):
        amb = AmbientSpace(3)
        F = VectorFunction(MeasureSpace.uniform(2), amb, [[1.0, 2.0, 0.0], [0.0, 1.0, 0.0]])
        net = CompactCover(amb, [[1.0, 2.0, 0.0], [0.0, 1.0, 0.0]], 0.1)
        pd = projection_defect(F, quantize_first_min(F, net), 2, 2.0)
        assert pd.defect == 0.0

    def test_third_coordinate(self):
        amb = AmbientSpace(3)
        F = VectorFunction(MeasureSpace([0.3, 0.7]), amb, [[1.0, 0.0, 0.1], [0.0, 1.0, 0.1]])
        net = CompactCover(amb, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0.2)
        qz = quantize_first_min(F, net)
        pd = projection_defect(F, qz, 2, 1.0)
        assert pd.defect == pytest.approx(0.1, rel=1e-15)
        assert pd.bound == pytest.approx(2 * qz.sup_error) and pd.bound >= 0.1

    def test_span_violation(self):
        amb = AmbientSpace(3)
        F = VectorFunction(MeasureSpace.uniform(1), amb, [[1.0, 0.0, 0.1]])
        net = CompactCover(amb, [[1.0, 0.0, 0.1]], 0.2)
        with pytest.raises(PreconditionViolation):
            projection_defect(F, quantize_first_min(F, net), 2)


class TestCluster:
    def test_constant(self):
        pre = make_family("constant").prefix(12)
        assert cluster_extract(pre, 2.0, 0.1).tolist() == list(range(12))

    def test_tie_takes_smallest(self):
        vals = [np.full((2, 1), float(i % 2) * 5) for i in range(10)]
        pre = Prefix(MeasureSpace.uniform(2), AmbientSpace(1), vals)
        assert cluster_extract(pre, 2.0, 0.1).tolist() == [0, 2, 4, 6, 8]
        shifted = pre.take(np.arange(1, 10))
        # now five members sit at 5 and four at 0, so the larger cluster wins
        assert cluster_extract(shifted, 2.0, 0.1).tolist() == [1, 3, 5, 7, 9]

    def test_convergent(self):
        pre = make_family("convergent").prefix(20)
        idx = cluster_extract(pre, 2.0, 0.1)
        assert len(idx) >= 14
        assert brute_max(pre, idx, 2.0) <= 0.1

    def test_empty(self):
        with pytest.raises(ValueError):
            cluster_extract(Prefix(MeasureSpace.uniform(1), AmbientSpace(1), np.zeros((0, 1, 1))),
                            2.0, 0.1)

    @settings(max_examples=80)
    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 3.0), st.sampled_from([1.0, 2.0]))
    def test_pigeonhole(self, seed, eps, p):
        rng = np.random.default_rng(seed)
        pre = random_prefix(rng, L=int(rng.integers(1, 30)), atoms=3, dim=2)
        idx = cluster_extract(pre, p, eps)
        assert len(idx) >= math.ceil(len(pre) / covering_number(pre, p, eps / 2))
        assert brute_max(pre, idx, p) <= eps + 1e-12
        assert np.all(np.diff(idx) > 0)


class TestDiagonal:
    def test_constant(self):
        pre = make_family("constant").prefix(10)
        c = diagonal_extract(pre, 2.0, [0.5, 0.1, 0.01])
        assert list(c.indices) == list(range(10)) and c.pairwise_bound == 0.0

    def test_convergent(self):
        pre = make_family("convergent").prefix(20)
        c = diagonal_extract(pre, 2.0, [0.5, 0.25])
        assert c.pairwise_bound <= 0.25
        assert brute_max(pre, c.indices, 2.0) <= c.pairwise_bound + 1e-9
        assert c.budget["stage_sizes"][0] >= c.budget["stage_sizes"][1]

    def test_exhaustion(self):
        vals = [np.zeros((1, 1)), np.ones((1, 1))]
        pre = Prefix(MeasureSpace.uniform(1), AmbientSpace(1), vals)
        with pytest.raises(ExtractionExhausted) as err:
            diagonal_extract(pre, 2.0, [0.1])
        assert err.value.deepest_stage == 0

    @pytest.mark.parametrize("sched", [[], [0.1, 0.2], [0.1, -0.1]])
    def test_bad_schedule(self, sched):
        with pytest.raises(ValueError):
            diagonal_extract(make_family("constant").prefix(3), 2.0, sched)


class TestLemma:
    def test_constant_in_cover(self):
        pre = make_family("constant").prefix(10)
        cover = CompactCover(pre.ambient, [[1.0, 0.0]], 0.0)
        c = lemma_extract(pre, cover, 2.0, 0.1, 0.05)
        assert len(c) == 10 and c.measured_max == 0.0
        assert c.pairwise_bound == pytest.approx(4 * 0.1 + 0.05)

    def test_rotating(self):
        pre = make_family("rotating").prefix(64)
        cover = greedy_net(pre.ambient, pre.pooled_values(), 0.1)
        c = lemma_extract(pre, cover, 2.0, 0.2)
        assert c.budget["projection_norm"] == 1.0
        assert c.pairwise_bound == pytest.approx(2 * 2 * 0.2 + 0.2)
        assert brute_max(pre, c.indices, 2.0) <= c.pairwise_bound + 1e-9
        assert c.verify(pre, 2.0)

    def test_precondition(self):
        pre = make_family("rotating").prefix(5)
        cover = CompactCover(pre.ambient, [[1.0, 0.0]], 0.5)
        with pytest.raises(PreconditionViolation) as err:
            lemma_extract(pre, cover, 2.0, 0.1)
        assert err.value.atom is not None and err.value.member is not None

    def test_skew_basis_bound(self, rng):
        amb = AmbientSpace(2, "l1", [[1.0, 1.0], [0.0, 1.0]])
        space = MeasureSpace.uniform(4)
        vals = rng.uniform(-1, 1, (30, 4, 2))
        pre = Prefix(space, amb, vals)
        cover = greedy_net(amb, pre.pooled_values(), 0.05)
        c = lemma_extract(pre, cover, 1.0, 0.1, 0.05)
        pn = c.budget["projection_norm"]
        assert c.pairwise_bound == pytest.approx(2 * (1 + pn) * 0.1 + 0.05)
        assert brute_max(pre, c.indices, 1.0) <= c.pairwise_bound + 1e-9

    def test_json(self):
        pre = make_family("constant").prefix(4)
        d = lemma_extract(pre, CompactCover(pre.ambient, [[1.0, 0.0]], 0.0), 2.0, 0.1).to_dict()
        assert set(d) == {"indices", "pairwise_bound", "measured_max", "budget", "pairs"}
        assert {"eps", "eps_prime", "N", "projection_norm"} <= set(d["budget"])


class TestTheorem1:
    def certs(self, pre, p, eps, r=2.0, radius=None):
        ui = certify_ui(pre, p, r)
        cover = greedy_net(pre.ambient, np.unique(pre.pooled_values(), axis=0),
                           eps / 4 if radius is None else radius)
        return ui, certify_tightness(pre, cover)

    def test_rotating(self):
        pre = make_family("rotating").prefix(200)
        ui, tight = self.certs(pre, 2.0, 0.1)
        c = theorem1_extract(pre, 2.0, 0.1, ui, tight)
        assert c.pairwise_bound == pytest.approx(0.7)
        assert len(c) >= 5
        assert brute_max(pre, c.indices, 2.0) <= 0.7 + 1e-9
        assert len(c.pair_table) == len(c) * (len(c) - 1) // 2
        for row in c.pair_table:
            assert row["distance"] <= row["after_truncation"] + 1e-12
            assert row["six_eps_line"] <= 0.7 + 1e-12

    def test_constant(self):
        pre = make_family("constant").prefix(10)
        ui, tight = self.certs(pre, 1.0, 0.1)
        c = theorem1_extract(pre, 1.0, 0.1, ui, tight)
        assert c.measured_max == 0.0 and len(c) == 10

    def test_escaping_basis_refuses_tightness(self):
        pre = make_family("escaping_basis").prefix(40)
        ui = certify_ui(pre, 2.0, 2.0)
        small = CompactCover(pre.ambient, np.eye(256)[:4], 0.1)
        tight = certify_tightness(pre, small)
        assert tight.eps == 1.0
        with pytest.raises(CertificateRefused) as err:
            theorem1_extract(pre, 2.0, 0.1, ui, tight)
        assert err.value.inequality.startswith("tightness")

    def test_ui_refusals(self):
        pre = make_family("rotating").prefix(20)
        ui, tight = self.certs(pre, 2.0, 0.1)
        from lpcompact import UICertificate

        with pytest.raises(CertificateRefused, match="uniform integrability"):
            theorem1_extract(pre, 2.0, 0.1, UICertificate(0.5, 0.0, 2.0), tight)
        big = certify_ui(pre, 2.0, 0.5)
        with pytest.raises(CertificateRefused, match="uniform integrability"):
            theorem1_extract(pre, 2.0, 0.1, UICertificate(0.5, big.bound, 2.0), tight)

    def test_false_tightness_claim(self):
        pre = make_family("rotating").prefix(20)
        ui, _ = self.certs(pre, 2.0, 0.1)
        from lpcompact import TightnessCertificate

        bogus = TightnessCertificate(CompactCover(pre.ambient, [[0.0, 0.0]], 0.1), 0.0)
        with pytest.raises(CertificateRefused, match="tightness"):
            theorem1_extract(pre, 2.0, 0.1, ui, bogus)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0]), st.sampled_from([0.2, 0.5]))
    def test_random_bounded(self, seed, p, eps):
        rng = np.random.default_rng(seed)
        pre = random_prefix(rng, L=25, atoms=4, dim=2)
        ui, tight = self.certs(pre, p, eps, r=float(pre.pointwise_norms.max()) * 1.01)
        c = theorem1_extract(pre, p, eps, ui, tight)
        assert isinstance(c, SubsequenceCertificate)
        assert brute_max(pre, c.indices, p) <= 7 * eps + 1e-9

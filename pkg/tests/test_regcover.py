import numpy as np
import pytest

import corpus
from svdiff.certify import CertConfig, certify_pseudo
from svdiff.errors import GaugeUnbounded, HypothesisFailure
from svdiff.geom import Ball, Polyhedron, Region, hausdorff
from svdiff.homog import HomogMap, eval_map
from svdiff.regcover import (
    RegInstance,
    alt_defs_check,
    certify_mr,
    certify_msr,
    certify_oc,
    ct_reduce,
    equivalence_harness,
    set_a_spot_check,
    subreg_harness,
    t_inverse_zero_covers,
)
from svdiff.svmap import GraphPoint, SVMap, eval_map as eval_S, invert

PT = GraphPoint([0.0], [0.0])


@pytest.fixture
def hcfg():
    return CertConfig(grid_per_axis=11, point_cap=24, pair_cap=400)


class TestCertifiers:
    def test_mr_identity(self, hcfg):
        # Def 7.1 verbatim: for S = id the verifying maps send a to -a
        S = SVMap.linear([[1.0]])
        assert certify_mr(RegInstance(S, PT, HomogMap.linear([[-1.0]]),
                                      hcfg)).verdict == "verified_at_scale"
        assert certify_mr(RegInstance(S, PT, HomogMap.ball(1.0, 1, 1),
                                      hcfg)).verdict == "verified_at_scale"

    def test_mr_slopes(self, hcfg):
        S = SVMap.linear([[2.0]])
        ok = certify_mr(RegInstance(S, PT, HomogMap.linear([[-0.5]]), hcfg))
        assert ok.verdict == "verified_at_scale"
        bad = certify_mr(RegInstance(S, PT, HomogMap.linear([[-0.25]]), hcfg))
        assert bad.verdict == "refuted"
        assert bad.witness is not None

    def test_oc_identity(self, hcfg):
        S = SVMap.linear([[1.0]])
        assert certify_oc(RegInstance(S, PT, HomogMap.ball(1.1, 1, 1),
                                      hcfg)).verdict == "verified_at_scale"

    def test_oc_undersized(self, hcfg):
        S = SVMap.linear([[2.0]])
        c = certify_oc(RegInstance(S, PT, HomogMap.ball(0.3, 1, 1), hcfg))
        assert c.verdict == "refuted"

    def test_msr_identity(self, hcfg):
        S = SVMap.linear([[1.0]])
        assert certify_msr(RegInstance(S, PT, HomogMap.ball(1.2, 1, 1),
                                       hcfg)).verdict == "verified_at_scale"

    def test_msr_halfline(self, halfline_map, hcfg):
        # S = (-inf, x]: d(x, S^{-1}(0)) = 0 for x <= 0 and excess a = x
        # for x > 0; a ball modulus above 1 certifies
        c = certify_msr(RegInstance(halfline_map, PT,
                                    HomogMap.ball(1.3, 1, 1), hcfg))
        assert c.verdict == "verified_at_scale"

    def test_msr_zero_map_refuted(self, hcfg):
        S = SVMap.linear([[2.0]])
        c = certify_msr(RegInstance(S, PT, HomogMap.zero(1, 1), hcfg))
        assert c.verdict == "refuted"

    def test_dims_reversed_enforced(self, hcfg):
        S = SVMap.poly_graph(Region.from_polyhedron(
            Polyhedron.from_hrep([[1.0, 0.0, -1.0], [-1.0, 0.0, 1.0]],
                                 [0.0, 0.0])), 2, 1)
        with pytest.raises(HypothesisFailure):
            RegInstance(S, GraphPoint([0.0, 0.0], [0.0]),
                        HomogMap.ball(1.0, 1, 1), hcfg)


class TestHarnesses:
    def test_band_instance(self, hcfg):
        # S(y) = [-y, y]: the inverse is the epigraph map with modulus 1
        G = Region.from_polyhedron(
            Polyhedron.from_hrep([[-1.0, 1.0], [-1.0, -1.0]], [0.0, 0.0]))
        S = SVMap.poly_graph(G, 1, 1)
        h = equivalence_harness(S, PT, HomogMap.ball(1.3, 1, 1), hcfg)
        assert h["agree"]
        assert h["it"].verdict == "verified_at_scale"
        h = equivalence_harness(S, PT, HomogMap.ball(0.7, 1, 1), hcfg)
        assert h["agree"]
        assert h["it"].verdict == "refuted"

    def test_seeded_corpus_agreement(self, hcfg):
        for S, kappa, verified in corpus.harness_corpus(seed=31, count=6):
            h = equivalence_harness(S, PT, HomogMap.ball(kappa, 1, 1), hcfg)
            assert h["agree"], (kappa, {k: h[k].verdict
                                        for k in ("mr", "oc", "it")})
            want = "verified_at_scale" if verified else "refuted"
            assert h["it"].verdict == want

    def test_subreg_corpus_agreement(self, hcfg):
        for S, kappa, verified in corpus.subreg_corpus(seed=77, count=6):
            h = subreg_harness(S, PT, HomogMap.ball(kappa, 1, 1), hcfg)
            assert h["agree"]
            want = "verified_at_scale" if verified else "refuted"
            assert h["outer_it"].verdict == want

    def test_monotone_in_T(self, hcfg):
        S, kappa, verified = corpus.harness_corpus(seed=31, count=1)[0]
        assert verified
        inst_small = RegInstance(S, PT, HomogMap.ball(kappa, 1, 1), hcfg)
        inst_big = RegInstance(S, PT, HomogMap.ball(2 * kappa, 1, 1), hcfg)
        assert certify_mr(inst_small).verdict == "verified_at_scale"
        assert certify_mr(inst_big).verdict == "verified_at_scale"

    def test_classical_inequality_form(self, hcfg):
        # with a ball map, certify_mr agrees with the textbook inequality
        # d(x, S^{-1}(y)) <= kappa' d(y, S(x)) evaluated on the same grid
        S = corpus.kink_map(0.5, 2.0)
        Sinv = invert(S)
        kappa = 2.2   # true inverse modulus is 1/0.5 = 2
        cert = certify_mr(RegInstance(S, PT, HomogMap.ball(kappa, 1, 1), hcfg))
        assert cert.verdict == "verified_at_scale"
        rng = np.random.default_rng(0)
        for _ in range(60):
            x = rng.uniform(-0.1, 0.1, size=1)
            y = rng.uniform(-0.1, 0.1, size=1)
            dxy = float(eval_S(Sinv, y).dist(x.reshape(1, -1))[0])
            dys = float(eval_S(S, x).dist(y.reshape(1, -1))[0])
            assert dxy <= (kappa + 0.1) * dys + 1e-9


class TestCTReduce:
    def test_interval_gauge_scaling(self):
        Tp = ct_reduce(Region.interval(-1, 1), HomogMap.ball(2.0, 1, 1))
        for w in (1.0, -2.0):
            v = np.unique(np.round(
                eval_map(Tp, np.array([w])).vertices_all().ravel(), 9))
            assert v[0] == pytest.approx(-2.0 * abs(w))
            assert v[-1] == pytest.approx(2.0 * abs(w))

    def test_asymmetric_C(self):
        # C = [-1, 2]: gauge(w) = w/2 for w > 0, |w| for w < 0; T'(w) = T(tC)
        Tp = ct_reduce(Region.interval(-1, 2), HomogMap.linear([[1.0]]))
        v = np.unique(np.round(
            eval_map(Tp, np.array([4.0])).vertices_all().ravel(), 9))
        assert v[0] == pytest.approx(-2.0) and v[-1] == pytest.approx(4.0)

    def test_zero_direction(self):
        Tp = ct_reduce(Region.interval(-1, 1), HomogMap.ball(2.0, 1, 1))
        val = eval_map(Tp, np.array([0.0]))
        assert float(np.max(np.abs(val.vertices_all()))) <= 1e-9

    def test_needs_interior(self):
        with pytest.raises(GaugeUnbounded):
            ct_reduce(Region.interval(1, 2), HomogMap.ball(1.0, 1, 1))


class TestAltDefs:
    def test_t_inverse_zero(self, halfline_T):
        assert t_inverse_zero_covers(halfline_T)   # 0 in [-w, w] for w >= 0
        assert t_inverse_zero_covers(HomogMap.ball(1.0, 1, 1))
        assert t_inverse_zero_covers(HomogMap.zero(1, 1))
        one_sided = HomogMap.from_rays([[1, 1], [1, 2]], 1, 1)
        assert not t_inverse_zero_covers(one_sided)

    def test_hypothesis_failure(self, hcfg):
        S = SVMap.linear([[1.0]])
        one_sided = HomogMap.from_rays([[1, 1], [1, 2]], 1, 1)
        with pytest.raises(HypothesisFailure):
            alt_defs_check(S, PT, one_sided, hcfg)

    def test_ball_matches(self, hcfg):
        S = SVMap.linear([[1.0]])
        res = alt_defs_check(S, PT, HomogMap.ball(1.2, 1, 1), hcfg)
        assert res["match"]

    def test_zero_map_matches(self, hcfg):
        S = SVMap.linear([[2.0]])
        res = alt_defs_check(S, PT, HomogMap.zero(1, 1), hcfg)
        assert res["match"]
        assert res["constrained"].verdict == "refuted"


class TestLemma77Invariant:
    def test_wide_x_range_same_verdict(self, hcfg):
        # when T ⊇ delta-ball inflation, widening the pair range does not
        # change the pseudo-strict verdict
        S = SVMap.linear([[2.0]])
        T = HomogMap.ball(2.5, 1, 1)
        narrow = certify_pseudo(S, T, [0.0], [0.0], "pseudoStrictT", hcfg)
        wide_cfg = CertConfig(radius_ladder=(5.0, 1e-1, 3e-2, 1e-2),
                              grid_per_axis=11, point_cap=24, pair_cap=400)
        wide = certify_pseudo(S, T, [0.0], [0.0], "pseudoStrictT", wide_cfg)
        assert narrow.verdict == wide.verdict == "verified_at_scale"


class TestSetASpotCheck:
    def test_passes_on_sound_instance(self, hcfg):
        S = SVMap.linear([[1.0]])
        inst = RegInstance(S, PT, HomogMap.ball(1.2, 1, 1), hcfg)
        assert set_a_spot_check(inst)

import math

import numpy as np
import pytest

import corpus
from svdiff.certify import CertConfig, certify_pseudo, estimate_lip
from svdiff.coderiv import (
    coderivative,
    graphical_modulus,
    mord_T,
    mord_kappa,
    normal_cone,
    precise_T,
)
from svdiff.errors import CriterionFails, NotInSet, NotOnGraph, PartitionGap
from svdiff.geom import Ball, Polyhedron, Region, hausdorff
from svdiff.homog import eval_map
from svdiff.svmap import SVMap


def ray_set(region):
    out = set()
    for p in region.pieces:
        for r in p.rays:
            out.add(tuple(np.round(r, 6)))
    return out


class TestNormalCone:
    def test_epigraph_corner(self, epi_abs_region):
        nc = normal_cone(epi_abs_region, [0.0, 0.0])
        s = 1 / math.sqrt(2)
        assert ray_set(nc.regular) == {(round(s, 6), round(-s, 6)),
                                       (round(-s, 6), round(-s, 6))}
        # general cone equals the regular wedge here (plus its faces)
        pts = np.array([[0.5, -0.6], [-0.5, -0.6], [0.0, -1.0]])
        assert np.all(nc.general.dist(pts) <= 1e-7)
        outside = np.array([[1.0, 0.5], [0.0, 0.2]])
        assert np.all(nc.general.dist(outside) > 1e-3)

    def test_halfspace_boundary(self):
        H = Region.from_polyhedron(Polyhedron.from_hrep([[0.6, 0.8]], [0.0]))
        nc = normal_cone(H, [0.0, 0.0])
        assert ray_set(nc.general) == {(0.6, 0.8)}

    def test_interior_point_trivial(self):
        R2 = Region.from_polyhedron(
            Polyhedron.from_hrep(np.zeros((0, 2)), np.zeros(0)))
        nc = normal_cone(R2, [0.3, 0.4])
        assert ray_set(nc.general) == set()
        assert np.allclose(nc.general.vertices_all(), 0.0)

    def test_not_in_set(self, epi_abs_region):
        with pytest.raises(NotInSet):
            normal_cone(epi_abs_region, [0.0, -1.0])

    def test_regular_subset_of_general(self, epi_abs_region):
        nc = normal_cone(epi_abs_region, [1.0, 1.0])
        pts = nc.regular.pieces[0].rays
        if len(pts):
            assert np.all(nc.general.dist(pts) <= 1e-7)


class TestCoderivative:
    def test_halfline_block_reading(self, halfline_map):
        D = coderivative(halfline_map, [0.0], [0.0])
        # N_gph = {lambda (-1, 1)}: v = -lambda, -z = lambda, so
        # D*S(0|0)(z) = {z} for z <= 0 and empty for z > 0
        assert D.eval([-1.0]).vertices_all().ravel() == pytest.approx([-1.0])
        assert D.eval([1.0]).is_empty

    def test_linear_adjoint(self):
        S = SVMap.linear([[2.0]])
        D = coderivative(S, [1.0], [2.0])
        assert D.eval([3.0]).vertices_all().ravel() == pytest.approx([6.0])

    def test_epigraph_map(self, epi_abs_region):
        S = SVMap.poly_graph(epi_abs_region, 1, 1)
        D = coderivative(S, [0.0], [0.0])
        v = sorted(np.unique(np.round(D.eval([1.0]).vertices_all().ravel(), 9)))
        assert v[0] == pytest.approx(-1.0) and v[-1] == pytest.approx(1.0)
        assert D.eval([-1.0]).is_empty

    def test_not_on_graph(self, halfline_map):
        with pytest.raises(NotOnGraph):
            coderivative(halfline_map, [0.0], [1.0])


class TestKappa:
    def test_epigraph_values(self, epi_abs_region):
        S = SVMap.poly_graph(epi_abs_region, 1, 1)
        D = coderivative(S, [0.0], [0.0])
        assert mord_kappa(D, [1.0]) == pytest.approx(1.0)
        assert mord_kappa(D, [-1.0]) == pytest.approx(1.0)

    def test_linear_scalar(self):
        D = coderivative(SVMap.linear([[2.0]]), [0.0], [0.0])
        for w in (1.0, -2.0, 0.5):
            assert mord_kappa(D, [w]) == pytest.approx(2.0 * abs(w))

    def test_two_slope_kink(self):
        # slopes 1 and 2: the limiting cone contains the full normal lines of
        # both branches, so kappa = 2 in both directions (exhaustive
        # face-enumeration oracle; hand-checked against the defining formula)
        S = corpus.kink_map(1.0, 2.0)
        D = coderivative(S, [0.0], [0.0])
        assert mord_kappa(D, [1.0]) == pytest.approx(2.0)
        assert mord_kappa(D, [-1.0]) == pytest.approx(2.0)

    def test_positive_homogeneity(self):
        S = corpus.kink_map(0.5, 3.0)
        D = coderivative(S, [0.0], [0.0])
        rng = np.random.default_rng(8)
        for _ in range(10):
            w = rng.normal(size=1)
            for k in (0.5, 2.0, 7.0):
                assert mord_kappa(D, k * w) == pytest.approx(
                    k * mord_kappa(D, w), abs=1e-9)


class TestMordT:
    def test_epigraph_ball_map(self, epi_abs_region):
        S = SVMap.poly_graph(epi_abs_region, 1, 1)
        D = coderivative(S, [0.0], [0.0])
        T = mord_T(D)
        for w in (2.0, -1.5):
            v = sorted(eval_map(T, np.array([w])).vertices_all().ravel())
            assert v[0] == pytest.approx(-abs(w))
            assert v[-1] == pytest.approx(abs(w))
        assert graphical_modulus(D) == pytest.approx(1.0)

    def test_linear_modulus_is_adjoint_norm(self):
        A = np.array([[1.5, -2.0]])
        S = SVMap.linear(A)
        D = coderivative(S, [0.0, 0.0], [0.0])
        assert graphical_modulus(D) == pytest.approx(float(np.linalg.norm(A)))

    def test_criterion_fails(self):
        # graph {0} x R: D*S(0|0)(0) contains every v, criterion must fail
        vertical = SVMap.poly_graph(Region.from_polyhedron(
            Polyhedron.from_vrep([[0.0, 0.0]], [[0, 1], [0, -1]])), 1, 1)
        D = coderivative(vertical, [0.0], [0.0])
        with pytest.raises(CriterionFails):
            mord_T(D)
        # dichotomy: the moduli estimate diverges on the same instance
        m = estimate_lip(vertical, [0.0], [0.0],
                         CertConfig(grid_per_axis=9, point_cap=16,
                                    pair_cap=120))
        assert m.value == math.inf

    def test_downstream_pseudo_strict(self, light_cfg):
        S = corpus.kink_map(1.0, 2.0)
        D = coderivative(S, [0.0], [0.0])
        T = mord_T(D)
        c = certify_pseudo(S, T, [0.0], [0.0], "pseudoStrictT", light_cfg)
        assert c.verdict == "verified_at_scale"


class TestPreciseT:
    def test_identity_transform_matches_mord(self, light_cfg):
        S = corpus.kink_map(1.0, 2.0)
        D = coderivative(S, [0.0], [0.0])
        T0 = mord_T(D)
        T1 = precise_T(S, [0.0], [0.0], [(np.eye(1), np.zeros((1, 1)), None)])
        for w in (1.0, -1.0, 0.3):
            a = eval_map(T0, np.array([w]))
            b = eval_map(T1, np.array([w]))
            assert hausdorff(a, b, Ball([0.0], 50.0)) <= 1e-7

    def test_branch_flattening_sharpens(self):
        S = corpus.kink_map(1.0, 2.0)
        cone_neg = Polyhedron.from_hrep([[1.0]], [0.0])
        cone_pos = Polyhedron.from_hrep([[-1.0]], [0.0])
        Tp = precise_T(S, [0.0], [0.0],
                       [(np.eye(1), [[-1.0]], cone_neg),
                        (np.eye(1), [[-2.0]], cone_pos)])
        D = coderivative(S, [0.0], [0.0])
        T0 = mord_T(D)
        v = sorted(eval_map(Tp, np.array([-1.0])).vertices_all().ravel())
        v0 = sorted(eval_map(T0, np.array([-1.0])).vertices_all().ravel())
        assert v[0] == pytest.approx(-2.0) and v[-1] == pytest.approx(0.0)
        assert v0[-1] == pytest.approx(2.0)   # strictly sharper on this side

    def test_empty_partition(self):
        S = corpus.kink_map(1.0, 2.0)
        with pytest.raises(PartitionGap):
            precise_T(S, [0.0], [0.0], [])

    def test_partition_gap(self):
        S = corpus.kink_map(1.0, 2.0)
        cone_pos = Polyhedron.from_hrep([[-1.0]], [0.0])
        with pytest.raises(PartitionGap):
            precise_T(S, [0.0], [0.0],
                      [(np.eye(1), np.zeros((1, 1)), cone_pos)])


class TestConsistencyWithModuli:
    @pytest.mark.parametrize("a,b", [(1.0, 2.0), (0.5, 3.0), (-1.0, 1.0)])
    def test_kink_modulus_matches_lip(self, a, b, light_cfg):
        S = corpus.kink_map(a, b)
        D = coderivative(S, [0.0], [0.0])
        gm = graphical_modulus(D)
        assert gm == pytest.approx(max(abs(a), abs(b)), abs=1e-9)
        m = estimate_lip(S, [0.0], [0.0], light_cfg)
        assert abs(m.value - gm) / gm <= 0.05

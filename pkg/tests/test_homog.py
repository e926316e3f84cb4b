import math

import numpy as np
import pytest

from svdiff import geom, homog
from svdiff.errors import DimensionMismatch, UnsupportedDimension
from svdiff.geom import Ball, Polyhedron, Region, hausdorff
from svdiff.homog import (
    HomogMap,
    compose,
    contains,
    eval_map,
    graph_sample_points,
    inflate,
    intersect_maps,
    lip_at_zero,
    neg_input,
    outer_norm,
    reflect,
    sum_maps,
    to_cone_graph,
    union_maps,
)

TRUNC = Ball([0.0], 100.0)


def ev(T, w):
    return eval_map(T, np.atleast_1d(np.asarray(w, dtype=float)))


class TestEval:
    def test_ball_map(self):
        T = HomogMap.ball(2.0, 1, 1)
        v = ev(T, 3.0).vertices_all().ravel()
        assert sorted(v) == pytest.approx([-6.0, 6.0])

    def test_example_47_values(self, halfline_T):
        assert ev(halfline_T, -1.0).vertices_all().ravel() == pytest.approx([0.0])
        v = sorted(ev(halfline_T, 2.0).vertices_all().ravel())
        assert v[0] == pytest.approx(-2.0) and v[-1] == pytest.approx(2.0)

    def test_bundle(self):
        T = HomogMap.matrix_bundle([[[1.0]], [[-1.0]]])
        v = sorted(ev(T, 5.0).vertices_all().ravel())
        assert v[0] == pytest.approx(-5.0) and v[-1] == pytest.approx(5.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            eval_map(HomogMap.ball(1.0, 2, 1), np.array([1.0]))


class TestOuterNorm:
    def test_ball(self):
        assert outer_norm(HomogMap.ball(3.0, 1, 1)) == 3.0

    def test_example_47(self, halfline_T):
        # sup over |w|<=1 of sup |T(w)| attained at w=1
        assert outer_norm(halfline_T) == pytest.approx(1.0, abs=1e-9)

    def test_semiderivative_map_infinite(self):
        TDS = HomogMap.from_rays([[1, 0, 0], [-1, 0, 0], [0, 0, 1]], 1, 2)
        assert outer_norm(TDS) == math.inf

    def test_hidden_zero_fiber_infinite(self):
        # no single generator has w=0, but their sum does: T(0) = [0, inf)
        T = HomogMap.from_rays([[1, 0, 1], [-1, 0, 1]], 2, 1)
        assert outer_norm(T) == math.inf

    def test_finite_implies_zero_at_zero(self, halfline_T):
        for T in (halfline_T, HomogMap.ball(2.0, 1, 1),
                  HomogMap.matrix_bundle([[[1.0]], [[2.0]]])):
            if math.isfinite(outer_norm(T)):
                T0 = ev(T, 0.0)
                assert T0.is_bounded
                assert float(np.max(np.abs(T0.vertices_all()))) <= 1e-7

    def test_bundle_spectral(self):
        T = HomogMap.matrix_bundle([np.array([[3.0, 4.0]])])
        assert outer_norm(T) == pytest.approx(5.0)


class TestReflect:
    def test_linear_unchanged(self):
        T = HomogMap.linear([[2.0]])
        R = reflect(T)
        for w in (0.7, -1.3):
            assert hausdorff(ev(T, w), ev(R, w), TRUNC) <= 1e-9

    def test_example_47_reflect(self, halfline_T):
        R = reflect(halfline_T)
        v = sorted(ev(R, -2.0).vertices_all().ravel())
        assert v[0] == pytest.approx(-2.0) and v[-1] == pytest.approx(2.0)
        assert ev(R, 2.0).vertices_all().ravel() == pytest.approx([0.0])

    def test_involution(self, halfline_T):
        RR = reflect(reflect(halfline_T))
        rng = np.random.default_rng(0)
        for _ in range(100):
            w = rng.normal() * 2
            assert hausdorff(ev(RR, w), ev(halfline_T, w), TRUNC) <= 1e-7

    def test_neg_input(self, halfline_T):
        N = neg_input(halfline_T)
        v = sorted(ev(N, -2.0).vertices_all().ravel())
        assert v[0] == pytest.approx(-2.0) and v[-1] == pytest.approx(2.0)
        assert ev(N, 1.0).vertices_all().ravel() == pytest.approx([0.0])


class TestCompose:
    def test_identity(self, halfline_T):
        C = compose(halfline_T, HomogMap.identity(1))
        for w in (-1.5, 0.7, 2.0):
            assert hausdorff(ev(C, w), ev(halfline_T, w), TRUNC) <= 1e-7

    def test_ball_arithmetic(self):
        C = compose(HomogMap.ball(2.0, 1, 1), HomogMap.ball(1.5, 1, 1))
        T = HomogMap.ball(3.0, 1, 1)
        rng = np.random.default_rng(1)
        for _ in range(20):
            w = rng.normal()
            assert hausdorff(ev(C, w), ev(T, w), TRUNC) <= 1e-6

    def test_bundle_products(self):
        C = compose(HomogMap.matrix_bundle([[[2.0]]]),
                    HomogMap.matrix_bundle([[[3.0]], [[-3.0]]]))
        assert sorted(float(M[0, 0]) for M in C.matrices) == [-6.0, 6.0]

    def test_graph_composition_dim_cap(self):
        T = HomogMap.from_rays([[1, 0, 0, 1], [-1, 0, 0, -1]], 2, 2)
        with pytest.raises(UnsupportedDimension):
            compose(T, T)


class TestSumUnion:
    def test_zero_identity(self, halfline_T):
        S = sum_maps([halfline_T, HomogMap.zero(1, 1)])
        for w in (-1.0, 0.5):
            assert hausdorff(ev(S, w), ev(halfline_T, w), TRUNC) <= 1e-7

    def test_ball_sum(self):
        S = sum_maps([to_cone_graph(HomogMap.ball(1.0, 1, 1)),
                      to_cone_graph(HomogMap.ball(2.0, 1, 1))])
        E = HomogMap.ball(3.0, 1, 1)
        rng = np.random.default_rng(2)
        for _ in range(50):
            w = rng.normal()
            assert hausdorff(ev(S, w), ev(E, w), TRUNC) <= 1e-6

    def test_union_superset(self, halfline_T):
        U = union_maps([halfline_T, HomogMap.linear([[2.0]])])
        for w in (-1.0, 1.0):
            for piece_map in (halfline_T, HomogMap.linear([[2.0]])):
                pts = ev(piece_map, w).sample_points(2)
                assert np.all(ev(U, w).dist(pts) <= 1e-7)


class TestContains:
    def test_nested_balls(self):
        assert contains(HomogMap.ball(2, 1, 1), HomogMap.ball(1, 1, 1)).holds
        assert not contains(HomogMap.ball(1, 1, 1), HomogMap.ball(2, 1, 1)).holds

    def test_example_46_witness(self):
        T1 = HomogMap.identity(2)
        T2 = HomogMap.linear([[1.0, 0.0], [0.0, 0.0]])
        res = contains(T2, T1, n_dirs=8)
        assert not res.holds
        assert abs(res.witness_dir[1]) == pytest.approx(1.0)

    def test_reflexive(self, halfline_T):
        assert contains(halfline_T, halfline_T).holds


class TestHomogeneityInvariant:
    @pytest.mark.parametrize("maker", [
        lambda: HomogMap.ball(1.7, 1, 1),
        lambda: HomogMap.matrix_bundle([[[1.0]], [[-0.5]]]),
        lambda: HomogMap.from_rays([[1, 1], [1, -1], [-1, 0]], 1, 1),
    ])
    def test_graph_cone_samples(self, maker):
        T = maker()
        rng = np.random.default_rng(4)
        G = to_cone_graph(T).graph
        pts = graph_sample_points(T, rng, count=200)
        for k in (0.1, 0.5, 2.0, 10.0):
            scaled = k * pts
            assert np.all(G.dist(scaled) <= 1e-7 * (1 + np.abs(scaled).max()))


class TestInflation:
    def test_defining_identity(self, halfline_T):
        I = inflate(halfline_T, 0.25)
        w = np.array([-2.0])
        base = ev(halfline_T, w)
        ball = geom.ball_region(np.zeros(1), 0.25 * 2.0)
        expect = geom.minkowski_sum(base, ball)
        assert hausdorff(eval_map(I, w), expect, TRUNC) <= 1e-9

    def test_composition_of_inflations(self, halfline_T):
        rng = np.random.default_rng(9)
        A = inflate(inflate(halfline_T, 0.1), 0.2)
        B = inflate(halfline_T, 0.3)
        for _ in range(10):
            w = rng.normal() * 3
            assert hausdorff(eval_map(A, np.array([w])),
                             eval_map(B, np.array([w])),
                             TRUNC) <= 10 * geom.GEOM_TOL


class TestConversions:
    def test_bundle_singleton_any_dim(self):
        A = np.array([[1.0, 2.0], [0.0, -1.0]])
        G = to_cone_graph(HomogMap.linear(A))
        for w in (np.array([1.0, -1.0]), np.array([0.5, 2.0])):
            v = eval_map(G, w).vertices_all()
            assert np.allclose(v[0], A @ w)

    def test_multi_bundle_needs_dim1(self):
        T = HomogMap.matrix_bundle([np.eye(2), np.diag([1.0, -1.0])])
        with pytest.raises(UnsupportedDimension):
            to_cone_graph(T)

    def test_intersection_example_46(self):
        TI = intersect_maps(HomogMap.identity(2),
                            HomogMap.linear([[1.0, 0.0], [0.0, 0.0]]))
        assert eval_map(TI, np.array([0.0, 1.0])).is_empty
        v = eval_map(TI, np.array([1.0, 0.0])).vertices_all()
        assert np.allclose(v[0], [1.0, 0.0])

    def test_lip_at_zero(self):
        assert lip_at_zero(HomogMap.ball(2.5, 1, 1)) == 2.5
        assert lip_at_zero(HomogMap.matrix_bundle([np.array([[3.0, 4.0]])])) \
            == pytest.approx(5.0)

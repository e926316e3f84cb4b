import math

import numpy as np
import pytest

from svdiff.errors import OracleNotInvertible, OutsideDomain
from svdiff.geom import Ball, Polyhedron, Region, hausdorff
from svdiff.svmap import (
    GraphPoint,
    SVMap,
    compose_graphs,
    eval_map,
    invert,
    limit_probe,
    oracle,
    pl_graph,
    semicontinuity_report,
    slack_resolution,
    sum_graphs,
)


class TestEval:
    def test_vertical_product_value(self, vertical_product_map):
        val = eval_map(vertical_product_map, [0.5, 7.0])
        p = val.pieces[0]
        assert np.allclose(p.vertices[0], [0.5, 0.0])
        assert sorted(r[1] for r in p.rays) == [-1.0, 1.0]

    def test_halfline_value(self, halfline_map):
        val = eval_map(halfline_map, [3.0])
        p = val.pieces[0]
        assert p.vertices.ravel() == pytest.approx([3.0])
        assert p.rays.ravel() == pytest.approx([-1.0])

    def test_linear_singleton(self):
        S = SVMap.linear([[2.0, -1.0]])
        assert eval_map(S, [1.0, 1.0]).vertices_all().ravel() == \
            pytest.approx([1.0])

    def test_oracle_domain(self):
        S = oracle("sign_jump")
        with pytest.raises(OutsideDomain):
            eval_map(S, [5.0])


class TestInvert:
    def test_halfline(self, halfline_map):
        Si = invert(halfline_map)
        val = eval_map(Si, [2.0])
        p = val.pieces[0]
        assert p.vertices.ravel() == pytest.approx([2.0])
        assert p.rays.ravel() == pytest.approx([1.0])

    def test_linear(self):
        Si = invert(SVMap.linear([[2.0]]))
        assert eval_map(Si, [4.0]).vertices_all().ravel() == pytest.approx([2.0])

    def test_involution(self, halfline_map):
        Sii = invert(invert(halfline_map))
        for x in (-1.0, 0.0, 2.0):
            a = eval_map(Sii, [x])
            b = eval_map(halfline_map, [x])
            assert hausdorff(a, b, Ball([0.0], 50.0)) <= 1e-9

    def test_oracle_not_invertible(self):
        with pytest.raises(OracleNotInvertible):
            invert(oracle("sign_jump"))


class TestGraphPoint:
    def test_validate(self, halfline_map):
        GraphPoint([1.0], [0.5]).validate(halfline_map)
        from svdiff.errors import NotOnGraph
        with pytest.raises(NotOnGraph):
            GraphPoint([1.0], [2.0]).validate(halfline_map)

    def test_slice_consistency_random(self, halfline_map):
        rng = np.random.default_rng(6)
        G = halfline_map.graph.pieces[0]
        V, R = G.vrep
        for _ in range(30):
            pt = V[0] + np.abs(rng.standard_normal(len(R))) @ R
            val = eval_map(halfline_map, pt[:1])
            assert float(val.dist(pt[1:].reshape(1, -1))[0]) <= 1e-7


class TestLimitProbe:
    def test_constant_map(self):
        S = SVMap.poly_graph(Region.from_polyhedron(
            Polyhedron.from_hrep([[0.0, 1.0], [0.0, -1.0]], [1.0, 0.0])), 1, 1)
        outer, inner, rec = limit_probe(S, [0.0], truncation=Ball([0.0], 5.0))
        C = Region.interval(0.0, 1.0)
        assert hausdorff(outer, C) <= 0.05
        assert hausdorff(inner, C) <= 0.05

    def test_sign_jump(self):
        S = oracle("sign_jump")
        outer, inner, rec = limit_probe(S, [0.0], truncation=Ball([0.0], 5.0))
        pts = outer.vertices_all().ravel()
        assert np.min(np.abs(pts - 1.0)) <= 1e-9
        assert np.min(np.abs(pts + 1.0)) <= 1e-9
        if not inner.is_empty:   # nothing is approached from both sides
            assert np.all(np.abs(inner.vertices_all()) > 2)

    def test_ray_map(self):
        S = oracle("ray_rotation")
        outer, _, _ = limit_probe(S, [0.7], truncation=Ball([0.0, 0.0], 2.0))
        ray = eval_map(S, [0.7]).truncate(Ball([0.0, 0.0], 2.0))
        assert float(np.max(ray.dist(outer.vertices_all()))) <= 0.05


class TestSemicontinuity:
    def test_linear_both_hold(self):
        rep = semicontinuity_report(SVMap.linear([[2.0]]), [0.3],
                                    truncation=Ball([0.0], 5.0))
        assert rep["outer"] == "holds at resolution"
        assert rep["inner"] == "holds at resolution"

    def test_ray_map_continuous(self):
        rep = semicontinuity_report(oracle("ray_rotation"), [0.7],
                                    truncation=Ball([0.0, 0.0], 2.0))
        assert rep["outer"] == "holds at resolution"
        assert rep["inner"] == "holds at resolution"

    def test_sign_jump_inner_fails(self):
        rep = semicontinuity_report(oracle("sign_jump"), [0.0],
                                    truncation=Ball([0.0], 5.0))
        assert rep["outer"] == "holds at resolution"
        assert rep["inner"] == "fails with witness"
        assert abs(abs(float(rep["inner_witness"][0])) - 1.0) <= 1e-9

    def test_closed_polygraphs_outer_holds(self, halfline_map,
                                           vertical_product_map):
        for S, x in ((halfline_map, [0.0]),
                     (vertical_product_map, [0.0, 0.0]),
                     (pl_graph([0.0], [0.0], 1.0, 3.0), [0.0])):
            rep = semicontinuity_report(S, x,
                                        truncation=Ball(np.zeros(S.dim_out), 5.0))
            assert rep["outer"] == "holds at resolution"


class TestComposeSum:
    def test_compose(self):
        C = compose_graphs(SVMap.linear([[2.0]]), SVMap.linear([[3.0]]))
        assert eval_map(C, [1.0]).vertices_all().ravel() == pytest.approx([6.0])

    def test_sum(self):
        S = sum_graphs([SVMap.linear([[2.0]]), SVMap.linear([[3.0]])])
        assert eval_map(S, [1.5]).vertices_all().ravel() == pytest.approx([7.5])


class TestOracles:
    def test_sqrt_hook_structure(self):
        S = oracle("sqrt_hook", resolution=1e-3)
        val = eval_map(S, [0.04])
        vv = val.vertices_all()
        top = vv[np.argmax(vv[:, 0])]
        assert top == pytest.approx([0.04, 0.2], abs=1e-9)
        rays = np.vstack([p.rays for p in val.pieces if len(p.rays)])
        assert np.allclose(rays, [[0.0, 1.0]])
        assert slack_resolution(S) == 1e-3

    def test_exact_oracles_carry_no_slack(self):
        assert slack_resolution(oracle("parabola")) == 0.0
        assert slack_resolution(oracle("cube_root")) == 0.0

    def test_sqrt_hook_discretization_accuracy(self):
        S = oracle("sqrt_hook", resolution=1e-3)
        val = eval_map(S, [0.5])
        ts = np.linspace(0.0, 0.5, 200)
        curve = np.stack([ts, np.sqrt(ts)], axis=1)
        assert float(np.max(val.dist(curve))) <= 1.5e-3

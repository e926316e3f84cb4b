import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svdiff import geom
from svdiff.errors import (
    DimensionMismatch,
    EmptyRegion,
    NotReachable,
    UnboundedWithoutTruncation,
    UnsupportedDimension,
)
from svdiff.geom import (
    Ball,
    Polyhedron,
    Region,
    dist_point_region,
    extreme_points,
    gauge,
    hausdorff,
    minkowski_sum,
    support,
    unit_polyball,
)


def grid_dist_oracle(p, A, b, lo, hi, step):
    """Brute-force projection: min distance over a feasible grid."""
    axes = [np.arange(lo[i], hi[i] + step, step) for i in range(len(lo))]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    feas = np.all(pts @ np.asarray(A).T <= np.asarray(b) + 1e-12, axis=1)
    return float(np.min(np.linalg.norm(pts[feas] - p, axis=1)))


class TestDistance:
    def test_interval_endpoint(self):
        R = Region.interval(1.0, 2.0)
        assert dist_point_region([0.0], R) == pytest.approx(1.0)

    def test_membership_zero(self, epi_abs_region):
        assert dist_point_region([0.0, 0.0], epi_abs_region) == 0.0
        assert dist_point_region([0.3, 2.0], epi_abs_region) == 0.0

    def test_epigraph_against_grid_oracle(self, epi_abs_region):
        # independent oracle: brute-force grid projection at resolution 1e-4
        A = np.array([[1.0, -1.0], [-1.0, -1.0]])
        oracle = grid_dist_oracle(np.array([2.0, 0.0]), A, np.zeros(2),
                                  [0.5, 0.5], [1.5, 1.5], 1e-4)
        d = dist_point_region([2.0, 0.0], epi_abs_region)
        assert abs(d - oracle) <= 1e-3
        assert d == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_zero_iff_member(self):
        rng = np.random.default_rng(3)
        P = Polyhedron.from_vrep(rng.normal(size=(6, 2)))
        R = Region.from_polyhedron(P)
        pts = rng.normal(size=(40, 2))
        d = R.dist(pts)
        member = R.contains(pts)
        assert np.all((d <= 1e-7) == member)

    def test_empty_region_raises(self):
        with pytest.raises(EmptyRegion):
            dist_point_region([0.0], Region.empty(1))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dist_point_region([0.0, 0.0], Region.interval(0, 1))


class TestHausdorff:
    def test_identity(self):
        C = Region.interval(0, 1)
        assert hausdorff(C, C) == 0.0

    def test_singletons(self):
        assert hausdorff(Region.point([0.0]), Region.point([3.0])) == \
            pytest.approx(3.0)

    def test_boxes_against_grid_oracle(self):
        # Euclidean value is sqrt(2), attained at the far corner (2,2)
        C = Region.from_polyhedron(Polyhedron.box([0, 0], [1, 1]))
        D = Region.from_polyhedron(Polyhedron.box([0, 0], [2, 2]))
        xs = np.linspace(0, 2, 501)
        pts = np.stack(np.meshgrid(xs, xs, indexing="ij"), -1).reshape(-1, 2)
        clamp = np.clip(pts, 0.0, 1.0)          # exact projection onto C
        oracle = float(np.max(np.linalg.norm(pts - clamp, axis=1)))
        h = hausdorff(C, D)
        assert abs(h - oracle) <= 1e-3
        assert h == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_unbounded_needs_truncation(self, epi_abs_region):
        with pytest.raises(UnboundedWithoutTruncation):
            hausdorff(epi_abs_region, epi_abs_region)
        assert hausdorff(epi_abs_region, epi_abs_region,
                         truncation=Ball([0.0, 0.0], 3.0)) <= 1e-9

    def test_pseudometric_on_random_polytopes(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            Cs = [Region.from_polyhedron(
                Polyhedron.from_vrep(rng.normal(size=(5, 2))))
                for _ in range(3)]
            d01 = hausdorff(Cs[0], Cs[1])
            d10 = hausdorff(Cs[1], Cs[0])
            assert d01 == pytest.approx(d10, abs=1e-12)
            d02 = hausdorff(Cs[0], Cs[2])
            d12 = hausdorff(Cs[1], Cs[2])
            assert d02 <= d01 + d12 + 3 * geom.GEOM_TOL


class TestMinkowski:
    def test_intervals(self):
        M = minkowski_sum(Region.interval(0, 1), Region.interval(0, 2))
        V = extreme_points(M.pieces[0].vertices).ravel()
        assert sorted(V) == pytest.approx([0.0, 3.0])

    def test_zero_identity(self, epi_abs_region):
        M = minkowski_sum(Region.point([0.0, 0.0]), epi_abs_region)
        assert hausdorff(M, epi_abs_region,
                         truncation=Ball([0.0, 0.0], 5.0)) <= 1e-9

    def test_triangle_plus_square_support_additivity(self):
        # oracle: h_{A+B}(u) = h_A(u) + h_B(u) on 100 directions
        A = Region.from_polyhedron(
            Polyhedron.from_vrep([[0, 0], [1, 0], [0, 1]]))
        B = Region.from_polyhedron(Polyhedron.box([0, 0], [1, 1]))
        M = minkowski_sum(A, B)
        ang = np.linspace(0, 2 * np.pi, 100, endpoint=False)
        for u in np.stack([np.cos(ang), np.sin(ang)], axis=1):
            assert M.support(u) == pytest.approx(
                A.support(u) + B.support(u), abs=1e-9)
        hull = extreme_points(M.vertices_all())
        expect = {(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)}
        assert {tuple(np.round(v, 9)) for v in hull} == expect

    def test_random_support_additivity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            A = Region.from_polyhedron(Polyhedron.from_vrep(rng.normal(size=(5, 2))))
            B = Region.from_polyhedron(Polyhedron.from_vrep(rng.normal(size=(4, 2))))
            M = minkowski_sum(A, B)
            for _ in range(50):
                u = rng.normal(size=2)
                u /= np.linalg.norm(u)
                assert abs(M.support(u) - A.support(u) - B.support(u)) \
                    <= 10 * geom.GEOM_TOL


class TestSupportGauge:
    def test_square_corner(self):
        C = Region.from_polyhedron(Polyhedron.box([0, 0], [1, 1]))
        assert support(C, [1, 1]) == pytest.approx(2.0)

    def test_recession_direction_infinite(self, epi_abs_region):
        assert support(epi_abs_region, [0.0, 1.0]) == math.inf

    def test_segment(self):
        C = Region.from_polyhedron(Polyhedron.from_vrep([[-1, -1], [1, -1]]))
        assert support(C, [0, -1]) == pytest.approx(1.0)

    def test_gauge_examples(self):
        box = Region.from_polyhedron(Polyhedron.box([-1, -1], [1, 1]))
        assert gauge(box, [2, 0]) == pytest.approx(2.0)
        assert gauge(Region.interval(-1, 2), [4.0]) == pytest.approx(2.0)
        assert gauge(box, [0.0, 0.0]) == 0.0

    def test_gauge_unreachable(self):
        C = Region.from_polyhedron(Polyhedron.from_vrep([[0, 0], [1, 0]]))
        with pytest.raises(NotReachable):
            gauge(C, [0.0, 1.0])

    @given(st.floats(0.1, 50.0),
           st.floats(-3, 3).filter(lambda v: v == 0 or abs(v) > 1e-6),
           st.floats(-3, 3).filter(lambda v: v == 0 or abs(v) > 1e-6))
    @settings(max_examples=40, deadline=None)
    def test_gauge_positive_homogeneity(self, t, wx, wy):
        box = Region.from_polyhedron(Polyhedron.box([-1, -2], [2, 1]))
        w = np.array([wx, wy])
        assert gauge(box, t * w) == pytest.approx(t * gauge(box, w),
                                                  rel=1e-9, abs=1e-9)


class TestRepresentations:
    def test_hv_consistency_random(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            dim = int(rng.integers(1, 4))
            V = rng.normal(size=(dim + 2 + int(rng.integers(0, 3)), dim))
            P = Polyhedron.from_vrep(V)
            A, b = P.hrep
            Vv, _ = P.vrep
            # every vertex satisfies hrep
            assert np.all(Vv @ A.T - b[None, :] <= 1e-7)
            # random hrep-feasible points lie in the vrep-generated set
            pts = rng.normal(size=(50, dim)) * 2
            feas = pts[np.all(pts @ A.T - b[None, :] <= 0, axis=1)]
            if len(feas):
                assert np.all(P.dist(feas) <= 1e-7)

    def test_unbounded_roundtrip(self, epi_abs_region):
        P = epi_abs_region.pieces[0]
        V, R = P.vrep
        Q = Polyhedron.from_vrep(V, R)
        A, b = Q.hrep
        pts = np.array([[0.0, 1.0], [2.0, 5.0], [1.0, 0.5], [0.0, -0.1]])
        assert list(Q.contains(pts)) == [True, True, False, False]

    def test_dim_cap(self):
        with pytest.raises(UnsupportedDimension):
            Polyhedron.from_vrep(np.zeros((1, 5)))

    def test_lines_and_lower_dimensional_sets(self):
        L = Polyhedron.from_vrep([[2.0, 0.0]], [[0, 1], [0, -1]])
        assert len(L.hrep[0]) == 2
        assert L.contains(np.array([[2.0, 9.0]]))[0]
        assert not L.contains(np.array([[2.2, 0.0]]))[0]
        full = Polyhedron.from_hrep(np.zeros((0, 2)), np.zeros(0))
        V, R = full.vrep
        assert len(V) == 1 and len(R) == 4

    def test_empty_detection(self):
        P = Polyhedron.from_hrep([[1.0], [-1.0]], [0.0, -1.0])  # x<=0, x>=1
        assert P.is_empty


class TestPolyball:
    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_circumscribed(self, dim):
        P, factor = unit_polyball(dim)
        assert factor >= 1.0 - 1e-12
        rng = np.random.default_rng(dim)
        pts = rng.normal(size=(50, dim))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        assert np.all(P.contains(pts))           # contains the unit sphere
        V, _ = P.vrep
        assert np.max(np.linalg.norm(V, axis=1)) <= factor + 1e-9

    def test_dim1_exact(self):
        P, factor = unit_polyball(1)
        assert factor == 1.0
        assert sorted(P.vertices.ravel()) == [-1.0, 1.0]


class TestExtremePoints:
    def test_collinear_cloud(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [0.2, 0.2]])
        E = extreme_points(pts)
        assert {tuple(np.round(v, 9)) for v in E} == {(0, 0), (1, 1)}

    def test_noisy_clusters(self):
        rng = np.random.default_rng(0)
        cloud = np.vstack([
            np.array([1.0, 0.0]) + 1e-9 * rng.normal(size=(10, 2)),
            np.array([0.0, 1.0]) + 1e-9 * rng.normal(size=(10, 2)),
        ])
        E = extreme_points(cloud, tol=1e-6)
        assert len(E) == 2

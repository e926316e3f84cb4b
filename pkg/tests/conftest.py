import numpy as np
import pytest

from svdiff.certify import CertConfig
from svdiff.geom import Polyhedron, Region
from svdiff.homog import HomogMap
from svdiff.svmap import SVMap


@pytest.fixture
def cfg():
    return CertConfig()


@pytest.fixture
def light_cfg():
    return CertConfig(grid_per_axis=11, point_cap=24, pair_cap=300)


@pytest.fixture
def halfline_map():
    """Example map S(x) = (-inf, x] (graph {y <= x})."""
    return SVMap.poly_graph(
        Region.from_polyhedron(Polyhedron.from_hrep([[-1.0, 1.0]], [0.0])),
        1, 1, name="halfline")


@pytest.fixture
def halfline_T():
    """Its one-sided derivative map: T(w) = {0} for w<=0, [-w,w] for w>=0."""
    return HomogMap.cone_graph(Region(2, [
        Polyhedron.from_vrep([[0.0, 0.0]], [[-1.0, 0.0]]),
        Polyhedron.from_vrep([[0.0, 0.0]], [[1.0, 1.0], [1.0, -1.0]]),
    ]), 1, 1)


@pytest.fixture
def epi_abs_region():
    """{(x, y): y >= |x|} as a single polyhedron region."""
    return Region.from_polyhedron(
        Polyhedron.from_hrep([[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0]))


@pytest.fixture
def vertical_product_map():
    """Example map S(x, y) = {x} x R (graph {(x,y,u,v): u = x} in R^4)."""
    A = np.array([[1.0, 0.0, -1.0, 0.0], [-1.0, 0.0, 1.0, 0.0]])
    return SVMap.poly_graph(
        Region.from_polyhedron(Polyhedron.from_hrep(A, np.zeros(2))), 2, 2)

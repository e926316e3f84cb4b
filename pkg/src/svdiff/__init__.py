"""svdiff: certifiable generalized differentiation of set-valued maps.

An executable toolkit for T-differentiability of set-valued maps on low
dimensional real spaces: epsilon-delta certification and refutation of the
differentiability notions, calmness/Lipschitz/graphical moduli estimation,
Clarke Jacobians, exact polyhedral normal cones and coderivatives, the
directional Mordukhovich derivative map, chain and sum rules, and the metric
regularity / open covering equivalences, all as testable operations.
"""

__version__ = "0.1.0"

from . import calculus, certify, clarke, coderiv, geom, homog, regcover, \
    strictify, svmap
from .certify import CertConfig, Certificate, Modulus
from .geom import Ball, Polyhedron, Region
from .homog import HomogMap
from .svmap import GraphPoint, SVMap

__all__ = [
    "Ball", "CertConfig", "Certificate", "GraphPoint", "HomogMap", "Modulus",
    "Polyhedron", "Region", "SVMap", "calculus", "certify", "clarke",
    "coderiv", "geom", "homog", "regcover", "strictify", "svmap",
    "__version__",
]

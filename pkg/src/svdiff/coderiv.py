"""Exact normal cones of piecewise-polyhedral sets and coderivatives.

The general (limiting) normal cone at a point of a polyhedral union is
computed by exact face-stratum enumeration: locally the set is a union of
tangent cones; the hyperplane arrangement generated by the active constraints
is enumerated cell by cell (sign vectors with margin-LP realizability), and
each realizable cell contributes the regular normal cone of the union at its
points.  No sampling is involved; this is the module the rest of the toolkit
trusts as an oracle.

On top of the coderivative sit the directional Mordukhovich objects: the
support function kappa(w) of the negated coderivative slice, the derivative
map w |-> kappa(w)*B^m (exact for m = 1; circumscribed polyball recorded for
m >= 2), and the graphical modulus max_{|w|<=1} kappa(w).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import geom, svmap
from .errors import (
    ComplexityBudgetExceeded,
    CriterionFails,
    NotInSet,
    NotOnGraph,
    PartitionGap,
)
from .geom import Polyhedron, Region
from .homog import HomogMap

_MAX_HYPERPLANES = 12
_MARGIN = 1e-7
_ACTIVE_TOL = 1e-7


@dataclass(frozen=True)
class NormalCone:
    """Regular and general (limiting) normal cones at a point."""

    at: np.ndarray
    regular: Region
    general: Region


@dataclass(frozen=True)
class Coderivative:
    """General normal cone of gph(S) at (xbar, ybar), block bookkeeping.

    A pair (v, u) in the cone region encodes v in D*S(xbar|ybar)(z) with
    z = -u.
    """

    x: np.ndarray
    y: np.ndarray
    cones: Region          # in R^{n+m}, coordinates (v, u), u = -z
    dim_in: int
    dim_out: int

    def eval(self, z):
        """The set D*S(xbar|ybar)(z) = {v : (v, -z) in N_gph}."""
        z = geom.as_point(z, self.dim_out)
        n = self.dim_in
        return self.cones.slice(range(n, n + self.dim_out), -z)


def _cell_feasible(hyps, signs, dim):
    """Margin LP: is there d with a_h.d = 0 (sign 0), sign*(a_h.d) >= t > 0?"""
    A_eq, A_ub = [], []
    for a, s in zip(hyps, signs):
        if s == 0:
            A_eq.append(np.concatenate([a, [0.0]]))
        else:
            A_ub.append(np.concatenate([-s * a, [1.0]]))
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    bounds = [(-1.0, 1.0)] * dim + [(0.0, 1.0)]
    res = linprog(c,
                  A_ub=np.array(A_ub) if A_ub else None,
                  b_ub=np.zeros(len(A_ub)) if A_ub else None,
                  A_eq=np.array(A_eq) if A_eq else None,
                  b_eq=np.zeros(len(A_eq)) if A_eq else None,
                  bounds=bounds, method="highs")
    return bool(res.status == 0 and res.x is not None and res.x[-1] > _MARGIN)


def _enumerate_cells(hyps, dim):
    """All realizable sign vectors of the arrangement (DFS with LP pruning)."""
    cells = []

    def rec(prefix):
        k = len(prefix)
        if k and not _cell_feasible(hyps[:k], prefix, dim):
            return
        if k == len(hyps):
            if any(s != 0 for s in prefix):
                cells.append(tuple(prefix))
            return
        for s in (0, -1, 1):
            rec(prefix + [s])

    rec([])
    return cells


def _cone_from_generators(G, dim):
    if len(G) == 0:
        return Polyhedron.point(np.zeros(dim))
    return Polyhedron(dim, vrep=(np.zeros((1, dim)), np.asarray(G, dtype=float)))


def _intersect_cones(cones):
    out = cones[0]
    for c in cones[1:]:
        out = out.intersect(c)
    return out


def normal_cone(C, xbar, tol=_ACTIVE_TOL):
    """Regular and general normal cones of the region C at xbar (exact)."""
    xbar = geom.as_point(xbar, C.dim)
    scale = 1.0 + float(np.max(np.abs(xbar)))
    local = [p for p in C.pieces
             if not p.is_empty and p.dist(xbar.reshape(1, -1))[0] <= tol * scale]
    if not local:
        raise NotInSet(f"{xbar} is not in the region")
    d = C.dim
    # active rows per piece, recentered to direction space
    hyps = []           # unit normals, deduplicated up to sign
    piece_rows = []     # per piece: list of (hyp index, sign)
    for p in local:
        A, b = p.hrep
        rows = []
        for a, bb in zip(A, b):
            if abs(float(a @ xbar) - bb) <= tol * scale:
                sign = 1
                idx = None
                for k, h in enumerate(hyps):
                    if np.linalg.norm(h - a) <= 1e-9:
                        idx, sign = k, 1
                        break
                    if np.linalg.norm(h + a) <= 1e-9:
                        idx, sign = k, -1
                        break
                if idx is None:
                    hyps.append(a)
                    idx, sign = len(hyps) - 1, 1
                rows.append((idx, sign, a))
        piece_rows.append(rows)
    if len(hyps) > _MAX_HYPERPLANES:
        raise ComplexityBudgetExceeded(
            f"{len(hyps)} active hyperplanes at {xbar}")

    def cell_cone(signs):
        gens_per_piece = []
        for rows in piece_rows:
            ok = all(s * signs[idx] <= 0 for idx, s, _ in rows)
            if ok:
                gens_per_piece.append([a for idx, s, a in rows
                                       if signs[idx] == 0])
        if not gens_per_piece:
            return None
        cones = [_cone_from_generators(G, d) for G in gens_per_piece]
        return _intersect_cones(cones)

    regular = cell_cone((0,) * len(hyps))
    pieces = [regular]
    seen = set()
    for signs in _enumerate_cells(hyps, d):
        cone = cell_cone(signs)
        if cone is None or cone.is_empty:
            continue
        V, R = cone.vrep
        key = tuple(sorted(map(tuple, np.round(R, 9).tolist())))
        if key in seen:
            continue
        seen.add(key)
        pieces.append(cone)
    return NormalCone(at=xbar, regular=Region(d, [regular]),
                      general=Region(d, pieces))


def coderivative(S, xbar, ybar, tol=_ACTIVE_TOL):
    """Coderivative of a poly-graph map at a graph point (exact)."""
    xbar = geom.as_point(xbar, S.dim_in)
    ybar = geom.as_point(ybar, S.dim_out)
    if S.backend != "poly_graph":
        raise NotOnGraph("coderivatives need a poly-graph backend")
    point = np.concatenate([xbar, ybar])
    try:
        nc = normal_cone(S.graph, point, tol)
    except NotInSet as exc:
        raise NotOnGraph(str(exc)) from exc
    return Coderivative(x=xbar, y=ybar, cones=nc.general,
                        dim_in=S.dim_in, dim_out=S.dim_out)


def _slice_z_ball(D, level=8):
    """Pieces of N_gph intersected with {|u| <= 1} (u the negated-z block)."""
    n, m = D.dim_in, D.dim_out
    B, factor = geom.unit_polyball(m, level)
    Ab, bb = B.hrep
    rows = np.hstack([np.zeros((len(Ab), n)), Ab])
    out = []
    for p in D.cones.pieces:
        A, b = p.hrep
        out.append(Polyhedron(n + m, hrep=(np.vstack([A, rows]),
                                           np.concatenate([b, bb]))))
    return out, factor


def mord_kappa(D, w, level=8):
    """kappa(w) = max{<-v, w> : v in D*S(xbar|ybar)(B^m)} (may be +inf)."""
    w = geom.as_point(w, D.dim_in)
    n = D.dim_in
    slices, _ = _slice_z_ball(D, level)
    best = 0.0
    for Q in slices:
        V, R = Q.vrep
        if len(R) and float(np.max(R[:, :n] @ (-w))) > 1e-9:
            return math.inf
        if len(V):
            best = max(best, float(np.max(V[:, :n] @ (-w))))
    return best


def _kappa_vertices(D, level=8):
    """The finite set Q with kappa(w) = max_q <q, w>; CriterionFails if the
    coderivative has an unbounded slice (D*S(0) != {0})."""
    n = D.dim_in
    slices, factor = _slice_z_ball(D, level)
    qs = [np.zeros(n)]
    for Q in slices:
        V, R = Q.vrep
        if len(R) and float(np.max(np.linalg.norm(R[:, :n], axis=1))) > 1e-9:
            raise CriterionFails("D*S(xbar|ybar)(0) != {0}")
        for v in V:
            qs.append(-v[:n])
    return geom.extreme_points(np.array(qs)), factor


def graphical_modulus(D, level=8):
    """max_{|w|<=1} kappa(w) = max over the kappa vertex set of |q| (exact)."""
    qs, _ = _kappa_vertices(D, level)
    return float(np.max(np.linalg.norm(qs, axis=1)))


def mord_T(D, level=8):
    """The derivative map T(w) = kappa(w)*B^m as an exact cone graph.

    kappa is piecewise linear (a support function of the finite vertex set),
    recovered exactly from the maximizing vertices; ties emit both adjacent
    pieces.  For m >= 2 the output ball is the circumscribed polyball with
    its over-approximation factor recorded on the map's pieces.
    """
    n, m = D.dim_in, D.dim_out
    qs, factor = _kappa_vertices(D, level)
    B, _ = geom.unit_polyball(m, level)
    Ab, bb = B.hrep
    pieces = []
    for i, qi in enumerate(qs):
        rows = []
        for j, qj in enumerate(qs):
            if j != i:
                rows.append(np.concatenate([qj - qi, np.zeros(m)]))
        for a, off in zip(Ab, bb):
            # |y|_B <= <q_i, w>, one facet at a time: a.y <= off * <q_i, w>
            rows.append(np.concatenate([-off * qi, a]))
        pieces.append(Polyhedron(n + m, hrep=(np.array(rows),
                                              np.zeros(len(rows)))))
    return HomogMap.cone_graph(Region(n + m, pieces), n, m)


def precise_T(S, xbar, ybar, transforms, level=8, n_dirs=64, seed=0):
    """Direction-partitioned sharpening of mord_T (transform calculus).

    Each transform is (g, f, cone): g an invertible m x m matrix, f an m x n
    matrix, cone a Polyhedron of directions w (None = all directions).  The
    criterion map of g.S + f is pulled back through the inverse transform and
    restricted to the cone; the pieces are unioned.  Raises PartitionGap when
    the direction cones fail to cover sampled sphere directions.
    """
    from .homog import unit_directions
    xbar = geom.as_point(xbar, S.dim_in)
    ybar = geom.as_point(ybar, S.dim_out)
    if not transforms:
        raise PartitionGap("empty transform list")
    n, m = S.dim_in, S.dim_out
    cones = []
    pieces = []
    for g, f, cone in transforms:
        g = np.atleast_2d(np.asarray(g, dtype=float))
        f = np.atleast_2d(np.asarray(f, dtype=float))
        if abs(np.linalg.det(g)) < 1e-12:
            raise ValueError("transform g must be invertible")
        M = np.zeros((n + m, n + m))
        M[:n, :n] = np.eye(n)
        M[n:, :n] = f
        M[n:, n:] = g
        St = svmap.transform_graph(S, M)
        yt = g @ ybar + f @ xbar
        Dt = coderivative(St, xbar, yt)
        Tt = mord_T(Dt, level)
        ginv = np.linalg.inv(g)
        P = np.zeros((n + m, n + m))
        P[:n, :n] = np.eye(n)
        P[n:, :n] = -ginv @ f
        P[n:, n:] = ginv
        G = Tt.graph.linear_image(P)
        if cone is not None:
            CA, Cb = cone.hrep
            rows = np.hstack([CA, np.zeros((len(CA), m))])
            G = G.intersect(Region.from_polyhedron(
                Polyhedron(n + m, hrep=(rows, Cb))))
        pieces.extend(G.pieces)
        cones.append(cone)
    for w in unit_directions(n, n_dirs, seed):
        covered = any(c is None or bool(c.contains(w.reshape(1, -1))[0])
                      for c in cones)
        if not covered:
            raise PartitionGap(f"direction {w} uncovered by the partition")
    return HomogMap.cone_graph(Region(n + m, pieces), n, m)

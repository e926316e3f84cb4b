"""Algebra of positively homogeneous set-valued maps T : R^n => R^m.

A map is stored either as a cone graph (a Region in R^{n+m} whose pieces are
polyhedral cones), as a matrix bundle w |-> {A w : A in conv{A_1..A_k}}, or as
a scaled-ball map w |-> kappa*|w|*B.  Bundles and balls stay symbolic; the
conversions to cone graphs that are not exactly polyhedral are refused rather
than silently approximated (see to_cone_graph).

Evaluation returns geom.Region values; the delta-inflation (T + delta) wraps a
map and evaluates through a circumscribed polyhedral ball, so every
downstream containment check errs on the conservative side (over-approximation
factor recorded on the polyball).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .errors import (
    ComplexityBudgetExceeded,
    DimensionMismatch,
    UnsupportedDimension,
)
from .geom import GEOM_TOL, Polyhedron, Region

_COMPOSE_PIECE_BUDGET = 10_000


def unit_directions(dim, count, seed=0):
    """Deterministic unit directions; axis pairs first, then seeded draws."""
    dirs = []
    eye = np.eye(dim)
    for i in range(dim):
        dirs.append(eye[i])
        dirs.append(-eye[i])
    rng = np.random.default_rng(seed)
    while len(dirs) < count:
        v = rng.standard_normal(dim)
        n = np.linalg.norm(v)
        if n > 1e-12:
            dirs.append(v / n)
    return np.array(dirs[:count])


class HomogMap:
    """Positively homogeneous set-valued map with one of three backends."""

    __slots__ = ("kind", "dim_in", "dim_out", "graph", "matrices", "kappa", "level")

    def __init__(self, kind, dim_in, dim_out, graph=None, matrices=None,
                 kappa=None, level=8):
        self.kind = kind
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)
        self.graph = graph
        self.matrices = matrices
        self.kappa = kappa
        self.level = level
        if kind == "cone_graph":
            if graph.dim != self.dim_in + self.dim_out:
                raise DimensionMismatch("cone graph lives in R^(n+m)")
        elif kind == "matrix_bundle":
            if not matrices:
                raise ValueError("empty matrix bundle")
        elif kind == "ball":
            if kappa is None or kappa < 0:
                raise ValueError("ball map needs kappa >= 0")
        else:
            raise ValueError(f"unknown kind {kind!r}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def cone_graph(cls, graph, dim_in, dim_out):
        return cls("cone_graph", dim_in, dim_out, graph=graph)

    @classmethod
    def from_rays(cls, rays, dim_in, dim_out):
        """Cone graph generated by one list of (w, y) rays."""
        rays = np.asarray(rays, dtype=float)
        P = Polyhedron(dim_in + dim_out,
                       vrep=(np.zeros((1, dim_in + dim_out)), rays))
        return cls.cone_graph(Region.from_polyhedron(P), dim_in, dim_out)

    @classmethod
    def matrix_bundle(cls, matrices):
        mats = tuple(np.atleast_2d(np.asarray(M, dtype=float)) for M in matrices)
        m, n = mats[0].shape
        if any(M.shape != (m, n) for M in mats):
            raise DimensionMismatch("bundle matrices must share a shape")
        return cls("matrix_bundle", n, m, matrices=mats)

    @classmethod
    def linear(cls, A):
        return cls.matrix_bundle([A])

    @classmethod
    def identity(cls, dim):
        return cls.linear(np.eye(dim))

    @classmethod
    def zero(cls, dim_in, dim_out):
        return cls.matrix_bundle([np.zeros((dim_out, dim_in))])

    @classmethod
    def ball(cls, kappa, dim_in, dim_out, level=8):
        return cls("ball", dim_in, dim_out, kappa=float(kappa), level=level)

    def __repr__(self):
        tag = {"cone_graph": lambda: f"pieces={len(self.graph.pieces)}",
               "matrix_bundle": lambda: f"k={len(self.matrices)}",
               "ball": lambda: f"kappa={self.kappa}"}[self.kind]()
        return f"HomogMap({self.kind}, {self.dim_in}->{self.dim_out}, {tag})"


@dataclass(frozen=True)
class Inflation:
    """(T + delta)(w) := T(w) + delta*|w|*B, the uniform slack device."""

    base: object
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @property
    def dim_in(self):
        return self.base.dim_in

    @property
    def dim_out(self):
        return self.base.dim_out

    @property
    def total_delta(self):
        d, b = self.delta, self.base
        while isinstance(b, Inflation):
            d += b.delta
            b = b.base
        return d


def inflate(T, delta):
    return Inflation(T, float(delta))


def eval_map(T, w, level=None):
    """Evaluate a HomogMap or Inflation at w, returning a Region."""
    if isinstance(T, Inflation):
        w = geom.as_point(w, T.dim_in)
        base = eval_map(T.base, w, level)
        r = T.delta * float(np.linalg.norm(w))
        if r <= 0:
            return base
        lvl = level if level is not None else getattr(T.base, "level", 8)
        return geom.minkowski_sum(
            base, geom.ball_region(np.zeros(T.dim_out), r, level=lvl))
    w = geom.as_point(w, T.dim_in)
    if T.kind == "matrix_bundle":
        pts = np.array([M @ w for M in T.matrices])
        return Region.from_polyhedron(Polyhedron.from_vrep(pts))
    if T.kind == "ball":
        r = T.kappa * float(np.linalg.norm(w))
        if r <= 0:
            return Region.point(np.zeros(T.dim_out))
        return geom.ball_region(np.zeros(T.dim_out), r,
                                level=level if level is not None else T.level)
    n = T.dim_in
    return T.graph.slice(range(n), w)


def graph_sample_points(T, rng, count=50):
    """Random (w, y) pairs sampled from the cone-graph pieces (tests)."""
    G = to_cone_graph(T).graph
    out = []
    pieces = G.pieces
    for _ in range(count):
        p = pieces[rng.integers(len(pieces))]
        V, R = p.vrep
        lam = rng.random(len(V))
        lam = lam / lam.sum() if lam.sum() > 0 else lam
        x = lam @ V
        if len(R):
            x = x + np.abs(rng.standard_normal(len(R))) @ R
        out.append(x)
    return np.array(out)


def to_cone_graph(T):
    """Exact cone-graph form; refuses cases that are not polyhedral.

    Bundles: exact for a single matrix (any dims) and for dim_in == 1.
    Balls: exact for dim_in == 1 and dim_out == 1; for dim_in == 1 and
    dim_out >= 2 the output ball is the circumscribed polyball (recorded
    over-approximation).  Anything else raises UnsupportedDimension.
    """
    if isinstance(T, Inflation):
        raise ValueError("inflations are evaluated, not converted")
    if T.kind == "cone_graph":
        return T
    n, m = T.dim_in, T.dim_out
    if T.kind == "matrix_bundle":
        if len(T.matrices) == 1:
            A = T.matrices[0]
            rays = []
            for i in range(n):
                e = np.zeros(n)
                e[i] = 1.0
                rays.append(np.concatenate([e, A @ e]))
                rays.append(-rays[-1])
            return HomogMap.from_rays(rays, n, m)
        if n == 1:
            cols = [M[:, 0] for M in T.matrices]
            pos = [np.concatenate([[1.0], c]) for c in cols]
            neg = [np.concatenate([[-1.0], -c]) for c in cols]
            pieces = [
                Polyhedron(1 + m, vrep=(np.zeros((1, 1 + m)), np.array(pos))),
                Polyhedron(1 + m, vrep=(np.zeros((1, 1 + m)), np.array(neg))),
            ]
            return HomogMap.cone_graph(Region(1 + m, pieces), n, m)
        raise UnsupportedDimension(
            "multi-matrix bundle graphs are not polyhedral for dim_in >= 2")
    # ball map
    if n != 1:
        raise UnsupportedDimension("ball graphs are not polyhedral for dim_in >= 2")
    B, _ = geom.unit_polyball(m, T.level)
    Ab, bb = B.hrep
    pieces = []
    for sgn in (1.0, -1.0):
        # |y| <= kappa * sgn * w  and  sgn * w >= 0
        A = np.hstack([(-T.kappa * bb * sgn)[:, None], Ab])
        A = np.vstack([A, np.concatenate([[-sgn], np.zeros(m)])])
        pieces.append(Polyhedron(1 + m, hrep=(A, np.zeros(len(A)))))
    return HomogMap.cone_graph(Region(1 + m, pieces), n, m)


def _transform_graph(T, sign_in, sign_out):
    G = to_cone_graph(T)
    n, m = G.dim_in, G.dim_out
    M = np.diag(np.concatenate([np.full(n, sign_in), np.full(m, sign_out)]))
    return HomogMap.cone_graph(G.graph.linear_image(M), n, m)


def reflect(T):
    """The map w |-> -T(-w); linear bundles and balls are unchanged."""
    if T.kind in ("matrix_bundle", "ball"):
        return T
    return _transform_graph(T, -1.0, -1.0)


def neg_input(T):
    """The map T(-.) : w |-> T(-w)."""
    if T.kind == "ball":
        return T
    if T.kind == "matrix_bundle":
        return HomogMap.matrix_bundle([-M for M in T.matrices])
    return _transform_graph(T, -1.0, 1.0)


def outer_norm(T, level=8):
    """Outer norm |T|+ = sup_{|w|<=1} sup_{y in T(w)} |y| (may be +inf).

    Finite values force T(0) = {0}; the zero slice is computed exactly, not
    read off generating rays.  Cone-graph values use the circumscribed
    polyhedral w-ball (exact for dim_in == 1, slight over-estimate otherwise).
    """
    if isinstance(T, Inflation):
        base = outer_norm(T.base, level)
        return base + T.delta if math.isfinite(base) else math.inf
    if T.kind == "ball":
        return T.kappa
    if T.kind == "matrix_bundle":
        return max(float(np.linalg.norm(M, 2)) for M in T.matrices)
    n, m = T.dim_in, T.dim_out
    T0 = eval_map(T, np.zeros(n))
    if not T0.is_empty:
        for p in T0.pieces:
            V, R = p.vrep
            if len(R) or float(np.max(np.abs(V))) > 1e-7:
                return math.inf
    Bw, _ = geom.unit_polyball(n, level)
    Aw, bw = Bw.hrep
    best = 0.0
    for p in T.graph.pieces:
        A, b = p.hrep
        rows = np.hstack([Aw, np.zeros((len(Aw), m))])
        Q = Polyhedron(n + m, hrep=(np.vstack([A, rows]),
                                    np.concatenate([b, bw])))
        V, R = Q.vrep
        if len(R):  # recession must stem from w=0 fibers: T(0) != {0}
            if np.max(np.linalg.norm(R[:, n:], axis=1)) > 1e-7:
                return math.inf
        if len(V):
            best = max(best, float(np.max(np.linalg.norm(V[:, n:], axis=1))))
    return best


def lip_at_zero(T, n_dirs=16, seed=0):
    """Estimated Lipschitz modulus of T at 0 (exact for bundles and balls)."""
    if isinstance(T, Inflation):
        return lip_at_zero(T.base, n_dirs, seed) + T.delta
    if T.kind == "ball":
        return T.kappa
    if T.kind == "matrix_bundle":
        return max(float(np.linalg.norm(M, 2)) for M in T.matrices)
    dirs = unit_directions(T.dim_in, n_dirs, seed)
    ws = np.vstack([dirs, 0.5 * dirs])
    evs = [eval_map(T, w) for w in ws]
    best = 0.0
    for i in range(len(ws)):
        if evs[i].is_empty:
            continue
        pts = evs[i].sample_points(per_edge=1) if evs[i].is_bounded else None
        for j in range(len(ws)):
            if i == j or evs[j].is_empty:
                continue
            gap = float(np.linalg.norm(ws[i] - ws[j]))
            if gap < 1e-9:
                continue
            if pts is None:
                return math.inf
            exc = float(np.max(evs[j].dist(pts)))
            best = max(best, exc / gap)
    return best


def compose(T2, T1):
    """The composition T2 o T1; graphs are composed by lifted projection."""
    if T1.dim_out != T2.dim_in:
        raise DimensionMismatch("compose: inner dims differ")
    if T1.kind == "matrix_bundle" and T2.kind == "matrix_bundle":
        mats = []
        for A in T1.matrices:
            for B in T2.matrices:
                mats.append(B @ A)
        return HomogMap.matrix_bundle(mats)
    if T1.kind == "ball" and T2.kind == "ball":
        return HomogMap.ball(T1.kappa * T2.kappa, T1.dim_in, T2.dim_out)
    G1 = to_cone_graph(T1)
    G2 = to_cone_graph(T2)
    n, m, p = G1.dim_in, G1.dim_out, G2.dim_out
    if n + m + p > geom.MAX_DIM:
        raise UnsupportedDimension(f"lifted composition dim {n + m + p} > {geom.MAX_DIM}")
    if len(G1.graph.pieces) * len(G2.graph.pieces) > _COMPOSE_PIECE_BUDGET:
        raise ComplexityBudgetExceeded("composition piece budget")
    pieces = []
    for P1 in G1.graph.pieces:
        A1, b1 = P1.hrep
        for P2 in G2.graph.pieces:
            A2, b2 = P2.hrep
            rows1 = np.hstack([A1, np.zeros((len(A1), p))])
            rows2 = np.hstack([np.zeros((len(A2), n)), A2])
            Q = Polyhedron(n + m + p, hrep=(np.vstack([rows1, rows2]),
                                            np.concatenate([b1, b2])))
            pieces.append(Q.project(list(range(n)) + list(range(n + m, n + m + p))))
    return HomogMap.cone_graph(Region(n + p, pieces), n, p)


def sum_maps(Ts):
    """Pointwise Minkowski sum of maps with matching dimensions."""
    Ts = list(Ts)
    if not Ts:
        raise ValueError("empty sum")
    n, m = Ts[0].dim_in, Ts[0].dim_out
    if any(t.dim_in != n or t.dim_out != m for t in Ts):
        raise DimensionMismatch("sum: dims differ")
    if len(Ts) == 1:
        return Ts[0]
    if all(t.kind == "matrix_bundle" for t in Ts):
        mats = [np.zeros((m, n))]
        for t in Ts:
            mats = [M + A for M in mats for A in t.matrices]
        return HomogMap.matrix_bundle(mats)
    if all(t.kind == "ball" for t in Ts):
        return HomogMap.ball(sum(t.kappa for t in Ts), n, m)
    out = Ts[0]
    for t in Ts[1:]:
        out = _sum_two(out, t)
    return out


def _sum_two(Ta, Tb):
    n, m = Ta.dim_in, Ta.dim_out
    if n + 2 * m > geom.MAX_DIM:
        raise UnsupportedDimension(f"lifted sum dim {n + 2 * m} > {geom.MAX_DIM}")
    Ga, Gb = to_cone_graph(Ta), to_cone_graph(Tb)
    M = np.zeros((n + m, n + 2 * m))
    M[:n, :n] = np.eye(n)
    M[n:, n:n + m] = np.eye(m)
    M[n:, n + m:] = np.eye(m)
    pieces = []
    for Pa in Ga.graph.pieces:
        Aa, ba = Pa.hrep
        for Pb in Gb.graph.pieces:
            Ab, bb = Pb.hrep
            rows_a = np.hstack([Aa[:, :n], Aa[:, n:], np.zeros((len(Aa), m))])
            rows_b = np.hstack([Ab[:, :n], np.zeros((len(Ab), m)), Ab[:, n:]])
            Q = Polyhedron(n + 2 * m, hrep=(np.vstack([rows_a, rows_b]),
                                            np.concatenate([ba, bb])))
            pieces.append(Q.linear_image(M))
    return HomogMap.cone_graph(Region(n + m, pieces), n, m)


def union_maps(Ts):
    """Pointwise union, realized by cone-graph piece concatenation."""
    Ts = list(Ts)
    if not Ts:
        raise ValueError("empty union")
    n, m = Ts[0].dim_in, Ts[0].dim_out
    if any(t.dim_in != n or t.dim_out != m for t in Ts):
        raise DimensionMismatch("union: dims differ")
    pieces = []
    for t in Ts:
        pieces.extend(to_cone_graph(t).graph.pieces)
    return HomogMap.cone_graph(Region(n + m, pieces), n, m)


def intersect_maps(T1, T2):
    """Pointwise intersection (graph intersection); values may be empty."""
    G1, G2 = to_cone_graph(T1), to_cone_graph(T2)
    if (G1.dim_in, G1.dim_out) != (G2.dim_in, G2.dim_out):
        raise DimensionMismatch("intersection: dims differ")
    return HomogMap.cone_graph(G1.graph.intersect(G2.graph), G1.dim_in, G1.dim_out)


@dataclass(frozen=True)
class ContainmentCheck:
    """Outcome of a sampled eval-based containment test T_small ⊆ T_big."""

    holds: bool
    n_dirs: int
    witness_dir: np.ndarray | None = None
    witness_point: np.ndarray | None = None


def contains(T_big, T_small, n_dirs=32, seed=0, tol=1e-7):
    """Check eval(T_small, w) ⊆ eval(T_big, w) on unit directions w."""
    if (T_big.dim_in, T_big.dim_out) != (T_small.dim_in, T_small.dim_out):
        raise DimensionMismatch("containment: dims differ")
    for w in unit_directions(T_big.dim_in, n_dirs, seed):
        Es = eval_map(T_small, w)
        if Es.is_empty:
            continue
        Eb = eval_map(T_big, w)
        if Eb.is_empty:
            return ContainmentCheck(False, n_dirs, w, None)
        pts = [Es.vertices_all()]
        for piece in Es.pieces:
            V, R = piece.vrep
            for r in R:
                base = V[0]
                pts.append(np.array([base + t * r for t in (1.0, 1e3)]))
        pts = np.vstack(pts)
        d = Eb.dist(pts)
        scale = 1.0 + np.linalg.norm(pts, axis=1)
        bad = d > tol * scale
        if np.any(bad):
            return ContainmentCheck(False, n_dirs, w, pts[int(np.argmax(d / scale))])
    return ContainmentCheck(True, n_dirs)

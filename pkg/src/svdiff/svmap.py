"""Set-valued map backends S : R^n => R^m.

Maps are either exact piecewise-polyhedral graphs (a geom.Region in R^{n+m})
or sampled closed-form oracles over a mandatory domain box.  Oracles must be
pure functions of (x, resolution); curved value sets are discretized into
polyline regions at the declared resolution, which every downstream
certificate reports as part of its slack budget.

Also provides the sampled outer/inner limit probes of the standard limit
definitions and the semicontinuity diagnostics built on them.  Verdicts are
"at resolution": evidence, never proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geom
from .errors import (
    DimensionMismatch,
    NotOnGraph,
    OracleNotInvertible,
    OutsideDomain,
    UnsupportedDimension,
)
from .geom import Ball, Polyhedron, Region


class SVMap:
    """A set-valued map with a poly-graph or oracle backend."""

    __slots__ = ("backend", "dim_in", "dim_out", "graph", "oracle", "domain",
                 "resolution", "name", "_cache", "_slack_h")

    def __init__(self, backend, dim_in, dim_out, graph=None, oracle=None,
                 domain=None, resolution=0.0, name=""):
        self.backend = backend
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)
        self.graph = graph
        self.oracle = oracle
        self.domain = domain
        self.resolution = float(resolution)
        self.name = name
        self._cache = {}
        self._slack_h = self.resolution
        if backend == "poly_graph":
            if graph.dim != self.dim_in + self.dim_out:
                raise DimensionMismatch("graph must live in R^(n+m)")
        elif backend == "oracle":
            if oracle is None or domain is None:
                raise ValueError("oracle backend needs an evaluator and a domain box")
            lo, hi = domain
            self.domain = (geom.as_point(lo, dim_in), geom.as_point(hi, dim_in))
        else:
            raise ValueError(f"unknown backend {backend!r}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def poly_graph(cls, graph, dim_in, dim_out, name=""):
        return cls("poly_graph", dim_in, dim_out, graph=graph, name=name)

    @classmethod
    def from_oracle(cls, fn, dim_in, dim_out, domain, resolution=1e-3, name=""):
        return cls("oracle", dim_in, dim_out, oracle=fn, domain=domain,
                   resolution=resolution, name=name)

    @classmethod
    def linear(cls, A, name=""):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        m, n = A.shape
        rays = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            rays.append(np.concatenate([e, A @ e]))
            rays.append(-rays[-1])
        P = Polyhedron(n + m, vrep=(np.zeros((1, n + m)), np.array(rays)))
        return cls.poly_graph(Region.from_polyhedron(P), n, m, name=name)

    def __repr__(self):
        tag = (f"pieces={len(self.graph.pieces)}" if self.backend == "poly_graph"
               else f"oracle={self.name or 'anon'}@{self.resolution:g}")
        return f"SVMap({self.dim_in}->{self.dim_out}, {tag})"


@dataclass(frozen=True)
class GraphPoint:
    """A pair (x, y) with y in S(x)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", geom.as_point(self.x))
        object.__setattr__(self, "y", geom.as_point(self.y))

    def validate(self, S, tol=1e-6):
        val = eval_map(S, self.x)
        if val.is_empty or geom.dist_point_region(self.y, val) > tol + S.resolution:
            raise NotOnGraph(f"y={self.y} not in S({self.x})")
        return self


def eval_map(S, x):
    """Evaluate S at x, returning a (possibly empty) Region of values."""
    x = geom.as_point(x, S.dim_in)
    key = x.tobytes()
    hit = S._cache.get(key)
    if hit is not None:
        return hit
    if S.backend == "poly_graph":
        val = S.graph.slice(range(S.dim_in), x)
    else:
        lo, hi = S.domain
        pad = 100 * geom.GEOM_TOL
        if np.any(x < lo - pad) or np.any(x > hi + pad):
            raise OutsideDomain(f"x={x} outside the declared domain box")
        val = S.oracle(x, S.resolution)
        if val.dim != S.dim_out:
            raise DimensionMismatch("oracle returned wrong value dimension")
    if len(S._cache) < 200_000:
        S._cache[key] = val
    return val


def invert(S):
    """S^{-1}(y) = {x : y in S(x)}, by swapping the graph blocks."""
    if S.backend != "poly_graph":
        raise OracleNotInvertible("only poly-graph backends invert exactly")
    n, m = S.dim_in, S.dim_out
    M = np.zeros((n + m, n + m))
    M[:m, n:] = np.eye(m)
    M[m:, :n] = np.eye(n)
    return SVMap.poly_graph(S.graph.linear_image(M), m, n,
                            name=f"{S.name}^-1" if S.name else "")


def transform_graph(S, M, dims=None):
    """Image of gph(S) under the linear map M (exact on V-representations)."""
    if S.backend != "poly_graph":
        raise OracleNotInvertible("graph transforms need a poly-graph backend")
    M = np.asarray(M, dtype=float)
    new_graph = S.graph.linear_image(M)
    n, m = dims if dims is not None else (S.dim_in, S.dim_out)
    return SVMap.poly_graph(new_graph, n, m)


def compose_graphs(G, F):
    """Poly-graph of G o F via lifted intersection and projection."""
    if F.backend != "poly_graph" or G.backend != "poly_graph":
        raise OracleNotInvertible("graph composition needs poly-graph backends")
    if F.dim_out != G.dim_in:
        raise DimensionMismatch("compose: inner dims differ")
    n, m, p = F.dim_in, F.dim_out, G.dim_out
    if n + m + p > geom.MAX_DIM:
        raise UnsupportedDimension(f"lifted composition dim {n + m + p}")
    pieces = []
    for P1 in F.graph.pieces:
        A1, b1 = P1.hrep
        for P2 in G.graph.pieces:
            A2, b2 = P2.hrep
            rows1 = np.hstack([A1, np.zeros((len(A1), p))])
            rows2 = np.hstack([np.zeros((len(A2), n)), A2])
            Q = Polyhedron(n + m + p, hrep=(np.vstack([rows1, rows2]),
                                            np.concatenate([b1, b2])))
            pieces.append(Q.project(list(range(n)) + list(range(n + m, n + m + p))))
    return SVMap.poly_graph(Region(n + p, pieces), n, p)


def sum_graphs(maps):
    """Poly-graph of x |-> S_1(x) + ... + S_k(x) (pointwise Minkowski sum)."""
    maps = list(maps)
    n, m = maps[0].dim_in, maps[0].dim_out
    if any(S.dim_in != n or S.dim_out != m for S in maps):
        raise DimensionMismatch("sum: dims differ")
    out = maps[0]
    for S in maps[1:]:
        if n + 2 * m > geom.MAX_DIM:
            raise UnsupportedDimension(f"lifted sum dim {n + 2 * m}")
        M = np.zeros((n + m, n + 2 * m))
        M[:n, :n] = np.eye(n)
        M[n:, n:n + m] = np.eye(m)
        M[n:, n + m:] = np.eye(m)
        pieces = []
        for Pa in out.graph.pieces:
            Aa, ba = Pa.hrep
            for Pb in S.graph.pieces:
                Ab, bb = Pb.hrep
                rows_a = np.hstack([Aa[:, :n], Aa[:, n:], np.zeros((len(Aa), m))])
                rows_b = np.hstack([Ab[:, :n], np.zeros((len(Ab), m)), Ab[:, n:]])
                Q = Polyhedron(n + 2 * m, hrep=(np.vstack([rows_a, rows_b]),
                                                np.concatenate([ba, bb])))
                pieces.append(Q.linear_image(M))
        out = SVMap.poly_graph(Region(n + m, pieces), n, m)
    return out


def pl_graph(knots_x, knots_y, left_slope=None, right_slope=None, name=""):
    """Poly-graph of a piecewise-linear single-valued map on R.

    Knots must be sorted; missing end slopes truncate the domain there.
    """
    kx = np.asarray(knots_x, dtype=float)
    ky = np.asarray(knots_y, dtype=float)
    pieces = []
    for i in range(len(kx) - 1):
        pieces.append(Polyhedron.from_vrep([[kx[i], ky[i]], [kx[i + 1], ky[i + 1]]]))
    if left_slope is not None:
        pieces.append(Polyhedron.from_vrep([[kx[0], ky[0]]],
                                           [[-1.0, -left_slope]]))
    if right_slope is not None:
        pieces.append(Polyhedron.from_vrep([[kx[-1], ky[-1]]],
                                           [[1.0, right_slope]]))
    return SVMap.poly_graph(Region(2, pieces), 1, 1, name=name)


# -- oracle gallery ----------------------------------------------------------

def _sqrt_hook_value(x, h):
    """Example value set: sqrt-curve up to |x| plus a vertical half-line."""
    x = float(x[0])
    s_end = math.sqrt(abs(x))
    sgn = 1.0 if x >= 0 else -1.0
    pieces = []
    if s_end > 0:
        ds = max(math.sqrt(4.0 * h), 1e-6)
        ss = np.arange(0.0, s_end, ds)
        ss = np.append(ss, s_end)
        pts = np.stack([sgn * ss ** 2, ss], axis=1)
        for i in range(len(pts) - 1):
            pieces.append(Polyhedron.from_vrep(pts[i:i + 2]))
    pieces.append(Polyhedron.from_vrep([[x, s_end]], [[0.0, 1.0]]))
    return Region(2, pieces)


def _ray_rotation_value(x, h):
    th = float(x[0])
    return Region.from_polyhedron(
        Polyhedron.from_vrep([[0.0, 0.0]], [[math.cos(th), math.sin(th)]]))


def _sign_jump_value(x, h):
    x = float(x[0])
    if abs(x) <= 1e-12:
        return Region.points([[-1.0], [1.0]])
    return Region.point([math.copysign(1.0, x)])


def _cube_root_value(x, h):
    x = float(x[0])
    return Region.point([math.copysign(abs(x) ** (1.0 / 3.0), x)])


def _parabola_value(x, h):
    return Region.point([float(x[0]) ** 2])


def _osc_square_value(x, h):
    x = float(x[0])
    y = 0.0 if x == 0.0 else x * x * math.sin(x ** -2)
    return Region.point([y])


ORACLES = {
    "sqrt_hook": dict(fn=_sqrt_hook_value, dim_in=1, dim_out=2,
                      domain=([-1.0], [1.0]), exact=False),
    "ray_rotation": dict(fn=_ray_rotation_value, dim_in=1, dim_out=2,
                         domain=([-10.0], [10.0]), exact=True),
    "sign_jump": dict(fn=_sign_jump_value, dim_in=1, dim_out=1,
                      domain=([-2.0], [2.0]), exact=True),
    "cube_root": dict(fn=_cube_root_value, dim_in=1, dim_out=1,
                      domain=([-2.0], [2.0]), exact=True),
    "parabola": dict(fn=_parabola_value, dim_in=1, dim_out=1,
                     domain=([-3.0], [3.0]), exact=True),
    "osc_square": dict(fn=_osc_square_value, dim_in=1, dim_out=1,
                       domain=([-2.0], [2.0]), exact=True),
}


def oracle(name, resolution=1e-3, domain=None, **params):
    """Instantiate a gallery oracle by its fixed identifier.

    Oracles whose value sets are exactly polyhedral carry resolution 0 in
    the slack budget; `resolution` only discretizes genuinely curved sets.
    """
    spec = ORACLES[name]
    fn = spec["fn"]
    if params:
        fn = lambda x, h, _f=spec["fn"], _p=params: _f(x, h, **_p)
    slack_h = 0.0 if spec.get("exact", False) else resolution
    S = SVMap.from_oracle(fn, spec["dim_in"], spec["dim_out"],
                          domain or spec["domain"], resolution, name=name)
    S.resolution = resolution
    S._slack_h = slack_h
    return S


def register_oracle(name, fn, dim_in, dim_out, domain, exact=False):
    """Register a user oracle; fn(x, resolution) must be pure and return a Region."""
    ORACLES[name] = dict(fn=fn, dim_in=dim_in, dim_out=dim_out, domain=domain,
                         exact=exact)


def slack_resolution(S):
    """The oracle-resolution term entering certificate slacks."""
    return getattr(S, "_slack_h", S.resolution)


# -- limit probes and semicontinuity diagnostics -----------------------------

def _probe_xs(S, xbar, radius, n_dirs=8, seed=0):
    from .homog import unit_directions
    dirs = unit_directions(S.dim_in, max(n_dirs, 2 * S.dim_in), seed)
    xs = [xbar + radius * d for d in dirs]
    if S.backend == "oracle":
        lo, hi = S.domain
        xs = [x for x in xs if np.all(x >= lo) and np.all(x <= hi)]
    return xs


def limit_probe(S, xbar, radii=(1e-1, 1e-2, 1e-3), truncation=None,
                n_dirs=8, seed=0, slope_budget=None):
    """Sampled outer/inner limit estimates of S at xbar along a radius ladder.

    Returns (outer_est, inner_est, record): point-cloud Regions of candidate
    cluster values, plus the ladder and tolerances used.
    """
    xbar = geom.as_point(xbar, S.dim_in)
    radii = sorted(radii, reverse=True)
    if truncation is None:
        truncation = Ball(np.zeros(S.dim_out), 10.0)
    if slope_budget is None:
        slope_budget = 10.0 * (1.0 + truncation.radius)
    h = S.resolution
    evals = {}
    cands = []
    for r in radii:
        for x in _probe_xs(S, xbar, r, n_dirs, seed):
            val = eval_map(S, x).truncate(truncation)
            evals.setdefault(r, []).append(val)
            if not val.is_empty:
                cands.append(val.sample_points(per_edge=12, cap=80))
    base = eval_map(S, xbar).truncate(truncation)
    if not base.is_empty:
        cands.append(base.sample_points(per_edge=12, cap=80))
    if not cands:
        empty = Region.empty(S.dim_out)
        return empty, empty, dict(radii=radii, tol_in=h, note="no candidates")
    Y = np.vstack(cands)
    r_min = radii[-1]
    tol_in = 2.0 * h + 1e-7 + 0.02 * slope_budget * r_min
    tol_inner = slope_budget * r_min + 2.0 * h + 1e-7
    last = [v for v in evals.get(r_min, []) if not v.is_empty]
    if last:
        D = np.stack([v.dist(Y) for v in last])       # (n_evals, n_cands)
        outer_mask = D.min(axis=0) <= tol_in
        inner_mask = D.max(axis=0) <= tol_inner
    else:
        outer_mask = inner_mask = np.zeros(len(Y), dtype=bool)
    outer_est = Region.points(Y[outer_mask]) if outer_mask.any() \
        else Region.empty(S.dim_out)
    inner_est = Region.points(Y[inner_mask]) if inner_mask.any() \
        else Region.empty(S.dim_out)
    record = dict(radii=list(radii), tol_in=tol_in, tol_inner=tol_inner,
                  n_candidates=len(Y))
    return outer_est, inner_est, record


def semicontinuity_report(S, xbar, truncation=None, radii=(1e-1, 1e-2, 1e-3),
                          n_dirs=8, seed=0, slope_budget=None):
    """Outer/inner semicontinuity verdicts at xbar, at sampling resolution."""
    xbar = geom.as_point(xbar, S.dim_in)
    if truncation is None:
        truncation = Ball(np.zeros(S.dim_out), 10.0)
    if slope_budget is None:
        slope_budget = 10.0 * (1.0 + truncation.radius)
    outer_est, _, record = limit_probe(S, xbar, radii, truncation, n_dirs,
                                       seed, slope_budget)
    base = eval_map(S, xbar).truncate(truncation)
    r_min = sorted(radii)[0]
    h = S.resolution
    tol = slope_budget * r_min + 3.0 * h + 1e-7
    out = dict(outer="holds at resolution", inner="holds at resolution",
               outer_witness=None, inner_witness=None, tol=tol, record=record)
    if not outer_est.is_empty:
        if base.is_empty:
            out["outer"] = "fails with witness"
            out["outer_witness"] = outer_est.vertices_all()[0]
        else:
            pts = outer_est.vertices_all()
            d = base.dist(pts)
            if np.any(d > tol):
                out["outer"] = "fails with witness"
                out["outer_witness"] = pts[int(np.argmax(d))]
    if not base.is_empty:
        xs = _probe_xs(S, xbar, r_min, n_dirs, seed)
        vals = [eval_map(S, x) for x in xs]
        pts = base.sample_points(per_edge=2, cap=60)
        worst = np.zeros(len(pts))
        for v in vals:
            worst = np.maximum(worst, v.dist(pts) if not v.is_empty
                               else np.inf)
        bad = worst > tol
        if np.any(bad):
            out["inner"] = "fails with witness"
            out["inner_witness"] = pts[int(np.argmax(worst))]
    return out

"""Chain and sum rules as executable derivative-map constructions.

The compact intermediate sets of the rules are represented by finite nets
with a caller-declared resolution, so the assembled map under-approximates
the ideal union; the soundness cross-checks downstream inflate by one ladder
delta to absorb that.  Hypotheses are checked before assembly: outer-norm and
Lipschitz-at-zero bounds must be finite and inner maps must vanish at zero
(HypothesisFailure names the violated condition); the outer-semicontinuity
hypothesis is probed by sampling and reported as a warning, never blocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geom, homog, svmap
from .errors import CoverageGap, HypothesisFailure
from .geom import Region
from .homog import HomogMap, compose, eval_map as eval_T, lip_at_zero, \
    outer_norm, sum_maps, union_maps
from .svmap import eval_map as eval_S, invert


@dataclass(frozen=True)
class NetPoint:
    """One intermediate point y with its attached derivative maps."""

    y: np.ndarray
    T_xy: HomogMap      # derivative of F at xbar for y
    T_yz: HomogMap      # derivative of G at y for zbar

    def __post_init__(self):
        object.__setattr__(self, "y", geom.as_point(self.y))


@dataclass
class ChainInstance:
    F: object           # SVMap X => Y
    G: object           # SVMap Y => Z
    xbar: np.ndarray
    zbar: np.ndarray
    net: list

    def __post_init__(self):
        self.xbar = geom.as_point(self.xbar, self.F.dim_in)
        self.zbar = geom.as_point(self.zbar, self.G.dim_out)

    def validate_net(self, tol=1e-6):
        Fx = eval_S(self.F, self.xbar)
        for p in self.net:
            if geom.dist_point_region(p.y, Fx) > tol + self.F.resolution:
                raise HypothesisFailure(f"net point {p.y} not in F(xbar)")
            Gy = eval_S(self.G, p.y)
            if geom.dist_point_region(self.zbar, Gy) > tol + self.G.resolution:
                raise HypothesisFailure(f"zbar not in G({p.y})")
        return self


def _osc_probe(F, Ginv, xbar, zbar, radius=1e-2, n=6, tol=None):
    """Sampled outer-semicontinuity probe of (x,z) |-> G^{-1}(z) ∩ F(x)."""
    base = eval_S(Ginv, zbar).intersect(eval_S(F, xbar))
    if base.is_empty:
        return dict(ok=False, note="intermediate set empty at (xbar, zbar)")
    tol = tol if tol is not None else 10.0 * radius + 1e-6
    rng = np.random.default_rng(20240303)
    for _ in range(n):
        dx = rng.standard_normal(F.dim_in)
        dz = rng.standard_normal(Ginv.dim_in)
        x = xbar + radius * dx / max(1.0, np.linalg.norm(dx))
        z = zbar + radius * dz / max(1.0, np.linalg.norm(dz))
        val = eval_S(Ginv, z).intersect(eval_S(F, x))
        if val.is_empty:
            continue
        pts = val.sample_points(per_edge=1, cap=20)
        if len(pts) and float(np.max(base.dist(pts))) > tol:
            return dict(ok=False,
                        note=f"outer-sc probe exceeded {tol:g} near {x}")
    return dict(ok=True, note="outer-sc probe passed at sampling resolution")


def hypothesis_report(inst, trunc_radius=50.0):
    """Checks of the chain-rule conditions; raises only on the hard ones."""
    inst.validate_net()
    alphas = [outer_norm(p.T_xy) for p in inst.net]
    alpha = max(alphas) if alphas else math.inf
    if not math.isfinite(alpha):
        raise HypothesisFailure("condition 5: sup |T_xy|+ is infinite")
    betas = []
    for p in inst.net:
        T0 = eval_T(p.T_yz, np.zeros(p.T_yz.dim_in))
        if T0.is_empty:
            raise HypothesisFailure("condition 6: T_yz(0) is empty")
        pts = T0.vertices_all()
        if (not T0.is_bounded) or float(np.max(np.abs(pts))) > 1e-7:
            raise HypothesisFailure("condition 6: T_yz(0) != {0}")
        betas.append(lip_at_zero(p.T_yz))
    beta = max(betas) if betas else math.inf
    if not math.isfinite(beta):
        raise HypothesisFailure("condition 6: sup lip T_yz(0) is infinite")
    ys = np.array([p.y for p in inst.net])
    if float(np.max(np.abs(ys))) > trunc_radius:
        raise HypothesisFailure("condition 3: net is not bounded")
    osc = _osc_probe(inst.F, invert(inst.G), inst.xbar, inst.zbar) \
        if inst.G.backend == "poly_graph" else dict(ok=None, note="skipped")
    return dict(alpha=alpha, beta=beta, osc_warning=None if osc["ok"] else osc,
                n_net=len(inst.net))


def chain_T(inst):
    """T = union over the net of T_yz o T_xy (Thm 5.2's composed map)."""
    report = hypothesis_report(inst)
    composed = [compose(p.T_yz, p.T_xy) for p in inst.net]
    T = composed[0] if len(composed) == 1 else union_maps(composed)
    return T, report


def chain_single(f, T_xy, G, T_yz, xbar, ybar=None, zbar=None):
    """Single-valued chain rule: T = T_yz o T_xy under the Prop-5.3 checks."""
    xbar = geom.as_point(xbar)
    ybar = geom.as_point(f(xbar)) if ybar is None else geom.as_point(ybar)
    a = outer_norm(T_xy)
    if not math.isfinite(a):
        raise HypothesisFailure("condition 3: |T_xy|+ is infinite")
    T0 = eval_T(T_yz, np.zeros(T_yz.dim_in))
    pts = T0.vertices_all() if not T0.is_empty else np.zeros((0, T_yz.dim_out))
    if T0.is_empty or (not T0.is_bounded) or float(np.max(np.abs(pts))) > 1e-7:
        raise HypothesisFailure("condition 4: T_yz(0) != {0}")
    b = lip_at_zero(T_yz)
    if not math.isfinite(b):
        raise HypothesisFailure("condition 4: lip T_yz(0) is infinite")
    return compose(T_yz, T_xy), dict(alpha=a, beta=b)


@dataclass(frozen=True)
class SumDecomposition:
    """One decomposition ybar = y_1 + ... + y_p with attached maps T^i."""

    ys: tuple
    Ts: tuple

    def __post_init__(self):
        object.__setattr__(self, "ys",
                           tuple(geom.as_point(y) for y in self.ys))
        object.__setattr__(self, "Ts", tuple(self.Ts))


def sum_T(Ss, xbar, ybar, net, resolution=None):
    """T = union over the decomposition net of (sum_i T^i) (Cor 5.4).

    For two summands the decomposition set is computed exactly and the net
    must cover it within `resolution` (default: the largest pairwise net
    spacing); a gap raises CoverageGap.
    """
    Ss = list(Ss)
    xbar = geom.as_point(xbar, Ss[0].dim_in)
    ybar = geom.as_point(ybar, Ss[0].dim_out)
    if not net:
        raise CoverageGap("empty decomposition net")
    for dec in net:
        if len(dec.ys) != len(Ss):
            raise CoverageGap("decomposition arity mismatch")
        if float(np.linalg.norm(sum(dec.ys) - ybar)) > 1e-6:
            raise CoverageGap(f"decomposition {dec.ys} does not sum to ybar")
        for S, y in zip(Ss, dec.ys):
            if geom.dist_point_region(y, eval_S(S, xbar)) > 1e-6 + S.resolution:
                raise HypothesisFailure(f"component {y} not in S_i(xbar)")
        for T in dec.Ts:
            if not math.isfinite(outer_norm(T)):
                raise HypothesisFailure("condition 4: some |T^i|+ is infinite")
    if len(Ss) == 2:
        # exact coverage check: y1 ranges over S1(xbar) ∩ (ybar - S2(xbar))
        D1 = eval_S(Ss[0], xbar).intersect(
            eval_S(Ss[1], xbar).negate().translate(ybar))
        if not D1.is_empty:
            if not D1.is_bounded:
                raise HypothesisFailure("condition 2: decomposition set unbounded")
            pts = D1.sample_points(per_edge=2, cap=60)
            net_y1 = np.array([dec.ys[0] for dec in net])
            if resolution is None:
                if len(net_y1) > 1:
                    gaps = [np.min(np.linalg.norm(net_y1 - y, axis=1) +
                                   np.where(np.all(net_y1 == y, axis=1), np.inf, 0.0))
                            for y in net_y1]
                    resolution = 1.5 * float(max(gaps))
                else:
                    resolution = 0.3
            for y in pts:
                if float(np.min(np.linalg.norm(net_y1 - y, axis=1))) > resolution:
                    raise CoverageGap(
                        f"decomposition {y} uncovered at resolution {resolution:g}")
    sums = [sum_maps(list(dec.Ts)) for dec in net]
    return sums[0] if len(sums) == 1 else union_maps(sums)

"""Deriving strict differentiability from pointwise outer certificates, and
the lip-equals-limsup-of-clm identities.

strict_from_outer runs the hypothesis probes of the strictness-transfer
theorem (finite outer norm, convex-valued T, inner-semicontinuity of S, and
pseudo outer (T+delta)-certificates on a net of nearby graph points), then
compares the predicted strict verdict against an independent measurement;
a mismatch is reported as inconclusive with diagnostics, never silently
overridden.  Two probe modes are exposed: the default includes the base
point in the net; "exclude_center" drops it and instead requires the
outer-semicontinuity probe at xbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import certify as _certify
from . import geom, homog, svmap
from .certify import CertConfig, Certificate, attach_point
from .errors import HypothesisFailure, NotOnGraph
from .geom import Ball, Region
from .homog import HomogMap, eval_map as eval_T, inflate, outer_norm
from .svmap import eval_map as eval_S


def _convex_valued_probe(T, n_dirs=12, seed=0, tol=1e-7):
    """Midpoint test of convex-valuedness on sphere directions."""
    from .homog import unit_directions
    for w in unit_directions(T.dim_in, n_dirs, seed):
        E = eval_T(T, w)
        if E.is_empty or len(E.pieces) == 1:
            continue
        pts = E.vertices_all()
        rng = np.random.default_rng(seed + 1)
        k = min(len(pts), 8)
        idx = rng.permutation(len(pts))[:k]
        for i in idx:
            for j in idx:
                mid = 0.5 * (pts[i] + pts[j])
                if float(E.dist(mid.reshape(1, -1))[0]) > tol * (1 + np.abs(mid).max()):
                    return False, w, mid
    return True, None, None


def _graph_net(S, xbar, ybar, cfg, n_x=5, exclude_center=False):
    """Nearby graph points (x, y) with y in S(x) close to ybar."""
    r = cfg.radius_ladder[-1]
    xs = np.linspace(-r, r, n_x)
    net = []
    for t in xs:
        if S.dim_in != 1:
            break
        x = xbar + np.array([t])
        val = eval_S(S, x)
        if val.is_empty:
            continue
        W = Region.from_polyhedron(
            geom.ball_polyhedron(ybar, max(3 * r, 1e-2), level=cfg.ball_level))
        loc = val.intersect(W)
        pts = loc.sample_points(per_edge=1, cap=4) if not loc.is_empty else []
        for y in pts:
            if exclude_center and np.linalg.norm(x - xbar) < 1e-12 and \
                    np.linalg.norm(y - ybar) < 1e-12:
                continue
            net.append((x, y))
    if S.dim_in != 1:
        rng = np.random.default_rng(cfg.seed + 5)
        for _ in range(2 * n_x):
            x = xbar + r * rng.uniform(-1, 1, S.dim_in)
            val = eval_S(S, x)
            if val.is_empty:
                continue
            y = val.sample_points(per_edge=0, cap=2)
            for yy in y:
                net.append((x, yy))
    if not exclude_center:
        net.append((xbar, ybar))
    return net


def strict_from_outer(S, T, xbar, ybar, cfg=None, net=None,
                      mode="include_center"):
    """Predict pseudo strict T-differentiability from pseudo outer
    (T+delta)-certificates on a net, then verify the prediction.

    Returns a dict with the hypothesis probes, the per-point outer
    certificates, the predicted verdict and the measured certificate; the
    top-level verdict is inconclusive when prediction and measurement
    disagree.
    """
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    ybar = geom.as_point(ybar, S.dim_out)
    kappa = outer_norm(T)
    if not math.isfinite(kappa):
        raise HypothesisFailure("|T|+ is infinite")
    ok, wdir, wmid = _convex_valued_probe(T, seed=cfg.seed)
    if not ok:
        raise HypothesisFailure(
            f"T is not convex-valued at direction {wdir} (midpoint {wmid})")
    exclude = (mode == "exclude_center")
    sc = svmap.semicontinuity_report(
        S, xbar, truncation=cfg.truncation or Ball(np.zeros(S.dim_out), 10.0),
        radii=tuple(cfg.radius_ladder), seed=cfg.seed)
    if sc["inner"] != "holds at resolution":
        raise HypothesisFailure(
            f"inner-semicontinuity probe failed: witness {sc['inner_witness']}")
    if exclude and sc["outer"] != "holds at resolution":
        raise HypothesisFailure(
            f"outer-semicontinuity probe failed: witness {sc['outer_witness']}")
    if net is None:
        net = _graph_net(S, xbar, ybar, cfg, exclude_center=exclude)
    light = CertConfig(delta_ladder=(cfg.delta_ladder[0], cfg.delta_ladder[-1]),
                       radius_ladder=cfg.radius_ladder,
                       grid_per_axis=max(7, cfg.grid_per_axis // 2),
                       truncation=cfg.truncation, seed=cfg.seed,
                       jobs=cfg.jobs, point_cap=max(16, cfg.point_cap // 2),
                       pair_cap=cfg.pair_cap, per_edge=2,
                       ball_level=cfg.ball_level)
    delta0 = cfg.delta_ladder[-1]
    outer_certs = []
    for x, y in net:
        cert = _certify.certify_pseudo(S, inflate(T, delta0), x, y,
                                       "pseudoOuterT", light)
        outer_certs.append(attach_point(cert, x, y))
        if cert.verdict == "refuted":
            raise HypothesisFailure(
                f"pseudo outer (T+delta)-certificate refuted at ({x}, {y})")
    predicted = "verified_at_scale"
    measured = _certify.certify_pseudo(S, T, xbar, ybar, "pseudoStrictT", cfg)
    verdict = measured.verdict if measured.verdict == predicted else "inconclusive"
    return dict(verdict=verdict, predicted=predicted, measured=measured,
                outer_certificates=outer_certs,
                probes=dict(outer_norm=kappa, convex_valued=True,
                            semicontinuity=sc, mode=mode,
                            net=[(list(x), list(y)) for x, y in net]))


def lip_equals_limsup_clm(S, xbar, ybar, cfg=None, net_radius=None, n_net=6):
    """Estimate lip S(xbar|ybar) and the sup of clm S(x|y) over nearby graph
    points excluding the center; report both and the gap.

    The one-sided inequality lip >= sup clm holds up to tolerance on every
    instance; equality is only asserted when the inner-semicontinuity probe
    passes (the identity's hypothesis).
    """
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    ybar = geom.as_point(ybar, S.dim_out)
    base = eval_S(S, xbar)
    if base.is_empty or geom.dist_point_region(ybar, base) > 1e-6 + S.resolution:
        raise NotOnGraph("ybar not in S(xbar)")
    lip_est = _certify.estimate_lip(S, xbar, ybar, cfg)
    r = net_radius if net_radius is not None else cfg.radius_ladder[-1]
    net = [(x, y) for x, y in _graph_net(S, xbar, ybar, cfg, n_x=n_net,
                                         exclude_center=True)
           if np.linalg.norm(x - xbar) > 1e-12 or
           np.linalg.norm(y - ybar) > 1e-12]
    clms = []
    for x, y in net:
        try:
            clms.append(_certify.estimate_clm(S, x, y, cfg).value)
        except NotOnGraph:
            continue
    clm_sup = max(clms) if clms else 0.0
    sc = svmap.semicontinuity_report(
        S, xbar, truncation=cfg.truncation or Ball(np.zeros(S.dim_out), 10.0),
        radii=tuple(cfg.radius_ladder), seed=cfg.seed)
    gap = (lip_est.value - clm_sup
           if math.isfinite(lip_est.value) and math.isfinite(clm_sup)
           else (0.0 if lip_est.value == clm_sup else math.inf))
    return dict(lip_est=lip_est.value, clm_sup_est=clm_sup, gap=gap,
                inner_semicontinuous=(sc["inner"] == "holds at resolution"),
                net_radius=r, per_point=clms,
                lip_ladder=list(lip_est.ladder))

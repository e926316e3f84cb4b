"""Epsilon-delta certifiers and refuters for T-differentiability notions.

A certifier cannot prove a "for all delta, exists neighborhood" statement;
verdicts are explicitly at scale, with the full configuration echoed into the
certificate.  Refutations are genuine counterexamples modulo the geometric
slack (the witness must violate the defining inclusion by more than three
times that slack and must persist when the grid is refined); verifications
are evidence, not proof.

Membership in S(x') + T(x-x') + delta*|x-x'|*B is tested exactly as
dist(point, S(x') + T(x-x')) <= delta*|x-x'| + slack, so the delta-ball never
needs polyhedralization.  The slack budget is
    slack = delta*|x-x'|  +  10*GEOM_TOL  +  oracle resolution h,
reported term by term.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import geom, homog, svmap
from .errors import (
    CoverageGap,
    DimensionMismatch,
    EvaluationFailure,
    NotOnGraph,
)
from .geom import GEOM_TOL, Ball, Region
from .homog import HomogMap, Inflation, eval_map as eval_T
from .svmap import eval_map as eval_S

NOTIONS = ("outerT", "innerT", "T", "strictT",
           "pseudoOuterT", "pseudoInnerT", "pseudoT", "pseudoStrictT",
           "calm", "aubin", "singleT", "singleStrictT")


@dataclass(frozen=True)
class CertConfig:
    """Ladders, grid design and truncation for one certification run."""

    delta_ladder: tuple = (1e-1, 3e-2, 1e-2)
    radius_ladder: tuple = (1e-1, 3e-2, 1e-2)
    grid_per_axis: int = 21
    truncation: Ball | None = None
    seed: int = 0
    jobs: int = 1
    point_cap: int = 60
    pair_cap: int = 1600
    per_edge: int = 3
    ball_level: int = 6

    def __post_init__(self):
        for ladder in (self.delta_ladder, self.radius_ladder):
            arr = np.asarray(ladder, dtype=float)
            if np.any(arr <= 0) or np.any(np.diff(arr) >= 0):
                raise ValueError("ladders must be strictly decreasing and positive")

    def echo(self):
        return dict(delta_ladder=list(self.delta_ladder),
                    radius_ladder=list(self.radius_ladder),
                    grid_per_axis=self.grid_per_axis,
                    truncation=(None if self.truncation is None else
                                dict(center=self.truncation.center.tolist(),
                                     radius=self.truncation.radius)),
                    seed=self.seed, jobs=self.jobs,
                    point_cap=self.point_cap, pair_cap=self.pair_cap,
                    per_edge=self.per_edge, ball_level=self.ball_level)


@dataclass(frozen=True)
class Witness:
    """A counterexample pair: the inclusion fails at point y by `violation`."""

    x: np.ndarray
    xprime: np.ndarray | None
    y: np.ndarray
    violation: float


@dataclass
class Certificate:
    notion: str
    verdict: str                     # verified_at_scale | refuted | inconclusive
    witness: Witness | None = None
    scales: dict = field(default_factory=dict)   # per-delta achieved radii
    slack: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    norm: str = "euclidean"
    notes: list = field(default_factory=list)

    @property
    def verified(self):
        return self.verdict == "verified_at_scale"


def _default_truncation(cfg, dim_out):
    if cfg.truncation is not None:
        if len(cfg.truncation.center) != dim_out:
            raise DimensionMismatch("truncation ball dim mismatch")
        return cfg.truncation
    return Ball(np.zeros(dim_out), 10.0)


def ball_grid(center, radius, per_axis, rng, cap):
    """Centered lattice on the radius-ball plus 2*dim jitter points per cell."""
    center = np.asarray(center, dtype=float)
    d = len(center)
    if d == 1:
        base = np.linspace(-radius, radius, per_axis).reshape(-1, 1)
    else:
        k = min(per_axis, max(3, int(round(cap ** (1.0 / d)))))
        axes = [np.linspace(-radius, radius, k)] * d
        base = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        base = base[np.linalg.norm(base, axis=1) <= radius * (1 + 1e-12)]
    cell = 2 * radius / max(per_axis - 1, 1)
    n_jitter = min(2 * d * len(base), max(4, cap // 3))
    jit = rng.uniform(-radius, radius, size=(n_jitter, d))
    jit = jit[np.linalg.norm(jit, axis=1) <= radius]
    pts = np.vstack([base, jit])
    if len(pts) > cap:
        idx = np.linspace(0, len(pts) - 1, cap).astype(int)
        pts = pts[idx]
    return center + pts


def _pairs_from(points, xbar, cap, rng):
    """Ordered pairs for strict checks, anchored pairs first, then sampled."""
    n = len(points)
    items = [(i, -1) for i in range(n)] + [(-1, i) for i in range(n)]
    if n * (n - 1) <= cap:
        items += [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        m = int(math.isqrt(cap))
        idx = rng.permutation(n)
        sub = idx[:m]
        items += [(int(i), int(j)) for i in sub for j in sub if i != j]
    out = []
    for i, j in items:
        xi = xbar if i < 0 else points[i]
        xj = xbar if j < 0 else points[j]
        out.append((xi, xj))
    return out


class _Engine:
    """Shared state for one certification run (caches, slack, windows)."""

    def __init__(self, S, T, cfg, oracle_h, dim_out):
        self.S = S
        self.T = T
        self.cfg = cfg
        self.slack_geom = 10.0 * GEOM_TOL
        self.slack_oracle = float(oracle_h)
        self.trunc = _default_truncation(cfg, dim_out)
        self.trunc_poly = geom.ball_polyhedron(self.trunc.center,
                                               self.trunc.radius,
                                               level=cfg.ball_level)
        self._lhs_cache = {}

    @property
    def slack_const(self):
        return self.slack_geom + self.slack_oracle

    def lhs_points(self, x, window=None, wkey=None):
        key = (np.asarray(x, dtype=float).tobytes(), wkey)
        hit = self._lhs_cache.get(key)
        if hit is not None:
            return hit
        val = eval_S(self.S, x)
        if window is not None:
            val = val.intersect(window)
        elif not val.is_bounded:
            val = val.intersect(Region.from_polyhedron(self.trunc_poly))
        pts = val.sample_points(self.cfg.per_edge) if not val.is_empty else \
            np.zeros((0, self.S.dim_out))
        self._lhs_cache[key] = pts
        return pts

    def check_item(self, item, delta, window=None, wkey=None):
        """One inclusion check; returns worst (excess, y) or None."""
        lhs_x, rhs_x, w, negate = item
        nw = float(np.linalg.norm(w))
        if nw <= 1e-12:
            return None
        pts = self.lhs_points(lhs_x, window, wkey)
        if len(pts) == 0:
            return None
        base = eval_S(self.S, rhs_x)
        Tval = eval_T(self.T, w, level=self.cfg.ball_level)
        if negate:
            Tval = Tval.negate()
        allowance = delta * nw + self.slack_const
        if base.is_empty or Tval.is_empty:
            return (math.inf, pts[0], lhs_x, rhs_x)
        rhs = geom.minkowski_sum(base, Tval)
        d = rhs.dist(pts)
        worst = int(np.argmax(d))
        excess = float(d[worst]) - allowance
        # sub-3x-slack excesses are discretization noise, not counterexamples
        if excess > 3.0 * self.slack_const:
            return (excess, pts[worst], lhs_x, rhs_x)
        return None

    def run_items(self, items, delta, window=None, wkey=None, collect=False):
        """Check items; serial path exits early unless collecting witnesses."""
        worst = None
        if self.cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.jobs) as ex:
                results = list(ex.map(
                    lambda it: self.check_item(it, delta, window, wkey), items))
            for res in results:
                if res and (worst is None or res[0] > worst[0]):
                    worst = res
                    if not collect:
                        break
            return worst
        for it in items:
            res = self.check_item(it, delta, window, wkey)
            if res:
                if worst is None or res[0] > worst[0]:
                    worst = res
                if not collect:
                    return worst
        return worst


def _admissible(slack_const, delta, *radii):
    """A window combo is evidence only if the delta-allowance at the window
    scale dominates the constant slack; otherwise membership is decided by
    numeric/oracle noise rather than by the defining inclusion."""
    return slack_const <= delta * min(radii)


def _items_for(notion, points, xbar):
    items = []
    if notion in ("outerT", "strictT", "T"):
        items += [(x, xbar, x - xbar, False) for x in points]
    if notion in ("innerT", "T"):
        items += [(xbar, x, x - xbar, True) for x in points]
    return items


def _strict_items(points, xbar, cap, rng):
    return [(a, b, a - b, False) for a, b in _pairs_from(points, xbar, cap, rng)]


def _certificate(engine, notion, verdict, witness, scales, cfg, extra_notes=()):
    cert = Certificate(
        notion=notion, verdict=verdict, witness=witness, scales=scales,
        slack=dict(geom=engine.slack_geom, oracle=engine.slack_oracle,
                   delta_term="delta*|x-x'|"),
        config=cfg.echo(), notes=list(extra_notes))
    return cert


def certify_setvalued(S, T, xbar, notion, cfg=None):
    """Certify or refute a non-pseudo differentiability notion for S at xbar."""
    cfg = cfg or CertConfig()
    if notion == "calm":
        if T.kind != "ball":
            raise ValueError("calm certification expects a ball map")
        base_notion, notion_out = "outerT", "calm"
    elif notion in ("outerT", "innerT", "T", "strictT"):
        base_notion, notion_out = notion, notion
    else:
        raise ValueError(f"certify_setvalued cannot handle notion {notion!r}")
    xbar = geom.as_point(xbar, S.dim_in)
    eng = _Engine(S, T, cfg, svmap.slack_resolution(S), S.dim_out)
    scales = {}
    unresolved = []
    for di, delta in enumerate(cfg.delta_ladder):
        radii = [r for r in cfg.radius_ladder
                 if _admissible(eng.slack_const, delta, r)]
        if not radii:
            scales[f"{delta:g}"] = None
            unresolved.append(delta)
            continue
        passed = None
        for ri, r in enumerate(radii):
            rng = np.random.default_rng(cfg.seed * 9973 + di * 101 + ri)
            pts = ball_grid(xbar, r, cfg.grid_per_axis, rng, cfg.point_cap)
            if base_notion == "strictT":
                items = _strict_items(pts, xbar, cfg.pair_cap, rng)
            else:
                items = _items_for(base_notion, pts, xbar)
            if eng.run_items(items, delta) is None:
                passed = r
                break
        if passed is None:
            return _refutation_pass(eng, notion_out, base_notion, xbar, delta,
                                    cfg, scales, refine_radius=radii[-1])
        scales[f"{delta:g}"] = passed
    if unresolved:
        return _certificate(eng, notion_out, "inconclusive", None, scales, cfg,
                            [f"resolution too coarse for delta={d:g}"
                             for d in unresolved])
    return _certificate(eng, notion_out, "verified_at_scale", None, scales, cfg)


def _refutation_pass(eng, notion_out, base_notion, xbar, delta, cfg, scales,
                     refine_radius, pseudo=None):
    """Re-check the smallest admissible window at double grid resolution."""
    r = refine_radius
    rng = np.random.default_rng(cfg.seed * 9973 + 777)
    pts = ball_grid(xbar, r, 2 * cfg.grid_per_axis, rng, 4 * cfg.point_cap)
    window = wkey = None
    if pseudo is not None:
        ybar, rw = pseudo
        window = Region.from_polyhedron(
            geom.ball_polyhedron(ybar, rw, level=cfg.ball_level))
        wkey = ("refine", rw)
    if base_notion in ("strictT", "pseudoStrictT"):
        items = _strict_items(pts, xbar, 4 * cfg.pair_cap, rng)
    else:
        plain = {"pseudoOuterT": "outerT", "pseudoInnerT": "innerT",
                 "pseudoT": "T"}.get(base_notion, base_notion)
        items = _items_for(plain, pts, xbar)
    worst = eng.run_items(items, delta, window, wkey)
    scales[f"{delta:g}"] = None
    if worst is not None and worst[0] > 3.0 * eng.slack_const:
        wit = Witness(x=worst[2], xprime=worst[3], y=worst[1],
                      violation=float(worst[0]))
        return _certificate(eng, notion_out, "refuted", wit, scales, cfg,
                            [f"violation persists at refined radius {r:g}"])
    note = ("violating pairs did not persist at refinement"
            if worst is None else
            f"worst refined violation {worst[0]:.3g} within 3x slack")
    return _certificate(eng, notion_out, "inconclusive", None, scales, cfg, [note])


def certify_pseudo(S, T, xbar, ybar, notion, cfg=None):
    """Certify or refute a pseudo notion at xbar for ybar (joint V/W search)."""
    cfg = cfg or CertConfig()
    if notion == "aubin":
        if T.kind != "ball":
            raise ValueError("aubin certification expects a ball map")
        base_notion, notion_out = "pseudoStrictT", "aubin"
    elif notion in ("pseudoOuterT", "pseudoInnerT", "pseudoT", "pseudoStrictT"):
        base_notion, notion_out = notion, notion
    else:
        raise ValueError(f"certify_pseudo cannot handle notion {notion!r}")
    xbar = geom.as_point(xbar, S.dim_in)
    ybar = geom.as_point(ybar, S.dim_out)
    base_val = eval_S(S, xbar)
    if base_val.is_empty or \
            geom.dist_point_region(ybar, base_val) > 1e-6 + S.resolution:
        raise NotOnGraph(f"ybar={ybar} not in S(xbar) within tolerance")
    eng = _Engine(S, T, cfg, svmap.slack_resolution(S), S.dim_out)
    combos = sorted(
        ((rv, rw) for rv in cfg.radius_ladder for rw in cfg.radius_ladder),
        key=lambda c: -(c[0] + c[1]))
    item_map = {"pseudoOuterT": "outerT", "pseudoInnerT": "innerT",
                "pseudoT": "T"}
    scales = {}
    unresolved = []
    for di, delta in enumerate(cfg.delta_ladder):
        adm = [(rv, rw) for rv, rw in combos
               if _admissible(eng.slack_const, delta, rv, rw)]
        if not adm:
            scales[f"{delta:g}"] = None
            unresolved.append(delta)
            continue
        passed = None
        for ci, (rv, rw) in enumerate(adm):
            rng = np.random.default_rng(cfg.seed * 9973 + di * 101 + ci)
            pts = ball_grid(xbar, rv, cfg.grid_per_axis, rng, cfg.point_cap)
            if base_notion == "pseudoStrictT":
                items = _strict_items(pts, xbar, cfg.pair_cap, rng)
            else:
                items = _items_for(item_map[base_notion], pts, xbar)
            window = Region.from_polyhedron(
                geom.ball_polyhedron(ybar, rw, level=cfg.ball_level))
            if eng.run_items(items, delta, window, ("W", rw)) is None:
                passed = (rv, rw)
                break
        if passed is None:
            return _refutation_pass(eng, notion_out, base_notion, xbar, delta,
                                    cfg, scales, refine_radius=adm[-1][0],
                                    pseudo=(ybar, adm[-1][1]))
        scales[f"{delta:g}"] = list(passed)
    if unresolved:
        return _certificate(eng, notion_out, "inconclusive", None, scales, cfg,
                            [f"resolution too coarse for delta={d:g}"
                             for d in unresolved])
    return _certificate(eng, notion_out, "verified_at_scale", None, scales, cfg)


def certify_single(f, T, xbar, strict=False, cfg=None):
    """Certify or refute (strict) T-differentiability of a single-valued map."""
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar)
    notion = "singleStrictT" if strict else "singleT"

    def fval(x):
        try:
            y = np.atleast_1d(np.asarray(f(x), dtype=float))
        except Exception as exc:        # surfacing grid failures verbatim
            raise EvaluationFailure(f"f failed at {x}: {exc}") from exc
        if not np.all(np.isfinite(y)):
            raise EvaluationFailure(f"f non-finite at {x}")
        return y

    ybar = fval(xbar)
    if T.dim_in != len(xbar) or T.dim_out != len(ybar):
        raise DimensionMismatch("T dims do not match f")
    slack_geom = 10.0 * GEOM_TOL
    fcache = {}

    def fv(x):
        key = x.tobytes()
        if key not in fcache:
            fcache[key] = fval(x)
        return fcache[key]

    def worst_violation(pairs, delta, collect=False):
        worst = None
        for xa, xb in pairs:
            w = xa - xb
            nw = float(np.linalg.norm(w))
            if nw <= 1e-12:
                continue
            Tval = eval_T(T, w, level=cfg.ball_level)
            allowance = delta * nw + slack_geom
            if Tval.is_empty:
                res = (math.inf, fv(xa), xa, xb)
            else:
                d = float(Tval.translate(fv(xb)).dist(fv(xa).reshape(1, -1))[0])
                res = ((d - allowance, fv(xa), xa, xb)
                       if d - allowance > 3.0 * slack_geom else None)
            if res:
                if worst is None or res[0] > worst[0]:
                    worst = res
                if not collect:
                    return worst
        return worst

    scales = {}
    for di, delta in enumerate(cfg.delta_ladder):
        passed = None
        for ri, r in enumerate(cfg.radius_ladder):
            rng = np.random.default_rng(cfg.seed * 9973 + di * 101 + ri)
            pts = ball_grid(xbar, r, cfg.grid_per_axis, rng, cfg.point_cap)
            if strict:
                pairs = _pairs_from(pts, xbar, cfg.pair_cap, rng)
            else:
                pairs = [(x, xbar) for x in pts]
            if worst_violation(pairs, delta) is None:
                passed = r
                break
        if passed is None:
            r = cfg.radius_ladder[-1]
            rng = np.random.default_rng(cfg.seed * 9973 + 777)
            pts = ball_grid(xbar, r, 2 * cfg.grid_per_axis, rng, 4 * cfg.point_cap)
            pairs = (_pairs_from(pts, xbar, 4 * cfg.pair_cap, rng) if strict
                     else [(x, xbar) for x in pts])
            worst = worst_violation(pairs, delta, collect=True)
            scales[f"{delta:g}"] = None
            slack = dict(geom=slack_geom, oracle=0.0, delta_term="delta*|x-x'|")
            if worst is not None and worst[0] > 3.0 * slack_geom:
                wit = Witness(x=worst[2], xprime=worst[3], y=worst[1],
                              violation=float(worst[0]))
                return Certificate(notion, "refuted", wit, scales, slack,
                                   cfg.echo(),
                                   notes=[f"violation persists at radius {r:g}"])
            return Certificate(notion, "inconclusive", None, scales, slack,
                               cfg.echo(), notes=["no persistent violation"])
        scales[f"{delta:g}"] = passed
    return Certificate(notion, "verified_at_scale", None, scales,
                       dict(geom=slack_geom, oracle=0.0,
                            delta_term="delta*|x-x'|"), cfg.echo())


@dataclass(frozen=True)
class Modulus:
    value: float
    kind: str                 # clm | lip | clm_at_for | lip_at_for
    ladder: tuple = ()

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("modulus must be nonnegative")


def _excess(lhs_pts, rhs):
    if len(lhs_pts) == 0:
        return 0.0
    if rhs.is_empty:
        return math.inf
    return float(np.max(rhs.dist(lhs_pts)))


def _ladder_value(ratios):
    """Smallest-rung value plus divergence detection along the ladder."""
    ratios = [r for r in ratios if math.isfinite(r)]
    if not ratios:
        return math.inf
    diverging = (len(ratios) >= 2
                 and all(ratios[i + 1] >= 1.3 * ratios[i] and ratios[i] > 0
                         for i in range(len(ratios) - 1))
                 and ratios[-1] >= 2.0 * ratios[0])
    return math.inf if diverging else ratios[-1]


def estimate_clm(S, xbar, ybar=None, cfg=None):
    """Calmness modulus estimate (graph-localized when ybar is given)."""
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    eng = _Engine(S, None, cfg, svmap.slack_resolution(S), S.dim_out)
    if ybar is not None:
        ybar = geom.as_point(ybar, S.dim_out)
        if geom.dist_point_region(ybar, eval_S(S, xbar)) > 1e-6 + S.resolution:
            raise NotOnGraph("ybar not in S(xbar)")
    base = eval_S(S, xbar)
    ratios = []
    for ri, r in enumerate(cfg.radius_ladder):
        rng = np.random.default_rng(cfg.seed * 131 + ri)
        pts = ball_grid(xbar, r, cfg.grid_per_axis, rng, cfg.point_cap)
        window = wkey = None
        if ybar is not None:
            window = Region.from_polyhedron(
                geom.ball_polyhedron(ybar, r, level=cfg.ball_level))
            wkey = ("clmW", r)
        cell = 2.0 * r / max(cfg.grid_per_axis - 1, 1)
        sup = 0.0
        for x in pts:
            nw = float(np.linalg.norm(x - xbar))
            if nw < cell:   # sub-cell ratios are jitter noise, not trend
                continue
            exc = _excess(eng.lhs_points(x, window, wkey), base)
            exc = max(0.0, exc - eng.slack_oracle)
            sup = max(sup, exc / nw)
        ratios.append(sup)
    return Modulus(_ladder_value(ratios),
                   "clm_at_for" if ybar is not None else "clm", tuple(ratios))


def estimate_lip(S, xbar, ybar=None, cfg=None):
    """Lipschitz / graphical modulus estimate via excess over sampled pairs."""
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    eng = _Engine(S, None, cfg, svmap.slack_resolution(S), S.dim_out)
    if ybar is not None:
        ybar = geom.as_point(ybar, S.dim_out)
        if geom.dist_point_region(ybar, eval_S(S, xbar)) > 1e-6 + S.resolution:
            raise NotOnGraph("ybar not in S(xbar)")
    ratios = []
    for ri, r in enumerate(cfg.radius_ladder):
        rng = np.random.default_rng(cfg.seed * 131 + ri)
        pts = ball_grid(xbar, r, cfg.grid_per_axis, rng, cfg.point_cap)
        window = wkey = None
        if ybar is not None:
            window = Region.from_polyhedron(
                geom.ball_polyhedron(ybar, r, level=cfg.ball_level))
            wkey = ("lipW", r)
        cell = 2.0 * r / max(cfg.grid_per_axis - 1, 1)
        sup = 0.0
        for xa, xb in _pairs_from(pts, xbar, cfg.pair_cap, rng):
            nw = float(np.linalg.norm(xa - xb))
            if nw < cell:
                continue
            exc = _excess(eng.lhs_points(xa, window, wkey), eval_S(S, xb))
            exc = max(0.0, exc - eng.slack_oracle)
            sup = max(sup, exc / nw)
        ratios.append(sup)
    return Modulus(_ladder_value(ratios),
                   "lip_at_for" if ybar is not None else "lip", tuple(ratios))


def globalize(pointwise, S, T, xbar, cfg=None, coverage_radius=None):
    """Aggregate pseudo certificates at a net of ybar into a plain notion.

    The net must cover S(xbar) within the coverage radius (else CoverageGap);
    the aggregate claim is then re-verified independently by the direct
    certifier and any disagreement is reported as inconclusive.
    """
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    if not pointwise:
        raise CoverageGap("empty certificate net")
    net, notions = [], set()
    for cert in pointwise:
        if cert.config.get("ybar") is None:
            raise ValueError("pointwise certificates must echo their ybar")
        net.append(np.asarray(cert.config["ybar"], dtype=float))
        notions.add(cert.notion)
    if len(notions) != 1:
        raise ValueError("mixed pseudo notions in the net")
    pseudo_notion = notions.pop()
    direct_notion = {"pseudoOuterT": "outerT", "pseudoInnerT": "innerT",
                     "pseudoT": "T", "pseudoStrictT": "strictT"}[pseudo_notion]
    trunc = _default_truncation(cfg, S.dim_out)
    base = eval_S(S, xbar).intersect(
        Region.from_polyhedron(geom.ball_polyhedron(
            trunc.center, trunc.radius, level=cfg.ball_level)))
    cover_r = coverage_radius if coverage_radius is not None \
        else cfg.radius_ladder[0]
    if not base.is_empty:
        samples = base.sample_points(cfg.per_edge)
        netarr = np.array(net)
        for y in samples:
            if float(np.min(np.linalg.norm(netarr - y, axis=1))) > cover_r:
                raise CoverageGap(f"net leaves {y} uncovered at radius {cover_r:g}")
    agg = "verified_at_scale" if all(c.verified for c in pointwise) else \
        ("refuted" if any(c.verdict == "refuted" for c in pointwise)
         else "inconclusive")
    direct = certify_setvalued(S, T, xbar, direct_notion, cfg)
    if direct.verdict == agg:
        direct.notes.append(f"globalized from {len(net)} pseudo certificates")
        return direct
    return Certificate(direct_notion, "inconclusive", direct.witness,
                       direct.scales, direct.slack, cfg.echo(),
                       notes=[f"aggregate {agg} vs direct {direct.verdict}"])


def attach_point(cert, xbar, ybar=None):
    """Echo the certification point into the certificate config."""
    cert.config["xbar"] = list(np.atleast_1d(np.asarray(xbar, dtype=float)))
    if ybar is not None:
        cert.config["ybar"] = list(np.atleast_1d(np.asarray(ybar, dtype=float)))
    return cert


def prop45_check(S, T, xbar, cfg=None):
    """Hausdorff-form consistency check for single-valued T (test support).

    Compares d(S(xbar) + T(x-xbar), S(x)) <= delta*|x-xbar| on the standard
    grid; per the two-sided distance this is the T-differentiability check of
    closed-valued maps with single-valued T.
    """
    cfg = cfg or CertConfig()
    xbar = geom.as_point(xbar, S.dim_in)
    eng = _Engine(S, T, cfg, svmap.slack_resolution(S), S.dim_out)
    trunc = Ball(eng.trunc.center, eng.trunc.radius)
    for di, delta in enumerate(cfg.delta_ladder):
        ok_r = None
        for ri, r in enumerate(cfg.radius_ladder):
            rng = np.random.default_rng(cfg.seed * 9973 + di * 101 + ri)
            pts = ball_grid(xbar, r, cfg.grid_per_axis, rng, cfg.point_cap)
            bad = False
            for x in pts:
                w = x - xbar
                nw = float(np.linalg.norm(w))
                if nw <= 1e-12:
                    continue
                lhs = geom.minkowski_sum(eval_S(S, xbar), eval_T(T, w))
                rhs = eval_S(S, x)
                try:
                    h = geom.hausdorff(lhs, rhs, truncation=trunc,
                                       per_edge=cfg.per_edge)
                except geom.EmptyRegion:
                    bad = True
                    break
                if h > delta * nw + eng.slack_const:
                    bad = True
                    break
            if not bad:
                ok_r = r
                break
        if ok_r is None:
            return False
    return True

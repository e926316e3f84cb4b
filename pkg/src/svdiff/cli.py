"""Instance runner and command-line entry points.

Subcommands: run, certify, single, modulus, coderiv, mord, compose-chain,
compose-sum, regcover-harness, strictify, clarke, semicontinuity, gallery.
Each named subcommand executes the matching tasks of an instance file; `run`
executes all tasks in order; `gallery` runs the built-in paper-example suite.

Exit codes: 0 = everything verified/agreeing (tasks whose expected verdict is
"refuted" count as passing when the refuter refutes); 2 = at least one
unexpected verdict (witnesses are in the report); 1 = error (bad instance,
dimension mismatch, evaluation failure).

Reports are deterministic for fixed instance, configuration and seed: the
JSON written by --json-out carries no timing; wall time goes to stdout only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import calculus, certify, clarke, coderiv, gallery, geom, homog, \
    regcover, serialize, strictify, svmap
from .certify import CertConfig
from .errors import ToolkitError
from .geom import Ball
from .svmap import GraphPoint

_OPS = ("certify", "single", "modulus", "coderiv", "mord", "compose-chain",
        "compose-sum", "regcover-harness", "strictify", "clarke",
        "semicontinuity")


class _Context:
    def __init__(self, instance, flags):
        self.flags = flags
        self.maps = {name: serialize.svmap_from_json(obj)
                     for name, obj in instance.get("maps", {}).items()}
        self.tmaps = {}
        for name, obj in instance.get("tmaps", {}).items():
            self.tmaps[name] = serialize.tmap_from_json(obj, self.tmaps)

    def svmap(self, ref):
        return self.maps[ref] if isinstance(ref, str) \
            else serialize.svmap_from_json(ref)

    def tmap(self, ref):
        if isinstance(ref, str):
            return self.tmaps[ref]
        return serialize.tmap_from_json(ref, self.tmaps)

    def config(self, task, dim_out):
        flags = self.flags
        scale = flags.get("tol", 1.0)
        base = dict(
            delta_ladder=tuple(scale * d for d in (1e-1, 3e-2, 1e-2)),
            radius_ladder=tuple(scale * r for r in (1e-1, 3e-2, 1e-2)),
            grid_per_axis=21, point_cap=60, pair_cap=1600, per_edge=3,
            ball_level=6, seed=flags.get("seed", 0), jobs=flags.get("jobs", 1),
            truncation=Ball(np.zeros(dim_out), flags.get("truncation", 10.0)))
        over = dict(task.get("config", {}))
        if "truncation" in over:
            over["truncation"] = Ball(np.zeros(dim_out),
                                      float(over["truncation"]))
        for key in ("delta_ladder", "radius_ladder"):
            if key in over:
                over[key] = tuple(float(v) for v in over[key])
        base.update(over)
        return CertConfig(**base)


def _verdict_ok(verdict, expect):
    if expect is None:
        return verdict == "verified_at_scale"
    return verdict == {"verified": "verified_at_scale",
                       "refuted": "refuted"}.get(expect, expect)


def _task_certify(ctx, task):
    S = ctx.svmap(task["map"])
    T = ctx.tmap(task["tmap"])
    cfg = ctx.config(task, S.dim_out)
    notion = task["notion"]
    if notion in ("pseudoOuterT", "pseudoInnerT", "pseudoT", "pseudoStrictT",
                  "aubin"):
        cert = certify.certify_pseudo(S, T, task["xbar"], task["ybar"],
                                      notion, cfg)
        certify.attach_point(cert, task["xbar"], task["ybar"])
    else:
        cert = certify.certify_setvalued(S, T, task["xbar"], notion, cfg)
        certify.attach_point(cert, task["xbar"])
    return dict(certificate=serialize.certificate_to_json(cert),
                ok=_verdict_ok(cert.verdict, task.get("expect")))


def _task_single(ctx, task):
    spec = clarke.CORPUS[task["function"]]
    T = ctx.tmap(task["tmap"])
    cfg = ctx.config(task, spec["m"])
    cert = certify.certify_single(spec["f"], T, task["xbar"],
                                  strict=bool(task.get("strict", False)),
                                  cfg=cfg)
    return dict(certificate=serialize.certificate_to_json(cert),
                ok=_verdict_ok(cert.verdict, task.get("expect")))


def _task_modulus(ctx, task):
    S = ctx.svmap(task["map"])
    cfg = ctx.config(task, S.dim_out)
    kind = task.get("kind", "lip")
    fn = certify.estimate_lip if kind.startswith("lip") else certify.estimate_clm
    mod = fn(S, task["xbar"], task.get("ybar"), cfg)
    out = dict(modulus=serialize.modulus_to_json(mod), ok=True)
    if "expect_value" in task:
        want = float(task["expect_value"])
        tol = float(task.get("rel_tol", 0.05))
        out["ok"] = (math.isfinite(mod.value)
                     and abs(mod.value - want) <= tol * max(abs(want), 1e-12))
    elif task.get("expect") == "infinite":
        out["ok"] = math.isinf(mod.value)
    return out


def _task_coderiv(ctx, task):
    S = ctx.svmap(task["map"])
    D = coderiv.coderivative(S, task["xbar"], task["ybar"])
    return dict(cones=serialize.cones_to_json(D.cones), ok=True)


def _task_mord(ctx, task):
    S = ctx.svmap(task["map"])
    cfg = ctx.config(task, S.dim_out)
    D = coderiv.coderivative(S, task["xbar"], task["ybar"])
    out = {}
    try:
        gm = coderiv.graphical_modulus(D)
        T = coderiv.mord_T(D)
    except ToolkitError as exc:
        return dict(criterion="fails", detail=str(exc),
                    ok=task.get("expect") == "criterion_fails")
    cert = certify.certify_pseudo(S, T, task["xbar"], task["ybar"],
                                  "pseudoStrictT", cfg)
    lip = certify.estimate_lip(S, task["xbar"], task["ybar"], cfg)
    rel = abs(lip.value - gm) / gm if gm > 0 and math.isfinite(lip.value) \
        else (0.0 if lip.value == gm else math.inf)
    tol = float(task.get("lip_tol", 0.05))
    out.update(graphical_modulus=gm,
               certificate=serialize.certificate_to_json(cert),
               lip_estimate=serialize.modulus_to_json(lip),
               lip_gap_rel=rel,
               ok=(cert.verdict == "verified_at_scale" and rel <= tol))
    return serialize.sanitize(out)


def _task_chain(ctx, task):
    F = ctx.svmap(task["F"])
    G = ctx.svmap(task["G"])
    net = [calculus.NetPoint(p["y"], ctx.tmap(p["T_xy"]), ctx.tmap(p["T_yz"]))
           for p in task["net"]]
    inst = calculus.ChainInstance(F, G, task["xbar"], task["zbar"], net)
    T, report = calculus.chain_T(inst)
    notion = task.get("certify", "pseudoOuterT")
    GF = svmap.compose_graphs(G, F)
    cfg = ctx.config(task, GF.dim_out)
    cert = certify.certify_pseudo(GF, T, task["xbar"], task["zbar"], notion,
                                  cfg)
    return dict(tmap=serialize.tmap_to_json(T), hypothesis=serialize.sanitize(report),
                certificate=serialize.certificate_to_json(cert),
                ok=_verdict_ok(cert.verdict, task.get("expect")))


def _task_sum(ctx, task):
    Ss = [ctx.svmap(name) for name in task["maps"]]
    net = [calculus.SumDecomposition(tuple(p["ys"]),
                                     tuple(ctx.tmap(t) for t in p["Ts"]))
           for p in task["net"]]
    T = calculus.sum_T(Ss, task["xbar"], task["ybar"], net,
                       resolution=task.get("resolution"))
    Ssum = svmap.sum_graphs(Ss)
    cfg = ctx.config(task, Ssum.dim_out)
    notion = task.get("certify", "pseudoOuterT")
    cert = certify.certify_pseudo(Ssum, T, task["xbar"], task["ybar"], notion,
                                  cfg)
    return dict(tmap=serialize.tmap_to_json(T),
                certificate=serialize.certificate_to_json(cert),
                ok=_verdict_ok(cert.verdict, task.get("expect")))


def _task_harness(ctx, task):
    S = ctx.svmap(task["map"])
    T = ctx.tmap(task["tmap"])
    cfg = ctx.config(task, S.dim_out)
    point = GraphPoint(task["xbar"], task["ybar"])
    which = task.get("which", "equivalence")
    if which == "equivalence":
        rec = regcover.equivalence_harness(S, point, T, cfg)
        certs = {k: rec[k] for k in ("mr", "oc", "it")}
    else:
        rec = regcover.subreg_harness(S, point, T, cfg)
        certs = {k: rec[k] for k in ("msr", "outer_it")}
    verdicts = {c.verdict for c in certs.values()}
    expect = task.get("expect")
    ok = rec["agree"] and (expect is None or
                           _verdict_ok(next(iter(verdicts)), expect))
    return dict(agree=rec["agree"],
                certificates={k: serialize.certificate_to_json(c)
                              for k, c in certs.items()},
                ok=ok)


def _task_strictify(ctx, task):
    S = ctx.svmap(task["map"])
    cfg = ctx.config(task, S.dim_out)
    if task.get("variant", "strict_from_outer") == "strict_from_outer":
        T = ctx.tmap(task["tmap"])
        res = strictify.strict_from_outer(S, T, task["xbar"], task["ybar"],
                                          cfg, mode=task.get("mode",
                                                             "include_center"))
        return dict(
            verdict=res["verdict"], predicted=res["predicted"],
            measured=serialize.certificate_to_json(res["measured"]),
            probes=serialize.sanitize(res["probes"]),
            ok=_verdict_ok(res["verdict"], task.get("expect")))
    res = strictify.lip_equals_limsup_clm(S, task["xbar"], task["ybar"], cfg)
    ok = True
    if "expect_lip" in task:
        want = float(task["expect_lip"])
        tol = float(task.get("rel_tol", 0.05))
        ok = abs(res["lip_est"] - want) <= tol * max(want, 1e-12)
    return dict(record=serialize.sanitize(res), ok=ok)


def _task_clarke(ctx, task):
    name = task["function"]
    sampler, xdefault = clarke.corpus_sampler(name)
    xbar = np.asarray(task.get("xbar", xdefault), dtype=float)
    seed = ctx.flags.get("seed", 0)
    J = clarke.clarke_jacobian(sampler, xbar, seed=seed)
    out = dict(hull=[M.tolist() for M in J.matrices],
               hull_moves=list(J.hull_moves),
               flagged_fraction=J.flagged_fraction)
    ok = True
    if "hull_expect" in task:
        want = np.array(task["hull_expect"], dtype=float).reshape(
            len(task["hull_expect"]), -1)
        got = np.array([M.reshape(-1) for M in J.matrices])
        gap = clarke._vertex_set_gap(got, want)
        out["hull_gap"] = gap
        ok = ok and gap <= float(task.get("hull_tol", 1e-2))
    cfg = ctx.config(task, len(sampler.value(xbar)))
    cert = certify.certify_single(sampler.value, clarke.jacobian_T(J), xbar,
                                  strict=False, cfg=cfg)
    out["certificate"] = serialize.certificate_to_json(cert)
    ok = ok and _verdict_ok(cert.verdict, task.get("expect"))
    if len(sampler.value(xbar)) == 1:
        v = np.zeros(len(xbar))
        v[0] = 1.0
        d1, _ = clarke.clarke_dirderiv(sampler, xbar, v, seed=seed)
        d2, _ = clarke.clarke_dirderiv(sampler, xbar, 2.0 * v, seed=seed)
        out["homogeneity_gap"] = abs(d2 - 2.0 * d1)
        ok = ok and out["homogeneity_gap"] <= 1e-6
    return serialize.sanitize(dict(out, ok=ok))


def _task_semicontinuity(ctx, task):
    S = ctx.svmap(task["map"])
    trunc = Ball(np.zeros(S.dim_out), float(task.get("truncation", 10.0)))
    rep = svmap.semicontinuity_report(S, task["xbar"], truncation=trunc,
                                      seed=ctx.flags.get("seed", 0))
    holds = dict(outer=rep["outer"] == "holds at resolution",
                 inner=rep["inner"] == "holds at resolution")
    expect = task.get("expect", "continuous")
    want = {"continuous": (True, True), "outer": (True, False),
            "inner": (False, True), "neither": (False, False)}[expect]
    return dict(outer=rep["outer"], inner=rep["inner"],
                ok=(holds["outer"], holds["inner"]) == want)


_DISPATCH = {
    "certify": _task_certify,
    "single": _task_single,
    "modulus": _task_modulus,
    "coderiv": _task_coderiv,
    "mord": _task_mord,
    "compose-chain": _task_chain,
    "compose-sum": _task_sum,
    "regcover-harness": _task_harness,
    "strictify": _task_strictify,
    "clarke": _task_clarke,
    "semicontinuity": _task_semicontinuity,
}


def run(instance, flags=None, op_filter=None):
    """Execute an instance dict; returns (report dict, exit code)."""
    flags = dict(flags or {})
    try:
        ctx = _Context(instance, flags)
        results = []
        for idx, task in enumerate(instance.get("tasks", [])):
            op = task.get("op")
            if op_filter and op != op_filter:
                continue
            if op not in _DISPATCH:
                raise ToolkitError(f"task {idx}: unknown op {op!r}")
            try:
                res = _DISPATCH[op](ctx, task)
            except ToolkitError as exc:
                if task.get("expect") == "error":
                    res = dict(error=str(exc), ok=True)
                else:
                    raise ToolkitError(f"task {idx} ({op}): {exc}") from exc
            res.update(op=op, index=idx, expected=task.get("expect"))
            results.append(res)
    except (ToolkitError, KeyError, ValueError) as exc:
        return dict(tool_version=__version__, error=str(exc)), 1
    all_ok = all(r["ok"] for r in results)
    report = dict(tool_version=__version__,
                  instance_hash=serialize.instance_hash(instance),
                  seed=flags.get("seed", 0),
                  flags=serialize.sanitize(flags),
                  results=results, all_ok=all_ok)
    return report, 0 if all_ok else 2


def run_gallery(flags=None):
    """Run every built-in gallery instance; returns (report, exit code)."""
    flags = dict(flags or {})
    merged = dict(tool_version=__version__, seed=flags.get("seed", 0),
                  flags=serialize.sanitize(flags), instances={})
    code = 0
    for name in gallery.names():
        rep, c = run(gallery.build(name), flags)
        merged["instances"][name] = rep
        code = max(code, c)
    merged["all_ok"] = code == 0
    return merged, code


def _summarize(report, stream=sys.stdout):
    if "error" in report:
        print(f"error: {report['error']}", file=stream)
        return
    def lines(rep, prefix=""):
        for r in rep.get("results", []):
            mark = "ok " if r["ok"] else "FAIL"
            extra = ""
            if "certificate" in r:
                extra = r["certificate"]["verdict"]
            elif "modulus" in r:
                extra = f"value={r['modulus']['value']}"
            elif "agree" in r:
                extra = f"agree={r['agree']}"
            print(f"{mark} {prefix}task[{r['index']}] {r['op']} {extra}",
                  file=stream)
    if "instances" in report:
        for name, rep in report["instances"].items():
            lines(rep, prefix=f"{name}/")
    else:
        lines(report)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="svdiff",
        description="Certifiable generalized differentiation of set-valued maps")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_instance=True):
        if needs_instance:
            p.add_argument("instance", help="instance JSON path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--tol", type=float, default=1.0,
                       help="scale factor applied to the default ladders")
        p.add_argument("--json-out", default=None)
        p.add_argument("--truncation", type=float, default=10.0)

    add_common(sub.add_parser("run", help="run all tasks of an instance"))
    for op in _OPS:
        add_common(sub.add_parser(op, help=f"run the {op} tasks of an instance"))
    add_common(sub.add_parser("gallery", help="run the built-in example suite"),
               needs_instance=False)

    args = parser.parse_args(argv)
    flags = dict(seed=args.seed, jobs=args.jobs, tol=args.tol,
                 truncation=args.truncation)
    t0 = time.time()
    if args.command == "gallery":
        report, code = run_gallery(flags)
    else:
        try:
            with open(args.instance) as fh:
                instance = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read instance: {exc}", file=sys.stderr)
            return 1
        op_filter = None if args.command == "run" else args.command
        report, code = run(instance, flags, op_filter)
    wall = time.time() - t0
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(serialize.dumps_canonical(report))
    _summarize(report)
    print(f"exit={code} wall={wall:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())

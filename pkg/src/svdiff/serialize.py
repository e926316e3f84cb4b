"""JSON (de)serialization for instance files and reports.

Schemas (versioned by the instance-file "version" field, currently 1):

  polyhedron   {"h": [[a1..ad, b], ...]} and/or
               {"v": {"vertices": [[...]], "rays": [[...]]}}
  map          {"backend": "poly_graph", "dim_in": n, "dim_out": m,
                "pieces": [polyhedron...]}
             | {"backend": "oracle", "name": "<gallery id>",
                "resolution": h, "params": {...}}
             | {"backend": "linear", "matrix": [[...]]}
  tmap         {"kind": "ball", "kappa": k, "dim_in": n, "dim_out": m}
             | {"kind": "matrix_bundle", "matrices": [[[...]], ...]}
             | {"kind": "cone_graph", "dim_in": n, "dim_out": m,
                "pieces": [polyhedron...]}
             | {"kind": "reflect" | "neg_input", "of": tmap}
             | {"kind": "intersection" | "union", "of": [tmap, ...]}

Non-finite floats are encoded as the strings "inf", "-inf", "nan" so the
reports stay strict JSON and byte-deterministic.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from . import geom, homog, svmap
from .geom import Polyhedron, Region


def sanitize(obj):
    """Recursively convert numpy/infinite values into strict-JSON values."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_canonical(obj):
    return json.dumps(sanitize(obj), sort_keys=True, indent=2) + "\n"


def instance_hash(instance):
    return hashlib.sha256(
        json.dumps(sanitize(instance), sort_keys=True).encode()).hexdigest()


# -- geometry ---------------------------------------------------------------

def polyhedron_to_json(P):
    V, R = P.vrep
    out = {"v": {"vertices": V.tolist(), "rays": R.tolist()}}
    if P._A is not None:
        A, b = P.hrep
        out["h"] = [list(a) + [float(bb)] for a, bb in zip(A, b)]
    return sanitize(out)


def polyhedron_from_json(obj, dim=None):
    if "h" in obj and obj["h"]:
        rows = np.asarray(obj["h"], dtype=float)
        P = Polyhedron.from_hrep(rows[:, :-1], rows[:, -1])
        return P
    v = obj["v"]
    verts = np.asarray(v["vertices"], dtype=float)
    rays = np.asarray(v.get("rays", []), dtype=float)
    if verts.size == 0:
        d = dim or (rays.shape[1] if rays.size else 1)
        return Polyhedron(d, vrep=(np.zeros((0, d)), None))
    if rays.size == 0:
        rays = None
    return Polyhedron.from_vrep(verts, rays)


def region_to_json(R):
    return [polyhedron_to_json(p) for p in R.pieces]


def region_from_json(pieces, dim):
    return Region(dim, tuple(polyhedron_from_json(p, dim) for p in pieces))


# -- maps ---------------------------------------------------------------------

def svmap_to_json(S):
    if S.backend == "poly_graph":
        return {"backend": "poly_graph", "dim_in": S.dim_in,
                "dim_out": S.dim_out, "pieces": region_to_json(S.graph)}
    return {"backend": "oracle", "name": S.name, "resolution": S.resolution,
            "params": {}}


def svmap_from_json(obj):
    backend = obj["backend"]
    if backend == "poly_graph":
        n, m = int(obj["dim_in"]), int(obj["dim_out"])
        return svmap.SVMap.poly_graph(
            region_from_json(obj["pieces"], n + m), n, m,
            name=obj.get("name", ""))
    if backend == "linear":
        return svmap.SVMap.linear(np.asarray(obj["matrix"], dtype=float),
                                  name=obj.get("name", ""))
    if backend == "oracle":
        return svmap.oracle(obj["name"],
                            resolution=float(obj.get("resolution", 1e-3)),
                            **obj.get("params", {}))
    raise ValueError(f"unknown map backend {backend!r}")


def tmap_to_json(T):
    if T.kind == "ball":
        return {"kind": "ball", "kappa": T.kappa, "dim_in": T.dim_in,
                "dim_out": T.dim_out}
    if T.kind == "matrix_bundle":
        return {"kind": "matrix_bundle",
                "matrices": [M.tolist() for M in T.matrices]}
    return {"kind": "cone_graph", "dim_in": T.dim_in, "dim_out": T.dim_out,
            "pieces": region_to_json(T.graph)}


def tmap_from_json(obj, registry=None):
    kind = obj["kind"]
    if kind == "ball":
        return homog.HomogMap.ball(float(obj["kappa"]), int(obj["dim_in"]),
                                   int(obj["dim_out"]))
    if kind == "matrix_bundle":
        return homog.HomogMap.matrix_bundle(
            [np.asarray(M, dtype=float) for M in obj["matrices"]])
    if kind == "cone_graph":
        n, m = int(obj["dim_in"]), int(obj["dim_out"])
        return homog.HomogMap.cone_graph(
            region_from_json(obj["pieces"], n + m), n, m)
    def sub(o):
        if isinstance(o, str):
            if registry is None or o not in registry:
                raise ValueError(f"tmap reference {o!r} does not resolve")
            return registry[o]
        return tmap_from_json(o, registry)
    if kind == "reflect":
        return homog.reflect(sub(obj["of"]))
    if kind == "neg_input":
        return homog.neg_input(sub(obj["of"]))
    if kind == "intersection":
        maps = [sub(o) for o in obj["of"]]
        out = maps[0]
        for t in maps[1:]:
            out = homog.intersect_maps(out, t)
        return out
    if kind == "union":
        return homog.union_maps([sub(o) for o in obj["of"]])
    raise ValueError(f"unknown tmap kind {kind!r}")


# -- results ------------------------------------------------------------------

def witness_to_json(w):
    if w is None:
        return None
    return sanitize(dict(x=list(w.x),
                         xprime=None if w.xprime is None else list(w.xprime),
                         y=list(w.y), violation=w.violation))


def certificate_to_json(c):
    return sanitize(dict(notion=c.notion, verdict=c.verdict,
                         witness=witness_to_json(c.witness), scales=c.scales,
                         slack=c.slack, config=c.config, norm=c.norm,
                         notes=c.notes))


def modulus_to_json(m):
    return sanitize(dict(value=m.value, kind=m.kind, ladder=list(m.ladder)))


def cones_to_json(region):
    out = []
    for p in region.pieces:
        V, R = p.vrep
        out.append(dict(vertices=V.tolist(), rays=R.tolist()))
    return sanitize(out)

"""Built-in gallery: the paper-example suite as self-checking instances.

Every entry is an instance dict in the CLI schema with expected verdicts
attached to its tasks, so the gallery doubles as a regression suite: deliberate
failures (reflected maps, intersection maps, the semiderivative counterexample)
must be refuted for the suite to pass.
"""

from __future__ import annotations

import numpy as np


def _plane_piece():
    return {"v": {"vertices": [[0.0, 0.0]],
                  "rays": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]}}


_LIGHT = {"grid_per_axis": 11, "point_cap": 24, "pair_cap": 300}


def example_4_7():
    T = {"kind": "cone_graph", "dim_in": 1, "dim_out": 1, "pieces": [
        {"v": {"vertices": [[0.0, 0.0]], "rays": [[-1.0, 0.0]]}},
        {"v": {"vertices": [[0.0, 0.0]], "rays": [[1.0, 1.0], [1.0, -1.0]]}},
    ]}
    tasks = [
        {"op": "certify", "map": "S", "tmap": "T", "notion": "strictT",
         "xbar": [x], "expect": "verified"} for x in (-1.0, 0.0, 1.0)
    ]
    tasks += [
        {"op": "certify", "map": "S", "tmap": {"kind": "reflect", "of": "T"},
         "notion": "outerT", "xbar": [0.0], "expect": "refuted"},
        {"op": "certify", "map": "S", "tmap": "T", "notion": "pseudoStrictT",
         "xbar": [0.5], "ybar": [0.5], "expect": "verified"},
        {"op": "certify", "map": "S", "tmap": {"kind": "reflect", "of": "T"},
         "notion": "pseudoOuterT", "xbar": [0.5], "ybar": [0.5],
         "expect": "refuted"},
    ]
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 1, "dim_out": 1,
                       "pieces": [{"h": [[-1.0, 1.0, 0.0]]}]}},
        "tmaps": {"T": T},
        "tasks": tasks,
    }


def example_4_6():
    cfg = dict(_LIGHT, grid_per_axis=7, pair_cap=200, point_cap=16)
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 2, "dim_out": 2,
                       "pieces": [{"h": [[1.0, 0.0, -1.0, 0.0, 0.0],
                                         [-1.0, 0.0, 1.0, 0.0, 0.0]]}]}},
        "tmaps": {
            "T1": {"kind": "matrix_bundle", "matrices": [[[1.0, 0.0], [0.0, 1.0]]]},
            "T2": {"kind": "matrix_bundle", "matrices": [[[1.0, 0.0], [0.0, 0.0]]]},
        },
        "tasks": [
            {"op": "certify", "map": "S", "tmap": "T1", "notion": "strictT",
             "xbar": [0.0, 0.0], "config": cfg, "expect": "verified"},
            {"op": "certify", "map": "S", "tmap": "T2", "notion": "strictT",
             "xbar": [0.0, 0.0], "config": cfg, "expect": "verified"},
            {"op": "certify", "map": "S",
             "tmap": {"kind": "intersection", "of": ["T1", "T2"]},
             "notion": "strictT", "xbar": [0.0, 0.0], "config": cfg,
             "expect": "refuted"},
        ],
    }


def example_4_15():
    return {
        "version": 1,
        "maps": {"S": {"backend": "oracle", "name": "sqrt_hook",
                       "resolution": 1e-3}},
        "tmaps": {"DS": {"kind": "cone_graph", "dim_in": 1, "dim_out": 2,
                         "pieces": [{"v": {"vertices": [[0.0, 0.0, 0.0]],
                                           "rays": [[1.0, 0.0, 0.0],
                                                    [-1.0, 0.0, 0.0],
                                                    [0.0, 0.0, 1.0]]}}]}},
        "tasks": [
            {"op": "certify", "map": "S", "tmap": "DS",
             "notion": "pseudoStrictT", "xbar": [0.0], "ybar": [0.0, 0.0],
             "config": {"pair_cap": 400, "point_cap": 32},
             "expect": "refuted"},
        ],
    }


def example_4_16():
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 1, "dim_out": 1,
                       "pieces": [_plane_piece()]}},
        "tmaps": {"Z": {"kind": "matrix_bundle", "matrices": [[[0.0]]]}},
        "tasks": [
            {"op": "certify", "map": "S", "tmap": "Z", "notion": "pseudoT",
             "xbar": [0.5], "ybar": [2.0], "expect": "verified"},
            {"op": "certify", "map": "S", "tmap": "Z", "notion": "pseudoT",
             "xbar": [-1.0], "ybar": [0.0], "expect": "verified"},
        ],
    }


def ray_map():
    return {
        "version": 1,
        "maps": {"S": {"backend": "oracle", "name": "ray_rotation"}},
        "tasks": [
            {"op": "semicontinuity", "map": "S", "xbar": [0.7],
             "truncation": 2.0, "expect": "continuous"},
            {"op": "semicontinuity", "map": "S", "xbar": [2.5],
             "truncation": 2.0, "expect": "continuous"},
        ],
    }


def example_3_2_halflines():
    calm_below = {"kind": "cone_graph", "dim_in": 1, "dim_out": 1, "pieces": [
        {"h": [[-1.0, 0.0, 0.0], [-1.0, -1.0, 0.0]]},
        {"h": [[1.0, 0.0, 0.0], [1.0, -1.0, 0.0]]},
    ]}
    subgrad = {"kind": "cone_graph", "dim_in": 1, "dim_out": 1,
               "pieces": [{"h": [[2.0, -1.0, 0.0]]}]}
    not_subgrad = {"kind": "cone_graph", "dim_in": 1, "dim_out": 1,
                   "pieces": [{"h": [[1.0, -1.0, 0.0]]}]}
    return {
        "version": 1,
        "maps": {},
        "tmaps": {"Tcalm": calm_below, "Tsub": subgrad, "Tbad": not_subgrad},
        "tasks": [
            {"op": "single", "function": "neg_abs", "tmap": "Tcalm",
             "xbar": [0.0], "strict": False, "expect": "verified"},
            {"op": "single", "function": "square", "tmap": "Tsub",
             "xbar": [1.0], "strict": False, "expect": "verified"},
            {"op": "single", "function": "neg_abs", "tmap": "Tbad",
             "xbar": [0.0], "strict": False, "expect": "refuted"},
        ],
    }


def clarke_corpus():
    tasks = []
    for name in ("abs", "max2", "l1_norm", "square", "abs_pair", "linear_21"):
        t = {"op": "clarke", "function": name, "expect": "verified"}
        if name == "abs":
            t["hull_expect"] = [[[-1.0]], [[1.0]]]
            t["hull_tol"] = 1e-3
        if name == "max2":
            t["hull_expect"] = [[[1.0, 0.0]], [[0.0, 1.0]]]
            t["hull_tol"] = 1e-2
        tasks.append(t)
    return {"version": 1, "maps": {}, "tmaps": {}, "tasks": tasks}


def mord_example():
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 1, "dim_out": 1,
                       "pieces": [
                           {"v": {"vertices": [[0.0, 0.0]], "rays": [[-1.0, -1.0]]}},
                           {"v": {"vertices": [[0.0, 0.0]], "rays": [[1.0, 2.0]]}},
                       ]}},
        "tasks": [
            {"op": "mord", "map": "S", "xbar": [0.0], "ybar": [0.0],
             "lip_tol": 0.05, "expect": "verified"},
        ],
    }


def regcover_example():
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 1, "dim_out": 1,
                       "pieces": [
                           {"v": {"vertices": [[0.0, 0.0]], "rays": [[-1.0, -0.5]]}},
                           {"v": {"vertices": [[0.0, 0.0]], "rays": [[1.0, 2.0]]}},
                       ]}},
        "tmaps": {"T": {"kind": "ball", "kappa": 2.5, "dim_in": 1, "dim_out": 1},
                  "Tsmall": {"kind": "ball", "kappa": 0.4, "dim_in": 1,
                             "dim_out": 1}},
        "tasks": [
            {"op": "regcover-harness", "map": "S", "tmap": "T",
             "which": "equivalence", "xbar": [0.0], "ybar": [0.0],
             "config": _LIGHT, "expect": "verified"},
            {"op": "regcover-harness", "map": "S", "tmap": "Tsmall",
             "which": "equivalence", "xbar": [0.0], "ybar": [0.0],
             "config": _LIGHT, "expect": "refuted"},
            {"op": "regcover-harness", "map": "S", "tmap": "T",
             "which": "subreg", "xbar": [0.0], "ybar": [0.0],
             "config": _LIGHT, "expect": "verified"},
        ],
    }


def strictify_example():
    T = {"kind": "cone_graph", "dim_in": 1, "dim_out": 1, "pieces": [
        {"v": {"vertices": [[0.0, 0.0]], "rays": [[-1.0, 0.0]]}},
        {"v": {"vertices": [[0.0, 0.0]], "rays": [[1.0, 1.0], [1.0, -1.0]]}},
    ]}
    return {
        "version": 1,
        "maps": {"S": {"backend": "poly_graph", "dim_in": 1, "dim_out": 1,
                       "pieces": [{"h": [[-1.0, 1.0, 0.0]]}]}},
        "tmaps": {"T": T},
        "tasks": [
            {"op": "strictify", "variant": "strict_from_outer", "map": "S",
             "tmap": "T", "xbar": [0.5], "ybar": [0.5], "expect": "verified"},
            {"op": "strictify", "variant": "lip_clm", "map": "S",
             "xbar": [0.0], "ybar": [0.0], "expect_lip": 1.0, "rel_tol": 0.05},
        ],
    }


GALLERY = {
    "example_4_7": example_4_7,
    "example_4_6": example_4_6,
    "example_4_15": example_4_15,
    "example_4_16": example_4_16,
    "ray_map": ray_map,
    "example_3_2_halflines": example_3_2_halflines,
    "clarke_corpus": clarke_corpus,
    "mordukhovich_kink": mord_example,
    "regcover_kink": regcover_example,
    "strictify_halfline": strictify_example,
}


def build(name):
    return GALLERY[name]()


def names():
    return list(GALLERY.keys())

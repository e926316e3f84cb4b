"""Polyhedral geometry kernel.

Exact-with-tolerance polyhedra in R^d for d <= 4: dual H/V representations,
unions (Region), distances by face-wise projection, Minkowski sums, support
and gauge functions, and circumscribed polyhedral balls.  Double precision
throughout with the single global predicate tolerance GEOM_TOL; unbounded
sets carry explicit recession rays (a line is stored as a +/- ray pair).

All values are immutable after construction and every operation is a pure
function, so concurrent use is safe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    ComplexityBudgetExceeded,
    DimensionMismatch,
    EmptyRegion,
    GaugeUnbounded,
    NotReachable,
    UnboundedWithoutTruncation,
    UnsupportedDimension,
)

GEOM_TOL = 1e-9            # global tolerance for geometric predicates
MAX_DIM = 4                # exact polyhedral operations reject dim > MAX_DIM
_SUBSET_BUDGET = 250_000   # cap on brute-force subset enumeration
_PIECE_BUDGET = 10_000     # cap on region piece counts

# loose tolerances for feasibility screening after linear solves; stays well
# below every certificate slack (which starts at 10*GEOM_TOL)
_FEAS_FACTOR = 50.0
_DEDUP_FACTOR = 1e3


def as_point(x, dim=None):
    """Coerce to a finite 1-D float array, optionally checking its length."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("vector has non-finite coordinates")
    if dim is not None and p.shape[0] != dim:
        raise DimensionMismatch(f"expected dim {dim}, got {p.shape[0]}")
    return p


def _as_points(X, dim):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1) if dim > 1 or X.shape[0] == dim else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dim {dim}, got shape {X.shape}")
    return X


def _null_space(M, tol=1e-9):
    """Orthonormal basis (columns) of {x : M x = 0}."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.eye(M.shape[1] if M.ndim == 2 else 0)
    u, s, vt = np.linalg.svd(M)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(1.0, scale)))
    return vt[rank:].T


def _row_space(M, tol=1e-9):
    """Orthonormal basis (columns) of the row space of M."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros((M.shape[1] if M.ndim == 2 else 0, 0))
    u, s, vt = np.linalg.svd(M)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(1.0, scale)))
    return vt[:rank].T


def _dedup_rows(X, tol):
    """Greedy row de-duplication at absolute tolerance tol."""
    X = np.asarray(X)
    if len(X) == 0:
        return X
    out = []
    for row in X:
        if not any(np.max(np.abs(row - r)) <= tol for r in out):
            out.append(row)
    return np.array(out)


def _normalize_hrep(A, b):
    """Unit-normal rows; drops zero rows; None if a zero row is infeasible."""
    A = np.asarray(A, dtype=float)
    A = A.reshape(-1, A.shape[-1]) if A.ndim == 2 else A.reshape(-1, 1)
    b = np.asarray(b, dtype=float).reshape(-1)
    norms = np.linalg.norm(A, axis=1)
    zero = norms <= GEOM_TOL
    if np.any(zero):
        if np.any(b[zero] < -GEOM_TOL):
            return None  # 0*x <= negative: empty
        A, b, norms = A[~zero], b[~zero], norms[~zero]
    if len(A) == 0:
        return A, b
    return A / norms[:, None], b / norms


_EMPTY_MARK = "empty"


def _interval_from_hrep(A, b):
    """1-D fast path: vertices and rays of {x : A x <= b} on the line."""
    lo, hi = -np.inf, np.inf
    for a, bb in zip(A[:, 0], b):
        if a > 0:
            hi = min(hi, bb / a)
        else:
            lo = max(lo, bb / a)
    if lo > hi + _FEAS_FACTOR * GEOM_TOL * (1 + abs(lo) + abs(hi)):
        return np.zeros((0, 1)), np.zeros((0, 1))
    V, R = [], []
    if np.isfinite(lo):
        V.append([lo])
    else:
        R.append([-1.0])
    if np.isfinite(hi):
        if not V or abs(hi - lo) > GEOM_TOL:
            V.append([hi])
    else:
        R.append([1.0])
    if not V:  # whole line
        V.append([0.0])
    return np.array(V), np.array(R).reshape(-1, 1) if R else np.zeros((0, 1))


def _enum_vertices_pointed(A, b, tol):
    """Vertices of a pointed polyhedron {x: Ax<=b} by basis enumeration."""
    m, k = A.shape
    if math.comb(m, k) > _SUBSET_BUDGET:
        raise ComplexityBudgetExceeded(f"vertex enumeration over C({m},{k}) subsets")
    idx = np.array(list(itertools.combinations(range(m), k)), dtype=int)
    if len(idx) == 0:
        return np.zeros((0, k))
    mats = A[idx]                      # (n, k, k)
    dets = np.abs(np.linalg.det(mats))
    ok = dets > 1e-10
    if not np.any(ok):
        return np.zeros((0, k))
    sols = np.linalg.solve(mats[ok], b[idx[ok]][..., None])[..., 0]
    scale = 1.0 + np.max(np.abs(sols), axis=1)
    feas = np.all(sols @ A.T - b[None, :] <= (_FEAS_FACTOR * GEOM_TOL) * scale[:, None], axis=1)
    V = sols[feas]
    if len(V) == 0:
        return np.zeros((0, k))
    return _dedup_rows(V, _DEDUP_FACTOR * GEOM_TOL * float(1 + np.max(np.abs(V))))


def _enum_rays_pointed(A, tol):
    """Extreme rays of the pointed cone {x : Ax <= 0} (unit rows A)."""
    m, k = A.shape
    if k == 1:
        R = []
        for s in (1.0, -1.0):
            if np.all(A[:, 0] * s <= _FEAS_FACTOR * GEOM_TOL):
                R.append([s])
        return np.array(R).reshape(-1, 1) if R else np.zeros((0, 1))
    if m == 0:
        return np.zeros((0, k))
    cands = []
    for size in range(k - 1, k):
        if math.comb(m, size) > _SUBSET_BUDGET:
            raise ComplexityBudgetExceeded("ray enumeration budget")
        for S in itertools.combinations(range(m), size):
            ns = _null_space(A[list(S)], tol)
            if ns.shape[1] != 1:
                continue
            d = ns[:, 0]
            for s in (1.0, -1.0):
                v = s * d
                if np.all(A @ v <= _FEAS_FACTOR * GEOM_TOL):
                    cands.append(v)
    if not cands:
        return np.zeros((0, k))
    return _dedup_rows(np.array(cands), 1e-7)


def _generators_from_facets(A, b):
    """V-representation (V, R) of {x: Ax<=b}; V empty means the set is empty."""
    d = A.shape[1]
    if d > MAX_DIM:
        raise UnsupportedDimension(f"dim {d} > {MAX_DIM}")
    if A.shape[0] == 0:
        eye = np.eye(d)
        return np.zeros((1, d)), np.vstack([eye, -eye])
    if d == 1:
        return _interval_from_hrep(A, b)
    L = _null_space(A)
    if L.shape[1] > 0:
        B = _row_space(A)
        k = B.shape[1]
        if k == 0:
            eye = np.eye(d)
            return np.zeros((1, d)), np.vstack([eye, -eye])
        A2 = A @ B
        norms = np.linalg.norm(A2, axis=1)
        good = norms > GEOM_TOL
        if np.any(~good) and np.any(b[~good] < -GEOM_TOL):
            return np.zeros((0, d)), np.zeros((0, d))
        A2, b2 = A2[good] / norms[good][:, None], b[good] / norms[good]
        V2, R2 = _generators_from_facets(A2, b2)
        if len(V2) == 0:
            return np.zeros((0, d)), np.zeros((0, d))
        V = V2 @ B.T
        lines = np.vstack([L.T, -L.T])
        R = np.vstack([R2 @ B.T, lines]) if len(R2) else lines
        return V, R
    V = _enum_vertices_pointed(A, b, GEOM_TOL)
    if len(V) == 0:
        return np.zeros((0, d)), np.zeros((0, d))
    R = _enum_rays_pointed(A, GEOM_TOL)
    return V, R


def _facets_brute(gens, k):
    """Facet normals of the homogenization cone spanned by rows gens in R^{k+1}."""
    n_g = len(gens)
    if math.comb(n_g, k) > _SUBSET_BUDGET:
        raise ComplexityBudgetExceeded(f"facet enumeration over C({n_g},{k}) subsets")
    out = []
    ftol = _FEAS_FACTOR * GEOM_TOL * float(1 + np.max(np.abs(gens)))
    for S in itertools.combinations(range(n_g), k):
        ns = _null_space(gens[list(S)])
        if ns.shape[1] != 1:
            continue
        n = ns[:, 0]
        s = gens @ n
        if np.max(s) <= ftol:
            out.append(n)
        elif np.min(s) >= -ftol:
            out.append(-n)
    return out


def _facets_from_generators(V, R):
    """H-representation (unit rows) of conv(V) + cone(R); canonical empty if V empty."""
    if len(V) == 0:
        d = V.shape[1] if V.ndim == 2 and V.shape[1] else (R.shape[1] if len(R) else 1)
        A = np.zeros((2, d))
        A[0, 0], A[1, 0] = 1.0, -1.0
        return A, np.array([-1.0, -1.0])
    V = np.asarray(V, dtype=float)
    R = np.asarray(R, dtype=float).reshape(-1, V.shape[1]) if len(R) else np.zeros((0, V.shape[1]))
    d = V.shape[1]
    if d > MAX_DIM:
        raise UnsupportedDimension(f"dim {d} > {MAX_DIM}")
    v0 = V[0]
    D = np.vstack([V - v0, R])
    E = _row_space(D)
    k = E.shape[1]
    N = _null_space(D)
    rows_A, rows_b = [], []
    for j in range(N.shape[1]):
        n = N[:, j]
        rows_A.extend([n, -n])
        c = float(n @ v0)
        rows_b.extend([c, -c])
    if k == 0:
        return np.array(rows_A), np.array(rows_b)
    Vk = (V - v0) @ E
    Rk = R @ E if len(R) else np.zeros((0, k))
    fA, fb = [], []
    if k == 1:
        lo, hi = float(np.min(Vk)), float(np.max(Vk))
        up = np.any(Rk[:, 0] > GEOM_TOL) if len(Rk) else False
        dn = np.any(Rk[:, 0] < -GEOM_TOL) if len(Rk) else False
        if not up:
            fA.append(np.array([1.0]))
            fb.append(hi)
        if not dn:
            fA.append(np.array([-1.0]))
            fb.append(-lo)
    else:
        done = False
        if len(R) == 0 and len(Vk) >= k + 1:
            try:
                hull = ConvexHull(Vk)
                for eq in _dedup_rows(hull.equations.copy(), 1e-10):
                    a, off = eq[:-1], eq[-1]
                    na = np.linalg.norm(a)
                    if na > GEOM_TOL:
                        fA.append(a / na)
                        fb.append(-off / na)
                done = True
            except QhullError:
                done = False
        if not done:
            gens = np.vstack([
                np.hstack([np.ones((len(Vk), 1)), Vk]),
                np.hstack([np.zeros((len(Rk), 1)), Rk]),
            ])
            for n in _facets_brute(gens, k):
                a, nb = n[1:], -n[0]
                na = np.linalg.norm(a)
                if na > GEOM_TOL:
                    fA.append(a / na)
                    fb.append(nb / na)
    if fA:
        fA = np.array(fA)
        fb = np.array(fb)
        cat = _dedup_rows(np.hstack([fA, fb[:, None]]), 1e-9)
        fA, fb = cat[:, :-1], cat[:, -1]
        for a, bb in zip(fA, fb):
            rows_A.append(E @ a)
            rows_b.append(bb + float((E @ a) @ v0))
    if not rows_A:
        return np.zeros((0, d)), np.zeros(0)
    return np.array(rows_A), np.array(rows_b)


class Polyhedron:
    """Convex polyhedron with lazily synchronized H- and V-representations.

    The V-representation is (vertices, rays): conv(vertices) + cone(rays).
    Nonempty iff the vertex list is nonempty.  Immutable by convention.
    """

    __slots__ = ("dim", "_A", "_b", "_V", "_R", "_faces")

    def __init__(self, dim, hrep=None, vrep=None):
        if dim < 1 or dim > MAX_DIM:
            raise UnsupportedDimension(f"dim {dim} outside 1..{MAX_DIM}")
        self.dim = int(dim)
        self._A = self._b = self._V = self._R = None
        self._faces = None
        if hrep is not None:
            A = np.asarray(hrep[0], dtype=float).reshape(-1, dim)
            b = np.asarray(hrep[1], dtype=float).reshape(-1)
            norm = _normalize_hrep(A, b)
            if norm is None:
                self._V = np.zeros((0, dim))
                self._R = np.zeros((0, dim))
                A = np.zeros((2, dim))
                A[0, 0], A[1, 0] = 1.0, -1.0
                self._A, self._b = A, np.array([-1.0, -1.0])
            else:
                self._A, self._b = norm
        if vrep is not None:
            V = np.asarray(vrep[0], dtype=float).reshape(-1, dim)
            R = vrep[1] if len(vrep) > 1 and vrep[1] is not None else np.zeros((0, dim))
            R = np.asarray(R, dtype=float).reshape(-1, dim)
            if len(R):
                nr = np.linalg.norm(R, axis=1)
                R = R[nr > GEOM_TOL] / nr[nr > GEOM_TOL][:, None]
            self._V, self._R = V, R
        if self._A is None and self._V is None:
            raise ValueError("need hrep or vrep")

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_hrep(cls, A, b):
        A = np.asarray(A, dtype=float)
        A = A.reshape(-1, A.shape[-1]) if A.ndim == 2 else A.reshape(-1, 1)
        return cls(A.shape[1], hrep=(A, b))

    @classmethod
    def from_vrep(cls, V, R=None):
        V = np.asarray(V, dtype=float)
        V = V.reshape(-1, V.shape[-1]) if V.ndim == 2 else V.reshape(-1, 1)
        return cls(V.shape[1], vrep=(V, R))

    @classmethod
    def point(cls, p):
        p = as_point(p)
        return cls.from_vrep(p.reshape(1, -1))

    @classmethod
    def box(cls, lo, hi):
        lo, hi = as_point(lo), as_point(hi)
        d = len(lo)
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([hi, -lo])
        return cls(d, hrep=(A, b))

    @classmethod
    def interval(cls, lo, hi):
        return cls.box([lo], [hi])

    # -- representations ----------------------------------------------------
    @property
    def hrep(self):
        if self._A is None:
            self._A, self._b = _facets_from_generators(self._V, self._R)
        return self._A, self._b

    @property
    def vrep(self):
        if self._V is None:
            self._V, self._R = _generators_from_facets(self._A, self._b)
        return self._V, self._R

    @property
    def vertices(self):
        return self.vrep[0]

    @property
    def rays(self):
        return self.vrep[1]

    @property
    def is_empty(self):
        return len(self.vrep[0]) == 0

    @property
    def is_bounded(self):
        return len(self.vrep[1]) == 0

    def is_cone(self, tol=1e-7):
        V, _ = self.vrep
        return len(V) > 0 and float(np.max(np.abs(V))) <= tol

    # -- predicates ---------------------------------------------------------
    def contains(self, X, tol=None):
        X = _as_points(X, self.dim)
        if self.is_empty:
            return np.zeros(len(X), dtype=bool)
        A, b = self.hrep
        if len(A) == 0:
            return np.ones(len(X), dtype=bool)
        t = (_FEAS_FACTOR * GEOM_TOL if tol is None else tol)
        slack = t * (1.0 + np.max(np.abs(X), axis=1, initial=0.0))
        return np.all(X @ A.T - b[None, :] <= slack[:, None], axis=1)

    def _face_projectors(self):
        """Cached (rows, W) data for projection onto every face's affine hull."""
        if self._faces is not None:
            return self._faces
        A, b = self.hrep
        m, d = A.shape
        faces = [(np.zeros((0, d)), np.zeros(0), None)]
        max_size = min(m, d)
        budget = sum(math.comb(m, s) for s in range(1, max_size + 1))
        if budget > _SUBSET_BUDGET:
            raise ComplexityBudgetExceeded(f"face enumeration over {budget} subsets")
        for size in range(1, max_size + 1):
            for S in itertools.combinations(range(m), size):
                AS = A[list(S)]
                G = AS @ AS.T
                if abs(np.linalg.det(G)) < 1e-12:
                    continue
                W = np.linalg.solve(G, AS)   # (size, d); proj = x - AS^T G^{-1} (AS x - bS)
                faces.append((AS, b[list(S)], W))
        self._faces = faces
        return faces

    def dist(self, X):
        """Euclidean distances from the rows of X to the polyhedron."""
        X = _as_points(X, self.dim)
        if self.is_empty:
            return np.full(len(X), np.inf)
        A, b = self.hrep
        if len(A) == 0:
            return np.zeros(len(X))
        best = np.full(len(X), np.inf)
        scale = 1.0 + np.max(np.abs(X), initial=0.0)
        ftol = _FEAS_FACTOR * GEOM_TOL * scale
        for AS, bS, W in self._face_projectors():
            if W is None:
                P = X
            else:
                P = X - (X @ AS.T - bS[None, :]) @ W
            feas = np.all(P @ A.T - b[None, :] <= ftol, axis=1)
            if np.any(feas):
                dd = np.linalg.norm(X - P, axis=1)
                best = np.where(feas & (dd < best), dd, best)
        return best

    def support(self, u):
        u = as_point(u, self.dim)
        if self.is_empty:
            raise EmptyRegion("support of empty polyhedron")
        V, R = self.vrep
        if len(R) and np.max(R @ u) > GEOM_TOL:
            return math.inf
        return float(np.max(V @ u))

    # -- transformations ----------------------------------------------------
    def translate(self, t):
        t = as_point(t, self.dim)
        V, R = self.vrep
        P = Polyhedron(self.dim, vrep=(V + t, R.copy()))
        if self._A is not None:
            P._A = self._A
            P._b = self._b + self._A @ t
        return P

    def linear_image(self, M):
        """Image under x -> M x (exact on the V-representation)."""
        M = np.asarray(M, dtype=float)
        if M.shape[1] != self.dim:
            raise DimensionMismatch("linear map shape mismatch")
        V, R = self.vrep
        return Polyhedron(M.shape[0], vrep=(V @ M.T, R @ M.T))

    def scale(self, s):
        V, R = self.vrep
        if s < 0:
            return Polyhedron(self.dim, vrep=(V * s, -R))
        if s == 0:
            if self.is_empty:
                return self
            return Polyhedron.point(np.zeros(self.dim))
        return Polyhedron(self.dim, vrep=(V * s, R))

    def project(self, coords):
        """Orthogonal projection onto the listed coordinates."""
        coords = list(coords)
        V, R = self.vrep
        return Polyhedron(len(coords), vrep=(V[:, coords], R[:, coords]))

    def slice(self, fixed, values):
        """Intersect with {x[fixed] = values} and drop those coordinates."""
        fixed = list(fixed)
        values = as_point(values, len(fixed))
        free = [i for i in range(self.dim) if i not in fixed]
        if not free:
            raise DimensionMismatch("slice must leave at least one coordinate")
        A, b = self.hrep
        if len(A) == 0:
            return Polyhedron(len(free), hrep=(np.zeros((0, len(free))), np.zeros(0)))
        Af = A[:, free]
        bf = b - A[:, fixed] @ values
        stol = _DEDUP_FACTOR * GEOM_TOL * float(1 + np.max(np.abs(values), initial=0.0))
        norms = np.linalg.norm(Af, axis=1)
        degenerate = norms <= GEOM_TOL
        if np.any(degenerate) and np.any(bf[degenerate] < -stol):
            P = Polyhedron(len(free), vrep=(np.zeros((0, len(free))), None))
            return P
        return Polyhedron(len(free), hrep=(Af[~degenerate], bf[~degenerate]))

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("intersect dims differ")
        if self.is_empty:
            return self
        if other.is_empty:
            return other
        A1, b1 = self.hrep
        A2, b2 = other.hrep
        return Polyhedron(self.dim, hrep=(np.vstack([A1, A2]), np.concatenate([b1, b2])))

    def minkowski(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("minkowski dims differ")
        if self.is_empty or other.is_empty:
            return Polyhedron(self.dim, vrep=(np.zeros((0, self.dim)), None))
        V1, R1 = self.vrep
        V2, R2 = other.vrep
        V = (V1[:, None, :] + V2[None, :, :]).reshape(-1, self.dim)
        V = _dedup_rows(V, _DEDUP_FACTOR * GEOM_TOL * float(1 + np.max(np.abs(V))))
        R = _dedup_rows(np.vstack([R1, R2]), 1e-9) if len(R1) + len(R2) else R1
        return Polyhedron(self.dim, vrep=(V, R))

    def __repr__(self):
        if self.is_empty:
            return f"Polyhedron(dim={self.dim}, empty)"
        V, R = self.vrep
        return f"Polyhedron(dim={self.dim}, verts={len(V)}, rays={len(R)})"


class Region:
    """Finite union of polyhedra sharing one ambient dimension.

    An empty piece list is the empty set.  Region values are what set-valued
    maps produce; most operations distribute over the pieces.
    """

    __slots__ = ("dim", "pieces")

    def __init__(self, dim, pieces=()):
        self.dim = int(dim)
        kept = []
        for p in pieces:
            if p.dim != dim:
                raise DimensionMismatch("region piece dim mismatch")
            if not p.is_empty:
                kept.append(p)
        if len(kept) > _PIECE_BUDGET:
            raise ComplexityBudgetExceeded(f"{len(kept)} pieces > {_PIECE_BUDGET}")
        self.pieces = tuple(kept)

    @classmethod
    def from_polyhedron(cls, P):
        return cls(P.dim, (P,))

    @classmethod
    def point(cls, p):
        p = as_point(p)
        return cls(len(p), (Polyhedron.point(p),))

    @classmethod
    def points(cls, X):
        X = np.asarray(X, dtype=float)
        X = X.reshape(-1, X.shape[-1]) if X.ndim == 2 else X.reshape(-1, 1)
        return cls(X.shape[1], tuple(Polyhedron.point(x) for x in X))

    @classmethod
    def interval(cls, lo, hi):
        return cls(1, (Polyhedron.interval(lo, hi),))

    @classmethod
    def empty(cls, dim):
        return cls(dim, ())

    @property
    def is_empty(self):
        return len(self.pieces) == 0

    @property
    def is_bounded(self):
        return all(p.is_bounded for p in self.pieces)

    def dist(self, X):
        X = _as_points(X, self.dim)
        if self.is_empty:
            return np.full(len(X), np.inf)
        best = np.full(len(X), np.inf)
        for p in self.pieces:
            best = np.minimum(best, p.dist(X))
        return best

    def contains(self, X, tol=None):
        X = _as_points(X, self.dim)
        out = np.zeros(len(X), dtype=bool)
        for p in self.pieces:
            out |= p.contains(X, tol)
        return out

    def support(self, u):
        if self.is_empty:
            raise EmptyRegion("support of empty region")
        vals = [p.support(u) for p in self.pieces]
        return math.inf if any(math.isinf(v) for v in vals) else max(vals)

    def translate(self, t):
        return Region(self.dim, tuple(p.translate(t) for p in self.pieces))

    def linear_image(self, M):
        M = np.asarray(M, dtype=float)
        return Region(M.shape[0], tuple(p.linear_image(M) for p in self.pieces))

    def scale(self, s):
        return Region(self.dim, tuple(p.scale(s) for p in self.pieces))

    def negate(self):
        return self.linear_image(-np.eye(self.dim))

    def union(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("union dims differ")
        return Region(self.dim, self.pieces + other.pieces)

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("intersect dims differ")
        out = []
        for p in self.pieces:
            for q in other.pieces:
                out.append(p.intersect(q))
        return Region(self.dim, tuple(out))

    def minkowski(self, other):
        return minkowski_sum(self, other)

    def slice(self, fixed, values):
        new_dim = self.dim - len(list(fixed))
        return Region(new_dim, tuple(p.slice(fixed, values) for p in self.pieces))

    def project(self, coords):
        coords = list(coords)
        return Region(len(coords), tuple(p.project(coords) for p in self.pieces))

    def truncate(self, ball, level=4):
        """Intersect with a circumscribed polyhedral approximation of a ball."""
        B = ball_polyhedron(ball.center, ball.radius, self.dim, level=level)
        return self.intersect(Region.from_polyhedron(B))

    def vertices_all(self):
        if self.is_empty:
            return np.zeros((0, self.dim))
        return np.vstack([p.vertices for p in self.pieces])

    def sample_points(self, per_edge=3, cap=400):
        """Vertices plus interior chords per piece (bounded pieces assumed)."""
        pts = []
        for p in self.pieces:
            V = p.vertices
            pts.append(V)
            n = len(V)
            if n >= 2:
                ws = np.linspace(0.0, 1.0, per_edge + 2)[1:-1]
                pair_idx = list(itertools.combinations(range(n), 2))
                if len(pair_idx) * len(ws) > cap:
                    pair_idx = pair_idx[: max(1, cap // max(1, len(ws)))]
                for i, j in pair_idx:
                    for w in ws:
                        pts.append(((1 - w) * V[i] + w * V[j]).reshape(1, -1))
            if n >= 3:
                pts.append(np.mean(V, axis=0, keepdims=True))
        if not pts:
            return np.zeros((0, self.dim))
        X = np.vstack(pts)
        if len(X) > cap:
            stride = int(np.ceil(len(X) / cap))
            X = X[::stride]
        return X

    def __repr__(self):
        return f"Region(dim={self.dim}, pieces={len(self.pieces)})"


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if self.radius < 0:
            raise ValueError("negative radius")

    @property
    def dim(self):
        return len(self.center)


_POLYBALL_CACHE = {}


def _ball_directions(dim, level):
    n = 2 * dim * level
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = np.arange(n) * (2 * np.pi / n)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    # dim 3/4: deterministic low-discrepancy directions, antipodally symmetric
    half = n // 2
    rng = np.random.default_rng(20240229 + dim)
    pts = rng.standard_normal((half, dim))
    if dim == 3:
        # Fibonacci hemisphere gives a better spread than Gaussian draws
        i = np.arange(half) + 0.5
        phi = np.arccos(1 - i / half)          # polar angle in [0, pi/2)
        theta = np.pi * (1 + 5 ** 0.5) * i
        pts = np.stack([np.sin(phi) * np.cos(theta),
                        np.sin(phi) * np.sin(theta),
                        np.cos(phi)], axis=1)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return np.vstack([pts, -pts])


def unit_polyball(dim, level=8):
    """Circumscribed polyhedral unit ball and its over-approximation factor.

    Returns (Polyhedron, factor) with B_2 ⊆ P ⊆ factor * B_2.  Exact in 1-D.
    """
    key = (dim, level)
    if key in _POLYBALL_CACHE:
        return _POLYBALL_CACHE[key]
    U = _ball_directions(dim, level)
    if dim == 1:
        P = Polyhedron.interval(-1.0, 1.0)
        out = (P, 1.0)
    else:
        P = Polyhedron(dim, hrep=(U, np.ones(len(U))))
        # vertices of {u_i . x <= 1} are facet_normal/offset of conv(u_i)
        hull = ConvexHull(U)
        Vs = []
        for eq in hull.equations:
            a, off = eq[:-1], eq[-1]
            h = -off
            if h > GEOM_TOL:
                Vs.append(a / h)
        V = _dedup_rows(np.array(Vs), 1e-9)
        P._V, P._R = V, np.zeros((0, dim))
        out = (P, float(np.max(np.linalg.norm(V, axis=1))))
    _POLYBALL_CACHE[key] = out
    return out


def ball_polyhedron(center, radius, dim=None, level=8):
    center = as_point(center, dim)
    P, _ = unit_polyball(len(center), level)
    return P.scale(float(radius)).translate(center)


def ball_region(center, radius, dim=None, level=8):
    return Region.from_polyhedron(ball_polyhedron(center, radius, dim, level))


# -- module-level operations ------------------------------------------------

def extreme_points(X, tol=1e-7):
    """Extreme points of conv(rows of X), robust to affine degeneracy."""
    X = np.asarray(X, dtype=float)
    X = X.reshape(-1, X.shape[-1]) if X.ndim == 2 else X.reshape(-1, 1)
    X = _dedup_rows(X, tol)
    if len(X) <= 1:
        return X
    x0 = X[0]
    E = _row_space(X - x0, tol)
    k = E.shape[1]
    if k == 0:
        return X[:1]
    Y = (X - x0) @ E
    if k == 1:
        lo, hi = int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))
        return X[[lo, hi]] if lo != hi else X[[lo]]
    try:
        hull = ConvexHull(Y)
        return X[sorted(set(hull.vertices))]
    except QhullError:
        P = Polyhedron.from_vrep(Y)
        Vk = P.vertices
        return np.array([x0 + v @ E.T for v in Vk])


def dist_point_region(p, R):
    """Euclidean distance from a point to a nonempty region (exact projection)."""
    if R.is_empty:
        raise EmptyRegion("distance to empty region")
    p = as_point(p, R.dim)
    return float(R.dist(p.reshape(1, -1))[0])


def hausdorff(C, D, truncation=None, per_edge=3):
    """Pompieu-Hausdorff distance, truncating both regions when unbounded."""
    if C.is_empty or D.is_empty:
        raise EmptyRegion("hausdorff of empty region")
    if not (C.is_bounded and D.is_bounded):
        if truncation is None:
            raise UnboundedWithoutTruncation("unbounded region needs a truncation ball")
        C = C.truncate(truncation)
        D = D.truncate(truncation)
        if C.is_empty or D.is_empty:
            raise EmptyRegion("truncation emptied a region")
    PC = C.sample_points(per_edge)
    PD = D.sample_points(per_edge)
    return float(max(D.dist(PC).max(), C.dist(PD).max()))


def minkowski_sum(A, B):
    """Region Minkowski sum (piece-pairwise on V-representations)."""
    if A.dim != B.dim:
        raise DimensionMismatch("minkowski dims differ")
    if A.is_empty or B.is_empty:
        return Region.empty(A.dim)
    if len(A.pieces) * len(B.pieces) > _PIECE_BUDGET:
        raise ComplexityBudgetExceeded("minkowski piece budget")
    out = []
    for p in A.pieces:
        for q in B.pieces:
            out.append(p.minkowski(q))
    return Region(A.dim, tuple(out))


def support(R, u):
    """Support function sup_{x in R} <u, x>; +inf along recession directions."""
    return R.support(u)


def gauge(C, w, lam_max=1e9):
    """Minkowski gauge min{lam >= 0 : w in lam*C} for a convex region C."""
    if C.is_empty:
        raise EmptyRegion("gauge of empty region")
    if len(C.pieces) != 1:
        raise ValueError("gauge needs a convex (single-piece) region")
    P = C.pieces[0]
    w = as_point(w, C.dim)
    if float(np.linalg.norm(w)) <= GEOM_TOL:
        return 0.0
    A, b = P.hrep
    if len(A) == 0:
        return 0.0
    if np.all(b >= -GEOM_TOL):  # 0 in C: exact facet-ratio formula
        lam = 0.0
        for a, bb in zip(A, b):
            s = float(a @ w)
            if bb > GEOM_TOL:
                lam = max(lam, s / bb)
            elif s > _FEAS_FACTOR * GEOM_TOL * (1 + float(np.max(np.abs(w)))):
                raise NotReachable("w outside cone(C)")
        return max(lam, 0.0)
    # 0 not in C: search lam with w in lam*C by membership tests
    lam = 1e-6
    while lam <= lam_max:
        if P.scale(lam).contains(w.reshape(1, -1))[0]:
            lo, hi = lam / 10.0, lam
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if P.scale(mid).contains(w.reshape(1, -1))[0]:
                    hi = mid
                else:
                    lo = mid
            return hi
        lam *= 10.0
    raise NotReachable("no lam <= lam_max with w in lam*C")

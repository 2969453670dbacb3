"""Piecewise-affine map between two kite patterns with shared combinatorics.

Every kite is split along the diagonal joining its two white vertices; the
map is affine on each half and matches white and black vertices exactly,
which makes it continuous across all shared edges.  The dilatation of each
affine piece is the ratio of its singular values.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AngleMismatch, CombinatoricsMismatch, DegenerateTriangle,
                     NotEmbedded, OutsideDomain)
from .layout import CirclePattern, check_embedded, kite_corners


@dataclass(frozen=True)
class DiscreteConformalMap:
    source: CirclePattern
    target: CirclePattern
    tri_src: np.ndarray          # (T, 3, 2)
    tri_tgt: np.ndarray
    lin: np.ndarray              # (T, 2, 2) affine linear parts
    off: np.ndarray              # (T, 2) affine offsets
    grid: dict                   # (ix, iy) -> list of triangle indices
    cell: float
    lo: np.ndarray

    @property
    def n_triangles(self):
        return self.tri_src.shape[0]


def _triangles(pattern):
    c = kite_corners(pattern)
    t = np.empty((2 * c.shape[0], 3, 2))
    t[0::2, 0] = c[:, 0]
    t[0::2, 1] = c[:, 1]
    t[0::2, 2] = c[:, 2]
    t[1::2, 0] = c[:, 0]
    t[1::2, 1] = c[:, 2]
    t[1::2, 2] = c[:, 3]
    return t


def build_map(source: CirclePattern, target: CirclePattern,
              require_embedded=True) -> DiscreteConformalMap:
    """Assemble the affine pieces and a uniform point-location grid."""
    gs, gt = source.graph, target.graph
    if gs.bquad.quads != gt.bquad.quads or gs.vertices != gt.vertices:
        raise CombinatoricsMismatch("patterns live on different complexes")
    da = np.abs(np.asarray(source.alpha.alpha) - np.asarray(target.alpha.alpha))
    if float(np.max(da, initial=0.0)) > 1e-12:
        raise AngleMismatch("patterns carry different intersection angles")
    if require_embedded:
        for name, p in (("source", source), ("target", target)):
            ok, pair = check_embedded(p)
            if not ok:
                raise NotEmbedded(f"{name} pattern overlaps at kites {pair}")

    ts, tt = _triangles(source), _triangles(target)
    n = ts.shape[0]
    lin = np.empty((n, 2, 2))
    off = np.empty((n, 2))
    for k in range(n):
        ms = np.column_stack((ts[k, 1] - ts[k, 0], ts[k, 2] - ts[k, 0]))
        mt = np.column_stack((tt[k, 1] - tt[k, 0], tt[k, 2] - tt[k, 0]))
        det = ms[0, 0] * ms[1, 1] - ms[0, 1] * ms[1, 0]
        if abs(det) < 1e-30:
            raise DegenerateTriangle(f"source triangle {k} has zero area")
        lin[k] = mt @ np.linalg.inv(ms)
        off[k] = tt[k, 0] - lin[k] @ ts[k, 0]

    lo = ts.reshape(-1, 2).min(axis=0)
    hi = ts.reshape(-1, 2).max(axis=0)
    cell = float(max(hi - lo)) / max(8, int(math.sqrt(n))) or 1.0
    grid = {}
    for k in range(n):
        tlo = np.floor((ts[k].min(axis=0) - lo) / cell).astype(int)
        thi = np.floor((ts[k].max(axis=0) - lo) / cell).astype(int)
        for ix in range(tlo[0], thi[0] + 1):
            for iy in range(tlo[1], thi[1] + 1):
                grid.setdefault((ix, iy), []).append(k)
    return DiscreteConformalMap(source, target, ts, tt, lin, off, grid, cell, lo)


def _barycentric_min(tri, z):
    """Smallest barycentric coordinate of z in the triangle (signed)."""
    a, b, c = tri
    m = np.column_stack((b - a, c - a))
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0:
        return -math.inf
    rhs = z - a
    u = (m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det
    v = (-m[1, 0] * rhs[0] + m[0, 0] * rhs[1]) / det
    return min(u, v, 1.0 - u - v)


def locate(dmap: DiscreteConformalMap, z, snap=None):
    """Index of the first triangle containing z, within the snap tolerance."""
    z = np.asarray(z, dtype=float)
    if snap is None:
        snap = 1e-9 * dmap.source.diameter()
    key = tuple(np.floor((z - dmap.lo) / dmap.cell).astype(int))
    best, best_val = None, -math.inf
    for k in dmap.grid.get(key, ()):
        val = _barycentric_min(dmap.tri_src[k], z)
        if val >= 0.0:
            return k
        if val > best_val:
            best, best_val = k, val
    # exhaustive fallback for boundary points straddling grid cells
    for k in range(dmap.n_triangles):
        val = _barycentric_min(dmap.tri_src[k], z)
        if val >= 0.0:
            return k
        if val > best_val:
            best, best_val = k, val
    if best is not None and _point_triangle_dist(dmap.tri_src[best], z) <= snap:
        return best
    raise OutsideDomain(f"point {tuple(z)} lies outside the kite union")


def _point_triangle_dist(tri, z):
    if _barycentric_min(tri, z) >= 0.0:
        return 0.0
    d = math.inf
    for i in range(3):
        a, b = tri[i], tri[(i + 1) % 3]
        ab = b - a
        t = float(np.dot(z - a, ab) / max(np.dot(ab, ab), 1e-300))
        t = min(1.0, max(0.0, t))
        d = min(d, float(np.hypot(*(a + t * ab - z))))
    return d


def eval_map(dmap: DiscreteConformalMap, z):
    """Image of a point of the source kite union."""
    z = np.asarray(z, dtype=float)
    k = locate(dmap, z)
    return dmap.lin[k] @ z + dmap.off[k]


def eval_many(dmap, points):
    return np.array([eval_map(dmap, z) for z in points])


@dataclass(frozen=True)
class DilatationReport:
    per_triangle: np.ndarray
    max: float
    singular_values: np.ndarray   # (T, 2), descending


def dilatation(dmap: DiscreteConformalMap) -> DilatationReport:
    """Quasiconformal dilatation K = sigma1/sigma2 per affine piece."""
    sv = np.linalg.svd(dmap.lin, compute_uv=False)
    if np.any(sv[:, 1] <= 1e-300):
        bad = int(np.argmin(sv[:, 1]))
        raise DegenerateTriangle(f"target triangle {bad} is singular")
    k = sv[:, 0] / sv[:, 1]
    return DilatationReport(k, float(np.max(k)), sv)


@dataclass(frozen=True)
class RatioFunction:
    """Pointwise target/source radius quotient on the white vertices."""

    vertices: tuple
    u: np.ndarray

    def value(self, v):
        return float(self.u[self.vertices.index(v)])


def ratio_function(source: CirclePattern, target: CirclePattern) -> RatioFunction:
    if source.graph.vertices != target.graph.vertices:
        raise CombinatoricsMismatch("patterns live on different vertex sets")
    return RatioFunction(tuple(source.graph.vertices),
                         target.radii / source.radii)


def sup_error(dmap: DiscreteConformalMap, reference, samples, similarity=None):
    """Max deviation from a reference map over sample points.

    similarity = (a, b) post-composes the discrete map with z -> a*z + b
    (complex coefficients), normalizing away the free similarity.
    """
    worst = 0.0
    for z in samples:
        w = eval_map(dmap, z)
        wc = complex(w[0], w[1])
        if similarity is not None:
            a, b = similarity
            wc = a * wc + b
        ref = reference(complex(z[0], z[1]))
        worst = max(worst, abs(wc - ref))
    return worst


def anchor_similarity(dmap: DiscreteConformalMap, reference):
    """Similarity matching the reference at the anchor edge's endpoints."""
    graph = dmap.source.graph
    root = dmap.source.anchor[0]
    ref_edge = min(eid for eid, _ in graph.neighbors(root))
    other = graph.other_end(ref_edge, root)
    z0 = complex(*dmap.source.center(root))
    z1 = complex(*dmap.source.center(other))
    w0 = complex(*dmap.target.center(root))
    w1 = complex(*dmap.target.center(other))
    a = (reference(z1) - reference(z0)) / (w1 - w0)
    b = reference(z0) - a * w0
    return a, b

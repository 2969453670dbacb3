"""Realize a solved radius function as circles and kites in the plane.

Placement is a breadth-first traversal: once one edge direction is known at
a vertex, the ccw fan of kite half-angles determines every other incident
direction, and neighbors sit at the kite center-distance along their edge
direction.  Non-tree edges are never used for placement; their position
mismatch is the closure diagnostic.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon
from shapely.strtree import STRtree

from . import kernel
from .bquad import Labelling, WhiteGraph
from .errors import NotASolution
from .euclid import residual_vector

CLOSURE_REL_TOL = 1e-8
EMBED_REL_TOL = 1e-9


@dataclass(frozen=True)
class CirclePattern:
    """Embedded (or immersed) pattern: centers, radii, intersection points."""

    graph: WhiteGraph
    alpha: Labelling
    rho: np.ndarray
    centers: np.ndarray          # (n, 2), aligned with graph.vertices
    radii: np.ndarray
    black: dict                  # black vertex id -> (2,) point
    anchor: tuple                # (root vertex, (x, y), direction angle)
    tree_edges: frozenset
    closure: dict                # non-tree edge id -> position mismatch

    def center(self, v):
        return self.centers[self.graph.index(v)]

    def radius(self, v):
        return float(self.radii[self.graph.index(v)])

    def diameter(self):
        pts = np.vstack([self.centers] + [p[None, :] for p in self.black.values()])
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(*span)) or 1.0


def _fan_directions(graph, alpha, rho, w, eid_known, dir_known):
    """Directions of all edges at w given one known edge direction."""
    fan = graph.fans[w]
    iw = graph.index(w)
    halfs = []
    for eid in fan:
        u = graph.other_end(eid, w)
        halfs.append(kernel.f_theta(alpha.alpha[eid], rho[graph.index(u)] - rho[iw]))
    k = fan.index(eid_known)
    dirs = {eid_known: dir_known}
    d = dir_known
    for j in range(k, k + len(fan) - 1):
        a, b = j % len(fan), (j + 1) % len(fan)
        if not graph.fan_closed[w] and b == 0:
            break
        d = d + halfs[a] + halfs[b]
        dirs[fan[b]] = d
    if not graph.fan_closed[w]:
        d = dir_known
        for j in range(k, 0, -1):
            d = d - halfs[j] - halfs[j - 1]
            dirs[fan[j - 1]] = d
    return dirs


def layout(graph: WhiteGraph, alpha: Labelling, rho, anchor=None,
           check=True) -> CirclePattern:
    """Place circle centers and intersection points for a solved pattern.

    anchor = (root vertex, root position, direction of the root's lowest-id
    incident edge); defaults to (min vertex, origin, 0).  With check=True a
    residual above 1e-8 raises NotASolution; diagnostics may disable it.
    """
    rho = np.asarray(rho, dtype=float)
    if check:
        res = residual_vector(graph, alpha, rho)
        if res.size and float(np.max(np.abs(res))) > 1e-8:
            raise NotASolution(
                f"angle-sum residual {float(np.max(np.abs(res))):.3e}; "
                "layout would not close")
    if anchor is None:
        anchor = (min(graph.vertices), (0.0, 0.0), 0.0)
    root, rpos, rdir = anchor
    ref_edge = min(eid for eid, _ in graph.neighbors(root))

    n = len(graph.vertices)
    centers = np.full((n, 2), np.nan)
    radii = np.exp(rho)
    edge_dirs = {}
    centers[graph.index(root)] = rpos
    edge_dirs.update({(root, eid): d for eid, d in
                      _fan_directions(graph, alpha, rho, root, ref_edge,
                                      float(rdir)).items()})
    placed = {root}
    tree = set()
    closure = {}
    queue = deque([root])
    while queue:
        w = queue.popleft()
        cw = centers[graph.index(w)]
        for eid, u in sorted(graph.neighbors(w)):
            psi = edge_dirs[(w, eid)]
            L = kernel.kite_L_vec(alpha.alpha[eid], radii[graph.index(w)],
                                  radii[graph.index(u)])
            target = cw + L * np.array([math.cos(psi), math.sin(psi)])
            if u not in placed:
                centers[graph.index(u)] = target
                back = psi + math.pi
                edge_dirs.update({(u, e): d for e, d in
                                  _fan_directions(graph, alpha, rho, u, eid,
                                                  back).items()})
                placed.add(u)
                tree.add(eid)
                queue.append(u)
            elif eid not in tree:
                gap = float(np.hypot(*(target - centers[graph.index(u)])))
                closure[eid] = max(closure.get(eid, 0.0), gap)
    if len(placed) != n:
        raise ValueError("white graph is not connected; cannot lay out")

    black = {}
    for eid, q in enumerate(graph.bquad.quads):
        w0, b0, w1, b1 = q
        psi = edge_dirs[(w0, eid)]
        r0 = radii[graph.index(w0)]
        h = kernel.f_theta(alpha.alpha[eid],
                           rho[graph.index(w1)] - rho[graph.index(w0)])
        c0 = centers[graph.index(w0)]
        for b, ang in ((b0, psi - h), (b1, psi + h)):
            if b not in black:
                black[b] = c0 + r0 * np.array([math.cos(ang), math.sin(ang)])
    return CirclePattern(graph, alpha, rho, centers, radii, black,
                         (root, tuple(map(float, rpos)), float(rdir)),
                         frozenset(tree), closure)


def black_point_constructions(pattern: CirclePattern):
    """Every geometric construction of every black point, keyed by vertex.

    Each incident quad determines the point twice, once from each white
    endpoint; a clean layout makes all constructions agree.
    """
    graph = pattern.graph
    out = {b: [] for b in pattern.black}
    for eid, q in enumerate(graph.bquad.quads):
        w0, b0, w1, b1 = q
        for w, first, second in ((w0, b0, b1), (w1, b1, b0)):
            other = graph.other_end(eid, w)
            h = kernel.f_theta(pattern.alpha.alpha[eid],
                               pattern.rho[graph.index(other)]
                               - pattern.rho[graph.index(w)])
            base = _edge_direction(pattern, eid, w)
            c = pattern.centers[graph.index(w)]
            r = pattern.radii[graph.index(w)]
            out[first].append(c + r * np.array([math.cos(base - h),
                                                math.sin(base - h)]))
            out[second].append(c + r * np.array([math.cos(base + h),
                                                 math.sin(base + h)]))
    return out


def _edge_direction(pattern, eid, w):
    u = pattern.graph.other_end(eid, w)
    d = pattern.centers[pattern.graph.index(u)] - pattern.centers[pattern.graph.index(w)]
    return math.atan2(d[1], d[0])


def closure_residual(pattern: CirclePattern):
    """Max non-tree position mismatch and the per-edge table."""
    worst = max(pattern.closure.values()) if pattern.closure else 0.0
    return worst, dict(pattern.closure)


def kite_corners(pattern: CirclePattern) -> np.ndarray:
    """(E, 4, 2) corner array per kite: center, black, center, black (ccw)."""
    graph = pattern.graph
    out = np.empty((len(graph.edges), 4, 2))
    for eid, (w0, b0, w1, b1) in enumerate(graph.bquad.quads):
        out[eid, 0] = pattern.centers[graph.index(w0)]
        out[eid, 1] = pattern.black[b0]
        out[eid, 2] = pattern.centers[graph.index(w1)]
        out[eid, 3] = pattern.black[b1]
    return out


@dataclass(frozen=True)
class KitePattern:
    pattern: CirclePattern
    corners: np.ndarray

    @classmethod
    def from_pattern(cls, pattern):
        return cls(pattern, kite_corners(pattern))


def kite_orientations(kp: KitePattern) -> np.ndarray:
    """Signed area per kite; positive means counterclockwise."""
    c = kp.corners
    x, y = c[:, :, 0], c[:, :, 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y,
                        axis=1)


def check_embedded(pattern: CirclePattern):
    """Pairwise open-kite disjointness with adjacency-aware contact rules.

    Returns (True, None) or (False, (i, j)) with the first offending pair in
    lexicographic order.  Kites sharing a complex vertex may touch along
    shared boundary; any positive-area overlap offends.
    """
    corners = kite_corners(pattern)
    diam = pattern.diameter()
    area_tol = (EMBED_REL_TOL * diam) ** 2
    touch_tol = EMBED_REL_TOL * diam
    polys = [Polygon(corners[i]) for i in range(corners.shape[0])]
    quads = pattern.graph.bquad.quads
    tree = STRtree(polys)
    for i, p in enumerate(polys):
        for j in sorted(tree.query(p)):
            if j <= i:
                continue
            inter = p.intersection(polys[j])
            if inter.is_empty:
                continue
            if inter.area > area_tol:
                return False, (i, int(j))
            if not (set(quads[i]) & set(quads[int(j)])) and inter.length > touch_tol:
                return False, (i, int(j))
    return True, None


# --- SVG ----------------------------------------------------------------------

def _fmt(v):
    return f"{v:.9f}"


def to_svg(pattern: CirclePattern, width=640, draw_circles=True,
           draw_kites=True, draw_vertices=True) -> str:
    """Deterministic SVG 1.1 rendering: circles, kites, bicolored vertices."""
    graph = pattern.graph
    pts = [pattern.centers[graph.index(v)] for v in graph.vertices]
    pts += [pattern.black[b] for b in sorted(pattern.black)]
    if pts:
        arr = np.array(pts)
        rmax = float(np.max(pattern.radii)) if len(pattern.radii) else 0.0
        lo = arr.min(axis=0) - rmax
        hi = arr.max(axis=0) + rmax
    else:
        lo = np.array([0.0, 0.0])
        hi = np.array([1.0, 1.0])
    span = np.maximum(hi - lo, 1e-9)
    scale = (width - 20) / float(max(span))
    height = int(math.ceil(span[1] * scale)) + 20

    def sx(p):
        return _fmt(10 + (p[0] - lo[0]) * scale)

    def sy(p):
        return _fmt(height - 10 - (p[1] - lo[1]) * scale)

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{width}" height="{height}" '
               f'viewBox="0 0 {width} {height}">')
    out.append('<rect width="100%" height="100%" fill="#ffffff"/>')
    if draw_kites:
        corners = kite_corners(pattern)
        for eid in range(corners.shape[0]):
            d = " ".join(f"{sx(c)},{sy(c)}" for c in corners[eid])
            out.append(f'<path d="M {d} Z" fill="#dce8f5" stroke="#333333" '
                       f'stroke-width="0.7"/>')
    if draw_circles:
        for v in graph.vertices:
            c = pattern.centers[graph.index(v)]
            r = _fmt(pattern.radii[graph.index(v)] * scale)
            out.append(f'<circle cx="{sx(c)}" cy="{sy(c)}" r="{r}" fill="none" '
                       f'stroke="#1f77b4" stroke-width="0.8"/>')
    if draw_vertices:
        for v in graph.vertices:
            c = pattern.centers[graph.index(v)]
            out.append(f'<circle cx="{sx(c)}" cy="{sy(c)}" r="2.2" '
                       f'fill="#ffffff" stroke="#000000" stroke-width="0.8"/>')
        for b in sorted(pattern.black):
            c = pattern.black[b]
            out.append(f'<circle cx="{sx(c)}" cy="{sy(c)}" r="2.2" '
                       f'fill="#000000" stroke="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

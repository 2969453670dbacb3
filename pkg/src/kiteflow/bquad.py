"""Bipartite quad complexes, their white graphs, and angle labellings.

A b-quad-graph is a strongly regular cell decomposition by quadrilaterals
whose 1-skeleton is bipartite; white corners carry circle centers, black
corners carry intersection points.  Quads are stored counterclockwise with
white corners first and third, which fixes all rotation conventions used by
the layout module.
"""

import json
import math
from dataclasses import dataclass, field

from .errors import (AngleOutOfRange, DanglingEdge, NonBipartite,
                     NotStronglyRegular, ParseError)

ADMISSIBLE_TOL = 1e-12


@dataclass(frozen=True)
class BQuadGraph:
    """Validated bipartite quad complex with boundary flags."""

    white: tuple
    black: tuple
    quads: tuple                 # (w, b, w, b) corner ids, counterclockwise
    boundary_vertex: tuple       # bool per vertex id
    boundary_quad: tuple         # bool per quad

    @property
    def n_vertices(self):
        return len(self.white) + len(self.black)

    def interior_black(self):
        return tuple(b for b in self.black if not self.boundary_vertex[b])


@dataclass(frozen=True)
class Labelling:
    """Exterior intersection angle per quad, each in (0, pi)."""

    alpha: tuple

    def __post_init__(self):
        for i, a in enumerate(self.alpha):
            if not (0.0 < a < math.pi):
                raise AngleOutOfRange(f"alpha[{i}] = {a!r} outside (0, pi)")


@dataclass(frozen=True)
class WhiteGraph:
    """Graph of circle centers; edges are in bijection with quads."""

    bquad: BQuadGraph
    vertices: tuple              # white ids, ascending
    edges: tuple                 # (w0, w1) per quad, same index as quad
    interior: tuple
    boundary: tuple
    fans: dict                   # white id -> incident edge ids, ccw order
    fan_closed: dict             # white id -> bool
    _index: dict = field(default_factory=dict, repr=False)
    _adj: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index.update({v: i for i, v in enumerate(self.vertices)})
        adj = {v: [] for v in self.vertices}
        for eid, (a, b) in enumerate(self.edges):
            adj[a].append((eid, b))
            adj[b].append((eid, a))
        self._adj.update({v: tuple(x) for v, x in adj.items()})

    def index(self, v):
        return self._index[v]

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def other_end(self, eid, w):
        a, b = self.edges[eid]
        return b if w == a else a


def _quad_edges(q):
    w0, b0, w1, b1 = q
    return ((w0, b0), (b0, w1), (w1, b1), (b1, w0))


def _vertex_quads(quads):
    out = {}
    for qi, q in enumerate(quads):
        for v in q:
            out.setdefault(v, []).append(qi)
    return out


def _build_fan(quads, v, incident, start_corner, edge_quads):
    """Walk the quad fan around vertex v in ccw order.

    start_corner(q, v) gives the corner at which the quad begins its sweep
    at v; the fan steps across the complex edge (v, end_corner).  Returns
    (ordered quad ids, closed flag) or raises NotStronglyRegular when the
    link of v is not a single path or cycle.
    """
    start_of = {}
    for qi in incident:
        s, _ = start_corner(quads[qi], v)
        if s in start_of:
            raise NotStronglyRegular(
                f"vertex {v}: quads {start_of[s]} and {qi} start at the same edge")
        start_of[s] = qi

    def succ(qi):
        _, e = start_corner(quads[qi], v)
        others = [q for q in edge_quads[_key(v, e)] if q != qi]
        return others[0] if others else None

    # find a fan start: a quad whose starting edge is not another quad's end
    succ_of = {qi: succ(qi) for qi in incident}
    preds = {s: qi for qi, s in succ_of.items() if s is not None}
    starts = [qi for qi in incident if qi not in preds]
    closed = not starts
    cur = min(starts) if starts else min(incident)
    order = []
    seen = set()
    while cur is not None and cur not in seen:
        order.append(cur)
        seen.add(cur)
        cur = succ_of[cur]
    if len(order) != len(incident):
        raise NotStronglyRegular(f"vertex {v}: incident quads do not form one fan")
    return tuple(order), closed


def _key(a, b):
    return (a, b) if a < b else (b, a)


def build_bquad(quads):
    """Validate corner tuples and assemble a BQuadGraph.

    Corner tuples are (white, black, white, black), counterclockwise, with
    dense vertex ids over the union of both color classes.
    """
    quads = tuple(tuple(int(c) for c in q) for q in quads)
    if not quads:
        raise ParseError("empty quad list")
    white, black = set(), set()
    for qi, q in enumerate(quads):
        if len(q) != 4:
            raise ParseError(f"quad {qi} does not have 4 corners")
        if len(set(q)) != 4:
            raise NotStronglyRegular(f"quad {qi} has a repeated corner")
        white.update((q[0], q[2]))
        black.update((q[1], q[3]))
    clash = white & black
    if clash:
        raise NonBipartite(f"vertices used in both color classes: {sorted(clash)}")
    ids = white | black
    if ids != set(range(len(ids))):
        raise ParseError("vertex ids are not dense integers starting at 0")
    if len(set(quads)) != len(quads):
        raise NotStronglyRegular("duplicate quad")

    edge_quads = {}
    for qi, q in enumerate(quads):
        for a, b in _quad_edges(q):
            edge_quads.setdefault(_key(a, b), []).append(qi)
    for e, qs in edge_quads.items():
        if len(qs) > 2:
            raise DanglingEdge(f"edge {e} belongs to {len(qs)} quads")
    pair_count = {}
    for e, qs in edge_quads.items():
        if len(qs) == 2:
            p = tuple(sorted(qs))
            pair_count[p] = pair_count.get(p, 0) + 1
            if pair_count[p] > 1:
                raise NotStronglyRegular(f"quads {p} share more than one edge")

    # fan consistency at every vertex; records interior/boundary at once
    def white_start(q, v):
        w0, b0, w1, b1 = q
        return (b0, b1) if v == w0 else (b1, b0)

    def black_start(q, v):
        w0, b0, w1, b1 = q
        return (w1, w0) if v == b0 else (w0, w1)

    n = len(ids)
    vertex_quads = _vertex_quads(quads)
    boundary_vertex = [False] * n
    for v in sorted(ids):
        starter = white_start if v in white else black_start
        _, closed = _build_fan(quads, v, vertex_quads[v], starter, edge_quads)
        boundary_vertex[v] = not closed

    boundary_quad = tuple(
        any(len(edge_quads[_key(a, b)]) == 1 for a, b in _quad_edges(q))
        for q in quads)
    return BQuadGraph(tuple(sorted(white)), tuple(sorted(black)), quads,
                      tuple(boundary_vertex), boundary_quad)


def derive_white_graph(bq: BQuadGraph) -> WhiteGraph:
    """White graph with the ccw fan of incident edges at every vertex."""
    edges = tuple((q[0], q[2]) for q in bq.quads)
    edge_quads = {}
    for qi, q in enumerate(bq.quads):
        for a, b in _quad_edges(q):
            edge_quads.setdefault(_key(a, b), []).append(qi)

    def white_start(q, v):
        w0, b0, w1, b1 = q
        return (b0, b1) if v == w0 else (b1, b0)

    vertex_quads = _vertex_quads(bq.quads)
    fans, fan_closed = {}, {}
    for v in bq.white:
        order, closed = _build_fan(bq.quads, v, vertex_quads[v], white_start, edge_quads)
        fans[v] = order
        fan_closed[v] = closed
    interior = tuple(v for v in bq.white if not bq.boundary_vertex[v])
    boundary = tuple(v for v in bq.white if bq.boundary_vertex[v])
    return WhiteGraph(bq, tuple(bq.white), edges, interior, boundary,
                      fans, fan_closed)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    violations: tuple            # (black vertex, angle sum)


def check_admissible(bq: BQuadGraph, labelling: Labelling) -> AdmissibilityReport:
    """Angle sums at interior black vertices must equal 2*pi."""
    if len(labelling.alpha) != len(bq.quads):
        raise ParseError("labelling size does not match quad count")
    sums = {b: 0.0 for b in bq.black}
    for qi, q in enumerate(bq.quads):
        sums[q[1]] += labelling.alpha[qi]
        sums[q[3]] += labelling.alpha[qi]
    violations = []
    for b in bq.interior_black():
        if abs(sums[b] - 2.0 * math.pi) > ADMISSIBLE_TOL:
            violations.append((b, sums[b]))
    return AdmissibilityReport(not violations, tuple(violations))


def generate_square_grid(n, m, alpha0):
    """n x m grid of unit quads; vertices numbered row-major on the corners.

    Corner (i, j) gets id j*(n+1) + i and is white when i+j is even.  With
    alpha0 = pi/2 the labelling is admissible (interior black degree 4).
    """
    if n < 1 or m < 1:
        raise ParseError("grid sizes must be >= 1")

    def vid(i, j):
        return j * (n + 1) + i

    quads = []
    for j in range(m):
        for i in range(n):
            c = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))
            if (i + j) % 2 == 0:
                quads.append(c)
            else:
                quads.append((c[1], c[2], c[3], c[0]))
    bq = build_bquad(quads)
    return bq, Labelling(tuple(float(alpha0) for _ in quads))


def grid_coordinates(n, m):
    """Planar coordinates matching generate_square_grid's vertex numbering."""
    return {j * (n + 1) + i: (float(i), float(j))
            for j in range(m + 1) for i in range(n + 1)}


# serialization ---------------------------------------------------------------

def to_json_dict(bq: BQuadGraph, labelling: Labelling) -> dict:
    return {
        "white": list(bq.white),
        "black": list(bq.black),
        "quads": [list(q) for q in bq.quads],
        "alpha": list(labelling.alpha),
    }


def from_json_dict(doc):
    try:
        white = [int(v) for v in doc["white"]]
        black = [int(v) for v in doc["black"]]
        quads = [tuple(int(c) for c in q) for q in doc["quads"]]
        alpha = [float(a) for a in doc["alpha"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph document: {exc}") from exc
    declared = set(white) | set(black)
    used = {c for q in quads for c in q}
    if not used <= declared:
        raise ParseError(f"quads reference unknown vertices: {sorted(used - declared)}")
    if used != declared:
        raise ParseError(f"isolated vertices declared: {sorted(declared - used)}")
    bq = build_bquad(quads)
    if set(bq.white) != set(white) or set(bq.black) != set(black):
        raise ParseError("declared color classes disagree with quad corner positions")
    if len(alpha) != len(quads):
        raise ParseError("alpha list length does not match quad count")
    return bq, Labelling(tuple(alpha))


def save_bquad(path, bq: BQuadGraph, labelling: Labelling):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(bq, labelling), fh, indent=1)
        fh.write("\n")


def load_bquad(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return from_json_dict(doc)

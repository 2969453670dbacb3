"""Electrical networks on white graphs: geometric conductances, harmonic
solves, effective resistance, and vertex extremal length.

Conductances come from the kite geometry (diagonal ratio H/L, equivalently
twice the derivative of the half-angle function at the log-radius
difference).  Vertex extremal length is computed by constraint generation:
alternately find the lightest connecting path and project the weight vector
onto the accumulated half-space constraints.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernel
from .errors import NoConvergence, SingularSystem, TooLarge

C4_SLACK = 1e-9


@dataclass(frozen=True)
class WeightedGraph:
    """Finite graph with symmetric positive edge conductances."""

    vertices: tuple
    edges: tuple                 # (u, v) pairs
    mu: tuple                    # conductance per edge, > 0
    _index: dict = field(default_factory=dict, repr=False)
    _adj: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if any(m <= 0 for m in self.mu):
            raise ValueError("conductances must be positive")
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

    def vertex_conductance_sums(self):
        s = {v: 0.0 for v in self.vertices}
        for (a, b), m in zip(self.edges, self.mu):
            s[a] += m
            s[b] += m
        return s


def unit_graph(vertices, edges):
    return WeightedGraph(tuple(vertices), tuple(edges), tuple(1.0 for _ in edges))


def conductances_from_pattern(graph, alpha, rho) -> WeightedGraph:
    """Conductance 2 f'_alpha(log r1 - log r0) per edge; equals H/L of the kite."""
    rho = np.asarray(rho, dtype=float)
    mu = []
    for eid, (a, b) in enumerate(graph.edges):
        d = rho[graph.index(b)] - rho[graph.index(a)]
        mu.append(2.0 * kernel.f_theta_prime(alpha.alpha[eid], d))
    return WeightedGraph(tuple(graph.vertices), tuple(graph.edges), tuple(mu))


def laplacian(wg: WeightedGraph, h: dict) -> dict:
    """Weighted graph Laplacian sum mu(e) (h(neighbor) - h(v)) at every vertex."""
    out = {}
    for v in wg.vertices:
        out[v] = sum(wg.mu[eid] * (h[u] - h[v]) for eid, u in wg.neighbors(v))
    return out


def laplacian_matrix(wg: WeightedGraph):
    n = len(wg.vertices)
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for (a, b), m in zip(wg.edges, wg.mu):
        ia, ib = wg.index(a), wg.index(b)
        rows.extend((ia, ib))
        cols.extend((ib, ia))
        vals.extend((m, m))
        diag[ia] -= m
        diag[ib] -= m
    rows.extend(range(n))
    cols.extend(range(n))
    vals.extend(diag)
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


def solve_harmonic(wg: WeightedGraph, boundary: dict) -> dict:
    """Harmonic extension of boundary values; obeys the discrete max principle."""
    if not boundary:
        raise SingularSystem("no boundary values given")
    interior = [v for v in wg.vertices if v not in boundary]
    if not interior:
        return dict(boundary)
    # every interior component must reach the boundary
    seen = set(boundary)
    stack = list(boundary)
    while stack:
        v = stack.pop()
        for _, u in wg.neighbors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    unreached = [v for v in interior if v not in seen]
    if unreached:
        raise SingularSystem(f"interior vertices cut off from boundary: {unreached[:5]}")

    ipos = {v: k for k, v in enumerate(interior)}
    rows, cols, vals = [], [], []
    diag = np.zeros(len(interior))
    rhs = np.zeros(len(interior))
    for (a, b), m in zip(wg.edges, wg.mu):
        for x, y in ((a, b), (b, a)):
            ix = ipos.get(x)
            if ix is None:
                continue
            diag[ix] += m
            if y in ipos:
                rows.append(ix)
                cols.append(ipos[y])
                vals.append(-m)
            else:
                rhs[ix] += m * boundary[y]
    n = len(interior)
    rows.extend(range(n))
    cols.extend(range(n))
    vals.extend(diag)
    mat = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
    sol = spla.spsolve(mat, rhs)
    out = dict(boundary)
    out.update({v: float(sol[ipos[v]]) for v in interior})
    return out


def dirichlet_energy(wg: WeightedGraph, g: dict) -> float:
    return sum(m * (g[a] - g[b]) ** 2 for (a, b), m in zip(wg.edges, wg.mu))


def effective_resistance(wg: WeightedGraph, A, Z) -> float:
    """1 / min Dirichlet energy over potentials with g=0 on A and g=1 on Z.

    Returns +inf when A and Z lie in different components.
    """
    A, Z = set(A), set(Z)
    if not A or not Z or (A & Z):
        raise ValueError("A and Z must be nonempty and disjoint")
    if not _reachable(wg, A, Z, set()):
        return math.inf
    boundary = {v: 0.0 for v in A}
    boundary.update({v: 1.0 for v in Z})
    g = solve_harmonic(wg, boundary)
    return 1.0 / dirichlet_energy(wg, g)


def _reachable(wg, src, dst, removed):
    src = {v for v in src if v not in removed}
    dst = {v for v in dst if v not in removed}
    if not src or not dst:
        return False
    seen = set(src)
    stack = list(src)
    while stack:
        v = stack.pop()
        if v in dst:
            return True
        for _, u in wg.neighbors(v):
            if u not in seen and u not in removed:
                seen.add(u)
                stack.append(u)
    return False


def separates(wg: WeightedGraph, V1, V2, V3) -> bool:
    """True iff every path from V1 to V3 meets V2."""
    return not _reachable(wg, set(V1), set(V3), set(V2))


# --- vertex extremal length ---------------------------------------------------

def _lightest_path(wg, eta, V1, V2):
    """Min vertex-weight path from V1 to V2 (weights include both endpoints).

    Deterministic label-setting search; ties broken by vertex id.
    """
    dist = {}
    parent = {}
    heap = []
    for v in sorted(V1):
        d = eta[v]
        if d < dist.get(v, math.inf):
            dist[v] = d
            parent[v] = None
            heapq.heappush(heap, (d, v))
    settled = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in settled or d > dist.get(v, math.inf):
            continue
        settled.add(v)
        if v in V2:
            path = []
            while v is not None:
                path.append(v)
                v = parent[v]
            return d, tuple(reversed(path))
        for _, u in wg.neighbors(v):
            nd = d + eta[u]
            if nd < dist.get(u, math.inf) - 1e-18:
                dist[u] = nd
                parent[u] = v
                heapq.heappush(heap, (nd, u))
    return math.inf, None


def _min_area_weights(n, constraints, tol=1e-12, max_sweeps=20000):
    """Projection of 0 onto the intersection of {sum_{i in c} eta_i >= 1}.

    Hildreth coordinate ascent on the dual; the optimum is a nonnegative
    combination of constraint indicators, so eta stays >= 0 throughout.
    """
    eta = np.zeros(n)
    lam = np.zeros(len(constraints))
    sizes = np.array([len(c) for c in constraints], dtype=float)
    idx = [np.fromiter(c, dtype=int) for c in constraints]
    for _ in range(max_sweeps):
        change = 0.0
        for k, c in enumerate(idx):
            viol = 1.0 - float(np.sum(eta[c]))
            dlam = max(-lam[k], 2.0 * viol / sizes[k])
            if dlam != 0.0:
                lam[k] += dlam
                eta[c] += 0.5 * dlam
                change = max(change, abs(dlam))
        if change < tol:
            break
    return eta


@dataclass
class VelResult:
    mod: float
    vel: float
    eta: dict
    constraints: int
    min_path_weight: float


def vel(wg: WeightedGraph, V1, V2, tol=1e-6, max_rounds=10000) -> VelResult:
    """Vertex modulus / extremal length between two disjoint vertex sets.

    Constraint generation: repeatedly add the lightest connecting path as a
    half-space constraint and re-project.  The returned weight function is
    rescaled to be exactly admissible for the final lightest path, so the
    reported modulus is certified within O(tol) of optimal.
    """
    V1, V2 = set(V1), set(V2)
    if not V1 or not V2 or (V1 & V2):
        raise ValueError("V1 and V2 must be nonempty and disjoint")
    n = len(wg.vertices)
    zero = {v: 0.0 for v in wg.vertices}
    if not _reachable(wg, V1, V2, set()):
        return VelResult(0.0, math.inf, zero, 0, math.inf)

    constraints = []
    seen = set()
    eta_vec = np.zeros(n)
    stale = 0
    w = 0.0
    for _ in range(max_rounds):
        eta = {v: float(eta_vec[wg.index(v)]) for v in wg.vertices}
        w, path = _lightest_path(wg, eta, V1, V2)
        if w >= 1.0 - tol:
            break
        key = tuple(sorted(set(path)))
        if key in seen:
            # same path still violated: tighten the projection and retry
            stale += 1
            eta_vec = _min_area_weights(n, constraints, tol=1e-14,
                                        max_sweeps=200000)
            eta = {v: float(eta_vec[wg.index(v)]) for v in wg.vertices}
            w, path = _lightest_path(wg, eta, V1, V2)
            if w >= 1.0 - tol or stale > 5:
                break
            continue
        seen.add(key)
        constraints.append([wg.index(v) for v in key])
        eta_vec = _min_area_weights(n, constraints)
    if w < 1.0 - 10 * tol:
        raise NoConvergence("extremal-length constraint generation did not certify")
    scale = 1.0 / w if w > 0 else 1.0
    eta_vec = eta_vec * scale
    area = float(np.sum(eta_vec ** 2))
    eta = {v: float(eta_vec[wg.index(v)]) for v in wg.vertices}
    return VelResult(area, 1.0 / area if area > 0 else math.inf, eta,
                     len(constraints), w * scale)


def enumerate_simple_paths(wg, V1, V2, limit=200000):
    """All simple V1 -> V2 paths (as vertex sets) for the brute-force oracle."""
    V1, V2 = set(V1), set(V2)
    out = []

    def extend(v, visited, path):
        if len(out) > limit:
            raise TooLarge("too many simple paths to enumerate")
        if v in V2:
            out.append(tuple(path))
            return
        for _, u in sorted(wg.neighbors(v), key=lambda t: t[1]):
            if u not in visited and u not in V1:
                visited.add(u)
                path.append(u)
                extend(u, visited, path)
                path.pop()
                visited.remove(u)

    for s in sorted(V1):
        extend(s, {s}, [s])
    return out


def mod_by_enumeration(wg, constraint_sets):
    """Exact-ish modulus for an explicitly enumerated constraint family."""
    rows = [sorted({wg.index(v) for v in c}) for c in constraint_sets]
    eta = _min_area_weights(len(wg.vertices), rows, tol=1e-14, max_sweeps=200000)
    return float(np.sum(eta ** 2)), {v: float(eta[wg.index(v)]) for v in wg.vertices}


def minimal_separators(wg, V1, V2, size_gate=15):
    """All inclusion-minimal vertex sets meeting every V1 -> V2 path."""
    n = len(wg.vertices)
    if n > size_gate:
        raise TooLarge(f"separator enumeration gated at {size_gate} vertices")
    V1, V2 = set(V1), set(V2)
    verts = list(wg.vertices)
    separating = []
    for bits in range(1, 1 << n):
        S = {verts[i] for i in range(n) if bits >> i & 1}
        if not _reachable(wg, V1, V2, S):
            separating.append(frozenset(S))
    separating.sort(key=len)
    minimal = []
    for S in separating:
        if not any(T < S for T in minimal):
            minimal.append(S)
    return minimal


@dataclass(frozen=True)
class DualityReport:
    mod_paths: float
    mod_separators: float
    product: float
    degenerate: bool


def vel_duality_check(wg, V1, V2) -> DualityReport:
    """Brute-force check that Mod(paths) * Mod(separating sets) = 1."""
    if len(wg.vertices) > 15:
        raise TooLarge("duality check gated at 15 vertices")
    if not _reachable(wg, set(V1), set(V2), set()):
        return DualityReport(0.0, math.inf, math.nan, True)
    paths = enumerate_simple_paths(wg, V1, V2)
    mod_g, _ = mod_by_enumeration(wg, paths)
    seps = minimal_separators(wg, V1, V2)
    mod_s, _ = mod_by_enumeration(wg, seps)
    return DualityReport(mod_g, mod_s, mod_g * mod_s, False)


@dataclass(frozen=True)
class VelReffReport:
    vel: float
    reff: float
    c4: float
    holds: bool


def vel_reff_bound(wg: WeightedGraph, V1, V2) -> VelReffReport:
    """Vertex extremal length against 2 * C4 * effective resistance.

    C4 is the largest per-vertex conductance sum; extremal length itself is
    conductance-free.
    """
    c4 = max(wg.vertex_conductance_sums().values())
    r = effective_resistance(wg, V1, V2)
    v = vel(wg, V1, V2).vel
    holds = v <= 2.0 * c4 * r + C4_SLACK
    return VelReffReport(v, r, c4, holds)


@dataclass(frozen=True)
class ConductanceSumReport:
    sums: dict
    max_sum: float


def conductance_sum_report(wg: WeightedGraph, interior=None) -> ConductanceSumReport:
    """Per-vertex conductance sums; finite for convex-kite patterns."""
    sums = wg.vertex_conductance_sums()
    if interior is not None:
        sums = {v: s for v, s in sums.items() if v in set(interior)}
    return ConductanceSumReport(sums, max(sums.values()))


def annuli_resistance_profile(wg: WeightedGraph, centers: dict, v0, radii):
    """Effective resistance from v0 to everything at distance >= R, per R.

    centers maps vertex -> planar point; the profile is non-decreasing in R
    and scale-free in the conductances.
    """
    c0 = np.asarray(centers[v0], dtype=float)
    out = []
    for R in radii:
        ring = [v for v in wg.vertices
                if v != v0 and np.hypot(*(np.asarray(centers[v]) - c0)) >= R]
        if not ring:
            out.append(math.inf)
            continue
        out.append(effective_resistance(wg, [v0], ring))
    return out


@dataclass(frozen=True)
class ConstantsReport:
    alpha0: float
    N: float
    C1: float
    C0: float
    C2: float
    C6: float


def constants_diagnostic(alpha0, N, C1) -> ConstantsReport:
    """Estimate chain C0 = 1/sin(alpha0), C2, C6 for user-supplied N, C1.

    Reported for diagnostics only; N (covering multiplicity) and C1 (arc
    comparability) are pattern-dependent inputs, not measured here.
    """
    if not (0.0 < alpha0 <= math.pi / 2):
        raise ValueError("alpha0 must lie in (0, pi/2]")
    c0 = 1.0 / math.sin(alpha0)
    c2 = 1.0 / (48.0 * c0 * c0 * N + 16.0 * C1 * C1 * math.pi * math.pi)
    c6 = 9.0 / (4.0 * c2)
    return ConstantsReport(alpha0, N, C1, c0, c2, c6)

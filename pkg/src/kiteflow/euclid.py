"""Euclidean radius solver: extend boundary radii so that the kite angles
around every interior white vertex close up to 2*pi.

The unknowns are log-radii, which makes the system the gradient of a convex
functional with a symmetric negative-definite Jacobian; a damped Newton
iteration with a sparse symmetric solve is globally reliable here.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernel
from .bquad import Labelling, WhiteGraph, check_admissible
from .errors import DomainError, MissingRadius, NoConvergence, NotASolution

DEFAULT_TOL = 1e-10
MAX_HALVINGS = 30


@dataclass(frozen=True)
class RadiusFunction:
    """Positive radii on the white vertices, stored as log-radii.

    When built from explicit radii the original values are kept alongside,
    so serialization round-trips bit-exactly.
    """

    vertices: tuple
    rho: np.ndarray              # log r, aligned with vertices
    exact: tuple = None          # original radii, if constructed from them

    @classmethod
    def from_radii(cls, vertices, radii):
        r = np.asarray([radii[v] for v in vertices], dtype=float)
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            raise MissingRadius("radii must be finite and positive")
        return cls(tuple(vertices), np.log(r), tuple(float(x) for x in r))

    def radius(self, v):
        return float(self.as_array()[self.vertices.index(v)])

    def radii(self):
        return dict(zip(self.vertices, map(float, self.as_array())))

    def as_array(self):
        if self.exact is not None:
            return np.asarray(self.exact, dtype=float)
        return np.exp(self.rho)


@dataclass(frozen=True)
class DirichletProblem:
    graph: WhiteGraph
    alpha: Labelling
    boundary: dict               # boundary white vertex -> radius

    def __post_init__(self):
        rep = check_admissible(self.graph.bquad, self.alpha)
        if not rep.admissible:
            raise DomainError(
                f"labelling not admissible at black vertices "
                f"{[v for v, _ in rep.violations[:4]]}")


@dataclass
class SolveReport:
    iterations: int = 0
    residual: float = math.inf
    damping: list = None
    converged: bool = False
    max_abs_rho: float = 0.0

    def __post_init__(self):
        if self.damping is None:
            self.damping = []


def _edge_arrays(graph: WhiteGraph, alpha: Labelling):
    idx = graph.index
    a = np.fromiter((idx(e[0]) for e in graph.edges), dtype=int)
    b = np.fromiter((idx(e[1]) for e in graph.edges), dtype=int)
    th = np.asarray(alpha.alpha, dtype=float)
    return a, b, th


def _angle_sums(graph, alpha, rho):
    """Sum of kite half-angles around every vertex (2x gives full angles)."""
    a, b, th = _edge_arrays(graph, alpha)
    d = rho[b] - rho[a]
    fa = kernel.f_theta_vec(th, d)
    fb = kernel.f_theta_vec(th, -d)
    acc = np.zeros(len(graph.vertices))
    np.add.at(acc, a, fa)
    np.add.at(acc, b, fb)
    return acc


def residual(graph: WhiteGraph, alpha: Labelling, rho) -> dict:
    """Angle defect per interior vertex: sum of half-angles minus pi."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (len(graph.vertices),) or not np.all(np.isfinite(rho)):
        raise MissingRadius("log-radius vector malformed or non-finite")
    acc = _angle_sums(graph, alpha, rho)
    return {v: float(acc[graph.index(v)] - math.pi) for v in graph.interior}


def residual_vector(graph, alpha, rho):
    acc = _angle_sums(graph, alpha, rho)
    ii = np.fromiter((graph.index(v) for v in graph.interior), dtype=int)
    return acc[ii] - math.pi


def newton_matrix(graph, alpha, rho):
    """Jacobian of the interior residual in log-radius variables.

    Entrywise one half of the weighted graph Laplacian built from the
    geometric conductances at the current radii; negative definite.
    """
    int_pos = {graph.index(v): k for k, v in enumerate(graph.interior)}
    a, b, th = _edge_arrays(graph, alpha)
    fp = kernel.f_theta_prime_vec(th, rho[b] - rho[a])
    rows, cols, vals = [], [], []
    diag = np.zeros(len(graph.interior))
    for eid in range(len(graph.edges)):
        ia, ib = int_pos.get(a[eid]), int_pos.get(b[eid])
        w = fp[eid]
        if ia is not None:
            diag[ia] -= w
        if ib is not None:
            diag[ib] -= w
        if ia is not None and ib is not None:
            rows.extend((ia, ib))
            cols.extend((ib, ia))
            vals.extend((w, w))
    k = len(graph.interior)
    rows.extend(range(k))
    cols.extend(range(k))
    vals.extend(diag)
    return sp.csc_matrix((vals, (rows, cols)), shape=(k, k))


def solve_dirichlet(problem: DirichletProblem, tol=DEFAULT_TOL, max_iter=100,
                    init=None):
    """Unique interior radii for given boundary radii (when a pattern exists).

    Returns (RadiusFunction, SolveReport); raises NoConvergence with the
    report attached when the budget runs out, which signals either solver
    failure or that no immersed pattern exists for this boundary data.
    """
    graph = problem.graph
    if set(problem.boundary) != set(graph.boundary):
        raise MissingRadius("boundary data must cover exactly the boundary vertices")
    if any(not math.isfinite(r) or r <= 0 for r in problem.boundary.values()):
        raise MissingRadius("boundary radii must be finite and positive")
    nv = len(graph.vertices)
    rho = np.zeros(nv)
    b_idx = np.fromiter((graph.index(v) for v in graph.boundary), dtype=int)
    b_rho = np.array([math.log(problem.boundary[v]) for v in graph.boundary])
    i_idx = np.fromiter((graph.index(v) for v in graph.interior), dtype=int)
    rho[b_idx] = b_rho
    rho[i_idx] = np.mean(b_rho) if init is None else np.asarray(init, dtype=float)

    report = SolveReport()
    if len(graph.interior) == 0:
        report.converged = True
        report.residual = 0.0
        return RadiusFunction(tuple(graph.vertices), rho), report

    fval = residual_vector(graph, problem.alpha, rho)
    fnorm = float(np.max(np.abs(fval)))
    for it in range(max_iter):
        report.iterations = it
        report.residual = fnorm
        report.max_abs_rho = float(np.max(np.abs(rho[i_idx])))
        if fnorm <= tol:
            report.converged = True
            return RadiusFunction(tuple(graph.vertices), rho), report
        jac = newton_matrix(graph, problem.alpha, rho)
        step = spla.spsolve(jac, -fval)
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = rho.copy()
            trial[i_idx] = rho[i_idx] + t * step
            ftrial = residual_vector(graph, problem.alpha, trial)
            fnew = float(np.max(np.abs(ftrial)))
            if fnew < fnorm:
                rho, fval, fnorm = trial, ftrial, fnew
                report.damping.append(t)
                break
            t *= 0.5
        else:
            raise NoConvergence("line search stalled", report)
    report.residual = fnorm
    report.max_abs_rho = float(np.max(np.abs(rho[i_idx])))
    raise NoConvergence(f"no convergence after {max_iter} iterations "
                        f"(residual {fnorm:.3e})", report)


def solve_boundary_radii(graph, alpha, boundary, **kw):
    """Convenience wrapper taking loose (graph, alpha, dict) arguments."""
    rf, rep = solve_dirichlet(DirichletProblem(graph, alpha, dict(boundary)), **kw)
    return rf, rep


RESIDUAL_SOLVED_TOL = 1e-8


def _require_solution(graph, alpha, rho, tol=RESIDUAL_SOLVED_TOL):
    res = residual_vector(graph, alpha, rho)
    if res.size and float(np.max(np.abs(res))) > tol:
        raise NotASolution(
            f"angle-sum residual {float(np.max(np.abs(res))):.3e} exceeds {tol}")


def check_max_principle(graph, alpha, rho, rho_tilde, tol=1e-12):
    """Max and min of the radius quotient must occur on the boundary.

    Both log-radius vectors must solve the angle-sum system to 1e-8.
    Returns (ok, witness) with the extremal vertices of the quotient.
    """
    rho = np.asarray(rho, dtype=float)
    rho_tilde = np.asarray(rho_tilde, dtype=float)
    _require_solution(graph, alpha, rho)
    _require_solution(graph, alpha, rho_tilde)
    q = rho - rho_tilde            # log of the radius quotient
    b = np.fromiter((graph.index(v) for v in graph.boundary), dtype=int)
    ok = (np.max(q) <= np.max(q[b]) + tol) and (np.min(q) >= np.min(q[b]) - tol)
    argmax = [v for v in graph.vertices if q[graph.index(v)] >= np.max(q) - tol]
    argmin = [v for v in graph.vertices if q[graph.index(v)] <= np.min(q) + tol]
    return ok, {"argmax": argmax, "argmin": argmin}


@dataclass(frozen=True)
class QBoundReport:
    q: float
    ratios: tuple                # H/L per edge, quad order
    nonconvex_edges: tuple


def q_bound(graph, alpha, rho) -> QBoundReport:
    """Largest kite diagonal-ratio distortion max(H/L, L/H) over all edges."""
    rho = np.asarray(rho, dtype=float)
    ratios, bad = [], []
    for eid, (va, vb) in enumerate(graph.edges):
        k = kernel.kite(alpha.alpha[eid],
                        math.exp(rho[graph.index(va)]),
                        math.exp(rho[graph.index(vb)]))
        ratios.append(k.H / k.L)
        if not k.convex:
            bad.append(eid)
    q = max(max(r, 1.0 / r) for r in ratios) if ratios else 1.0
    return QBoundReport(q, tuple(ratios), tuple(bad))

"""Hyperbolic radius variables and the dilogarithm functional they minimize.

Circles inside the unit disc carry rho = log tanh(r_hyp / 2) < 0; circles
crossing the disc boundary carry the crossing angle beta in [0, pi).  The
angle-sum equations at interior vertices are the critical-point equations
of a functional that is strictly convex in the interior variables, so the
Dirichlet problem is solved by a damped, domain-clipped Newton iteration.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernel
from .bquad import check_admissible
from .dilog import im_dilog_exp
from .errors import DomainError, DomainViolation, NoConvergence, NotASolution
from .euclid import SolveReport

KIND_INTERIOR = "int"
KIND_BOUNDARY = "bnd"
KIND_BETA = "beta"

RHO_CEILING = -1e-12
GRAD_TOL = 1e-8


@dataclass(frozen=True)
class HypRadiusAssignment:
    """Per-vertex hyperbolic variable with a kind flag.

    values[i] is rho < 0 for 'int'/'bnd' vertices and beta in [0, pi) for
    'beta' vertices; aligned with vertices.
    """

    vertices: tuple
    values: np.ndarray
    kinds: tuple

    def __post_init__(self):
        for v, x, k in zip(self.vertices, self.values, self.kinds):
            if k == KIND_BETA:
                if not (0.0 <= x < math.pi):
                    raise DomainError(f"beta at vertex {v} outside [0, pi)")
            elif not (x < 0.0 and math.isfinite(x)):
                raise DomainError(f"rho at vertex {v} must be negative and finite")

    def is_beta(self, i):
        return self.kinds[i] == KIND_BETA


def assignment_from_rho(graph, rho):
    kinds = tuple(KIND_INTERIOR if v in set(graph.interior) else KIND_BOUNDARY
                  for v in graph.vertices)
    return HypRadiusAssignment(tuple(graph.vertices),
                               np.asarray(rho, dtype=float), kinds)


def _check_all_negative(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho >= 0.0) or not np.all(np.isfinite(rho)):
        raise DomainError("hyperbolic variables must be negative and finite")
    return rho


def _edge_term(alpha_e, xl, xr):
    return (im_dilog_exp(xl - xr, alpha_e) + im_dilog_exp(xr - xl, alpha_e)
            + im_dilog_exp(xl + xr, alpha_e) + im_dilog_exp(-xl - xr, alpha_e))


def s_hyp_parts(graph, alpha, rho):
    """(edge sum, interior vertex sum) of the hyperbolic functional."""
    rho = _check_all_negative(rho)
    edge = 0.0
    for eid, (a, b) in enumerate(graph.edges):
        edge += _edge_term(alpha.alpha[eid], rho[graph.index(a)],
                           rho[graph.index(b)])
    vert = 2.0 * math.pi * sum(rho[graph.index(v)] for v in graph.interior)
    return edge, vert


def s_hyp(graph, alpha, rho) -> float:
    """Strictly convex functional whose minimizer solves the angle equations."""
    edge, vert = s_hyp_parts(graph, alpha, rho)
    return edge + vert


def grad_s_hyp(graph, alpha, rho) -> dict:
    """Gradient per interior vertex: 2 pi - 2 sum (f(dr) - f(sr))."""
    rho = _check_all_negative(rho)
    out = {}
    for v0 in graph.interior:
        i0 = graph.index(v0)
        acc = 0.0
        for eid, v in graph.neighbors(v0):
            th = alpha.alpha[eid]
            i1 = graph.index(v)
            acc += (kernel.f_theta(th, rho[i1] - rho[i0])
                    - kernel.f_theta(th, rho[i1] + rho[i0]))
        out[v0] = 2.0 * math.pi - 2.0 * acc
    return out


# --- generalized functional ---------------------------------------------------

def convexity_certificate(graph, alpha, assignment: HypRadiusAssignment):
    """True when cos(alpha_e) < cos(beta) on every edge into a beta vertex."""
    ok = True
    for eid, (a, b) in enumerate(graph.edges):
        for x, y in ((a, b), (b, a)):
            ix = graph.index(x)
            if assignment.is_beta(ix) and not assignment.is_beta(graph.index(y)):
                if math.cos(alpha.alpha[eid]) >= math.cos(assignment.values[ix]):
                    ok = False
    return ok


def s_hyp_gen(graph, alpha, assignment: HypRadiusAssignment) -> float:
    """Functional extended to boundary circles crossing the unit circle.

    Edges into a crossing vertex contribute the even boundary potential of
    the interior endpoint; edges between two crossing vertices carry no
    interior variable and contribute nothing.
    """
    total = 0.0
    vals = assignment.values
    for eid, (a, b) in enumerate(graph.edges):
        ia, ib = graph.index(a), graph.index(b)
        ba, bb = assignment.is_beta(ia), assignment.is_beta(ib)
        th = alpha.alpha[eid]
        if ba and bb:
            continue
        if ba or bb:
            beta = vals[ia] if ba else vals[ib]
            x = vals[ib] if ba else vals[ia]
            total += kernel.big_F_beta_theta(beta, th, x)
        else:
            total += _edge_term(th, vals[ia], vals[ib])
    for v in graph.interior:
        total += 2.0 * math.pi * vals[graph.index(v)]
    return total


def grad_s_hyp_gen(graph, alpha, assignment: HypRadiusAssignment) -> dict:
    """Gradient over interior vertices of the generalized functional."""
    vals = assignment.values
    out = {}
    for v0 in graph.interior:
        i0 = graph.index(v0)
        if assignment.is_beta(i0):
            raise DomainError("interior vertices cannot carry a crossing angle")
        acc = 0.0
        for eid, v in graph.neighbors(v0):
            th = alpha.alpha[eid]
            i1 = graph.index(v)
            if assignment.is_beta(i1):
                acc += kernel.phi_gen(th, vals[i0], vals[i1])
            else:
                acc += (kernel.f_theta(th, vals[i1] - vals[i0])
                        - kernel.f_theta(th, vals[i1] + vals[i0]))
        out[v0] = 2.0 * math.pi - 2.0 * acc
    return out


def _hessian(graph, alpha, assignment, int_pos):
    vals = assignment.values
    k = len(int_pos)
    rows, cols, hvals = [], [], []
    diag = np.zeros(k)
    for eid, (a, b) in enumerate(graph.edges):
        th = alpha.alpha[eid]
        ia, ib = graph.index(a), graph.index(b)
        for x, y in ((ia, ib), (ib, ia)):
            px = int_pos.get(x)
            if px is None:
                continue
            if assignment.is_beta(y):
                diag[px] += kernel.big_F_beta_theta_dxx(vals[y], th, vals[x])
            else:
                fpd = kernel.f_theta_prime(th, vals[y] - vals[x])
                fps = kernel.f_theta_prime(th, vals[y] + vals[x])
                diag[px] += 2.0 * (fpd + fps)
                py = int_pos.get(y)
                if py is not None:
                    rows.append(px)
                    cols.append(py)
                    hvals.append(-2.0 * (fpd - fps))
    rows.extend(range(k))
    cols.extend(range(k))
    hvals.extend(diag)
    return sp.csc_matrix((hvals, (rows, cols)), shape=(k, k))


def minimize_s_hyp(graph, alpha, boundary, tol=GRAD_TOL, max_iter=200,
                   init=None):
    """Solve the hyperbolic Dirichlet problem for given boundary data.

    boundary maps every boundary vertex either to ('rho', value < 0) or to
    ('beta', value in [0, pi)); plain numbers are taken as rho values.
    Interior variables stay in (-inf, 0) by step clipping.  Returns
    (HypRadiusAssignment, SolveReport).
    """
    if not check_admissible(graph.bquad, alpha).admissible:
        raise DomainError("labelling not admissible")
    bdata = {}
    for v in graph.boundary:
        if v not in boundary:
            raise DomainError(f"missing boundary value at vertex {v}")
        val = boundary[v]
        bdata[v] = val if isinstance(val, tuple) else ("rho", float(val))

    nv = len(graph.vertices)
    vals = np.zeros(nv)
    kinds = [KIND_INTERIOR] * nv
    rho_b = []
    for v in graph.boundary:
        kind, x = bdata[v]
        i = graph.index(v)
        if kind == "beta":
            kinds[i] = KIND_BETA
            vals[i] = x
        elif kind == "rho":
            if x >= 0:
                raise DomainError("boundary rho values must be negative")
            kinds[i] = KIND_BOUNDARY
            vals[i] = x
            rho_b.append(x)
        else:
            raise DomainError(f"unknown boundary kind {kind!r}")

    i_idx = np.fromiter((graph.index(v) for v in graph.interior), dtype=int)
    start = np.mean(rho_b) if rho_b else -1.0
    vals[i_idx] = start if init is None else np.asarray(init, dtype=float)
    vals[i_idx] = np.minimum(vals[i_idx], RHO_CEILING)

    assignment = HypRadiusAssignment(tuple(graph.vertices), vals.copy(),
                                     tuple(kinds))
    if any(k == KIND_BETA for k in kinds) and not convexity_certificate(
            graph, alpha, assignment):
        raise DomainError("convexity certificate fails for the crossing data; "
                          "refusing to claim a minimum")

    int_pos = {graph.index(v): k for k, v in enumerate(graph.interior)}
    report = SolveReport()
    if not graph.interior:
        report.converged = True
        report.residual = 0.0
        return assignment, report

    def grad_vec(a):
        g = grad_s_hyp_gen(graph, alpha, a)
        return np.array([g[v] for v in graph.interior])

    cur = assignment
    g = grad_vec(cur)
    gnorm = float(np.max(np.abs(g)))
    for it in range(max_iter):
        report.iterations = it
        report.residual = gnorm
        if gnorm <= tol:
            report.converged = True
            report.max_abs_rho = float(np.max(np.abs(cur.values[i_idx])))
            return cur, report
        hess = _hessian(graph, alpha, cur, int_pos)
        step = spla.spsolve(hess, -g)
        t = 1.0
        improved = False
        for _ in range(40):
            trial = cur.values.copy()
            trial[i_idx] = np.minimum(cur.values[i_idx] + t * step, RHO_CEILING)
            cand = HypRadiusAssignment(cur.vertices, trial, cur.kinds)
            gt = grad_vec(cand)
            gn = float(np.max(np.abs(gt)))
            if gn < gnorm:
                cur, g, gnorm = cand, gt, gn
                report.damping.append(t)
                improved = True
                break
            t *= 0.5
        if not improved:
            if np.any(cur.values[i_idx] >= RHO_CEILING):
                raise DomainViolation("iterate pinned at the rho < 0 domain wall")
            raise NoConvergence("line search stalled", report)
    raise NoConvergence(f"no convergence after {max_iter} iterations "
                        f"(gradient {gnorm:.3e})", report)


def check_max_principle_hyp(graph, alpha, rho, rho_star, generalized=False,
                            grad_tol=1e-6):
    """Boundary domination of hyperbolic radii propagates to the interior.

    rho is a fully ordinary assignment; rho_star may carry crossing vertices
    when generalized is true (those dominate any circle inside the disc).
    Returns (ok, info) where ok is the implication 'boundary dominated =>
    interior dominated' and info carries the witness and the minimal
    interior gap.
    """
    a = assignment_from_rho(graph, rho) if not isinstance(
        rho, HypRadiusAssignment) else rho
    b = rho_star if isinstance(rho_star, HypRadiusAssignment) else \
        assignment_from_rho(graph, rho_star)
    if any(a.is_beta(i) for i in range(len(a.vertices))):
        raise DomainError("reference assignment must lie inside the disc")
    if not generalized and any(b.is_beta(i) for i in range(len(b.vertices))):
        raise DomainError("crossing vertices require generalized=True")

    g1 = grad_s_hyp(graph, alpha, a.values)
    g2 = grad_s_hyp_gen(graph, alpha, b)
    r1 = max(abs(x) for x in g1.values()) if g1 else 0.0
    r2 = max(abs(x) for x in g2.values()) if g2 else 0.0
    if max(r1, r2) > grad_tol:
        raise NotASolution(f"assignments are not critical points "
                           f"(gradients {r1:.2e}, {r2:.2e})")

    def dominated(i):
        return b.is_beta(i) or b.values[i] >= a.values[i]

    hyp = all(dominated(graph.index(v)) for v in graph.boundary)
    gaps = {v: float(b.values[graph.index(v)] - a.values[graph.index(v)])
            for v in graph.interior}
    violations = [v for v, gp in gaps.items() if gp < 0.0]
    concl = not violations
    info = {"hypothesis": hyp, "conclusion": concl, "violations": violations,
            "min_interior_gap": min(gaps.values()) if gaps else math.inf}
    return (not hyp) or concl, info

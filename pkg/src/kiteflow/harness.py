"""End-to-end experiments at desk scale.

The convergence run manufactures, for each mesh level, an isoradial
orthogonal source pattern filling the domain and a target pattern whose
boundary radii sample |g'| of a reference conformal map; the discrete map
between them is compared against g on a compact subset after normalizing
away the similarity freedom.  The rigidity run drives the one-parameter
interpolation family of radius functions on growing square truncations and
measures how close its logarithmic velocity is to a harmonic, constant
function.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import dcmap, euclid, layout, network
from .bquad import Labelling, build_bquad, derive_white_graph, generate_square_grid
from .errors import ParseError

PRNG_NAME = "pcg64"
FD_STEP = 1e-4


# --- reference maps and domains -------------------------------------------------

@dataclass(frozen=True)
class ReferenceMap:
    name: str
    f: object
    df: object


def make_reference(name: str) -> ReferenceMap:
    """Catalog: identity | similarity:ar,ai,br,bi | moebius:a | square."""
    parts = name.split(":")
    kind = parts[0]
    if kind == "identity":
        return ReferenceMap(name, lambda z: z, lambda z: 1.0 + 0.0j)
    if kind == "similarity":
        vals = [float(x) for x in parts[1].split(",")] if len(parts) > 1 else [2.0, 0.5, 0.25, -0.125]
        while len(vals) < 4:
            vals.append(0.0)
        a = complex(vals[0], vals[1])
        b = complex(vals[2], vals[3])
        return ReferenceMap(name, lambda z: a * z + b, lambda z: a)
    if kind == "moebius":
        a = complex(float(parts[1])) if len(parts) > 1 else 0.3 + 0.0j
        ac = a.conjugate()

        def f(z):
            return (z - a) / (1.0 - ac * z)

        def df(z):
            return (1.0 - abs(a) ** 2) / (1.0 - ac * z) ** 2

        return ReferenceMap(name, f, df)
    if kind == "square":
        return ReferenceMap(name, lambda z: z * z, lambda z: 2.0 * z)
    raise ParseError(f"unknown reference map {name!r}")


@dataclass(frozen=True)
class Domain:
    kind: str                    # "disc" | "square"
    origin: tuple = (0.0, 0.0)   # lower-left corner of the unit square

    def contains(self, p):
        x, y = p
        if self.kind == "disc":
            return x * x + y * y <= 1.0
        x0, y0 = self.origin
        return x0 <= x <= x0 + 1.0 and y0 <= y <= y0 + 1.0

    def boundary_distance(self, p):
        x, y = p
        if self.kind == "disc":
            return 1.0 - math.hypot(x, y)
        x0, y0 = self.origin
        return min(x - x0, x0 + 1.0 - x, y - y0, y0 + 1.0 - y)


def make_domain(kind: str, map_name: str = "identity") -> Domain:
    if kind == "disc":
        return Domain("disc")
    if kind == "square":
        # the squaring map needs a domain avoiding the origin
        origin = (0.5, 0.5) if map_name.startswith("square") else (0.0, 0.0)
        return Domain("square", origin)
    raise ParseError(f"unknown domain {kind!r}")


def image_boundary_distance(ref: ReferenceMap, domain: Domain, w):
    """Distance of w to the boundary of the image domain, when known.

    The image is the domain itself for the identity, a similar copy for
    similarities, and the unit disc for the disc automorphisms; for the
    squaring map it has curved sides and None is returned.
    """
    kind = ref.name.split(":")[0]
    if kind == "identity":
        return domain.boundary_distance((w.real, w.imag))
    if kind == "similarity":
        a = ref.df(0)
        b = ref.f(0)
        z = (w - b) / a
        return abs(a) * domain.boundary_distance((z.real, z.imag))
    if kind == "moebius" and domain.kind == "disc":
        return 1.0 - abs(w)
    return None


# --- mesh construction -----------------------------------------------------------

def grid_complex(domain: Domain, n: int):
    """Orthogonal isoradial scaffold of mesh 1/n clipped to the domain.

    Returns (graph, labelling, coords, mesh) where coords maps white and
    black vertex ids to plane points and only grid cells fully inside the
    domain are kept.
    """
    s = 1.0 / n
    if domain.kind == "disc":
        span = range(-n - 1, n + 1)
        offs = (0.0, 0.0)
    else:
        span = range(0, n)
        offs = domain.origin

    def pt(i, j):
        return (offs[0] + i * s, offs[1] + j * s)

    cells = []
    for j in span:
        for i in span:
            if domain.kind == "square":
                cells.append((i, j))    # every mesh cell tiles the square
                continue
            pts = [pt(i, j), pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)]
            if all(domain.contains(p) for p in pts):
                cells.append((i, j))
    if not cells:
        raise ParseError(f"mesh 1/{n} leaves no cell inside the domain")

    corners = sorted({(ci + di, cj + dj) for ci, cj in cells
                      for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1))},
                     key=lambda c: (c[1], c[0]))
    vid = {c: k for k, c in enumerate(corners)}
    quads = []
    for ci, cj in cells:
        ids = (vid[(ci, cj)], vid[(ci + 1, cj)], vid[(ci + 1, cj + 1)],
               vid[(ci, cj + 1)])
        if (ci + cj) % 2 == 0:
            quads.append(ids)
        else:
            quads.append((ids[1], ids[2], ids[3], ids[0]))
    bq = build_bquad(quads)
    lab = Labelling(tuple(math.pi / 2 for _ in quads))
    graph = derive_white_graph(bq)
    coords = {vid[c]: pt(*c) for c in corners}
    return graph, lab, coords, s


def _anchored_layouts(graph, lab, coords, rho_src, rho_tgt, ref):
    root = min(graph.vertices)
    ref_edge = min(eid for eid, _ in graph.neighbors(root))
    other = graph.other_end(ref_edge, root)
    d = (coords[other][0] - coords[root][0], coords[other][1] - coords[root][1])
    src_dir = math.atan2(d[1], d[0])
    src = layout.layout(graph, lab, rho_src,
                        anchor=(root, coords[root], src_dir))
    z0 = complex(*coords[root])
    w0 = ref.f(z0)
    tgt_dir = src_dir + cmath.phase(ref.df(z0))
    tgt = layout.layout(graph, lab, rho_tgt,
                        anchor=(root, (w0.real, w0.imag), tgt_dir))
    return src, tgt


# --- convergence experiment ------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceSpec:
    domain: str = "disc"
    map: str = "moebius:0.3"
    levels: tuple = (8, 16, 32)
    margin: float = 0.2
    q_max: float = 4.0
    seed: int = 20260809

    def __post_init__(self):
        if list(self.levels) != sorted(set(self.levels)):
            raise ParseError("levels must be strictly increasing")
        if self.margin <= 0:
            raise ParseError("margin must be positive")

    def to_dict(self):
        return {"domain": self.domain, "map": self.map,
                "levels": list(self.levels), "margin": self.margin,
                "q_max": self.q_max, "seed": self.seed}


def run_convergence(spec: ConvergenceSpec, keep_artifacts=False):
    """Per-level discrete-vs-smooth comparison; see the module docstring."""
    ref = make_reference(spec.map)
    domain = make_domain(spec.domain, spec.map)
    rows = []
    artifacts = []
    for n in spec.levels:
        graph, lab, coords, s = grid_complex(domain, n)
        nv = len(graph.vertices)
        rho_src = np.full(nv, math.log(s))

        bnd = {v: abs(ref.df(complex(*coords[v]))) * s for v in graph.boundary}
        rf, rep = euclid.solve_boundary_radii(graph, lab, bnd, tol=1e-11)
        src, tgt = _anchored_layouts(graph, lab, coords, rho_src, rf.rho, ref)
        dm = dcmap.build_map(src, tgt)
        dil = dcmap.dilatation(dm)

        qb_s = euclid.q_bound(graph, lab, rho_src)
        qb_t = euclid.q_bound(graph, lab, rf.rho)
        qn = max(qb_s.q, qb_t.q)
        delta = 2.0 * float(np.max(src.radii))
        delta_t = 2.0 * float(np.max(tgt.radii))

        all_pts = ([tuple(src.center(v)) for v in graph.vertices]
                   + [tuple(src.black[b]) for b in sorted(src.black)])
        gap_src = min(domain.boundary_distance(p) for p in all_pts)
        tgt_pts = ([tuple(tgt.center(v)) for v in graph.vertices]
                   + [tuple(tgt.black[b]) for b in sorted(tgt.black)])
        gaps_t = [image_boundary_distance(ref, domain, complex(*p))
                  for p in tgt_pts]
        gap_tgt = min(gaps_t) if None not in gaps_t else None

        sim = dcmap.anchor_similarity(dm, ref.f)
        samples = [p for p in all_pts if domain.boundary_distance(p) >= spec.margin]
        err = dcmap.sup_error(dm, ref.f, samples, similarity=sim)

        hyp = {
            "radius_bound": bool(np.max(src.radii) <= delta / 2.0),
            "boundary_gap_source": bool(gap_src < delta),
            "boundary_gap_target": None if gap_tgt is None else bool(gap_tgt < delta_t),
            "convex": not qb_s.nonconvex_edges and not qb_t.nonconvex_edges,
            "q_bounded": bool(qn <= spec.q_max),
        }
        rows.append({
            "n": n,
            "delta": delta,
            "delta_tilde": delta_t,
            "q": qn,
            "K_max": dil.max,
            "sup_error": err,
            "samples": len(samples),
            "iterations": rep.iterations,
            "residual": rep.residual,
            "hypotheses": hyp,
        })
        if keep_artifacts:
            artifacts.append({"n": n, "graph": graph, "labelling": lab,
                              "coords": coords, "source": src, "target": tgt,
                              "map": dm, "reference": ref, "domain": domain})
    report = {"experiment": "convergence", "spec": spec.to_dict(),
              "prng": {"name": PRNG_NAME, "seed": spec.seed}, "rows": rows}
    return (report, artifacts) if keep_artifacts else report


# --- rigidity experiment ----------------------------------------------------------

@dataclass(frozen=True)
class RigiditySpec:
    sizes: tuple = (8, 16, 24)
    amplitude: float = 0.1
    tgrid: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    seed: int = 20260809

    def __post_init__(self):
        if self.amplitude < 0:
            raise ParseError("amplitude must be >= 0")
        if any(t < 0 or t > 1 for t in self.tgrid):
            raise ParseError("t-grid must lie in [0, 1]")

    def to_dict(self):
        return {"sizes": list(self.sizes), "amplitude": self.amplitude,
                "tgrid": list(self.tgrid), "seed": self.seed}


def run_rigidity(spec: RigiditySpec):
    """Interpolation-family diagnostic on square truncations.

    For each size the boundary radii of a perturbed pattern define log-slopes
    lambda; solving along the family r_hat(v, t) = exp(lambda(v) t) gives a
    time derivative h = d/dt log r_t that must be harmonic in the geometric
    conductances and bounded by max |lambda|.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    # one random profile on the scaled boundary, sampled by every truncation;
    # this mirrors a single global perturbation restricted to growing pieces
    knots = rng.uniform(-1.0, 1.0, size=64)

    def profile(u):
        x = (u % 1.0) * len(knots)
        k = int(x)
        frac = x - k
        return (1.0 - frac) * knots[k] + frac * knots[(k + 1) % len(knots)]

    def perimeter_param(v, size):
        i, j = v % (size + 1), v // (size + 1)
        if j == 0:
            t = i
        elif i == size:
            t = size + j
        elif j == size:
            t = 3 * size - i
        else:
            t = 4 * size - j
        return t / (4.0 * size)

    rows = []
    for size in spec.sizes:
        bq, lab = generate_square_grid(size, size, math.pi / 2)
        graph = derive_white_graph(bq)
        bnd = {v: math.exp(spec.amplitude * profile(perimeter_param(v, size)))
               for v in graph.boundary}
        rf, _ = euclid.solve_boundary_radii(graph, lab, bnd, tol=1e-12)
        lam = rf.rho.copy()      # base pattern is unit radii, so lambda = log r~

        # fixed central window: the finite-scale stand-in for a compact set
        half = size / 2.0
        win = [graph.index(v) for v in graph.vertices
               if abs(v % (size + 1) - half) <= 2.49
               and abs(v // (size + 1) - half) <= 2.49]

        max_lam = float(np.max(np.abs(lam)))
        worst_resid = 0.0
        worst_h = 0.0
        worst_var = 0.0
        worst_var_win = 0.0
        for t in spec.tgrid:
            sols = {}
            for tau in (t - FD_STEP, t, t + FD_STEP):
                bden = {v: math.exp(lam[graph.index(v)] * tau)
                        for v in graph.boundary}
                sols[tau], _ = euclid.solve_boundary_radii(
                    graph, lab, bden, tol=1e-12)
            h_arr = (sols[t + FD_STEP].rho - sols[t - FD_STEP].rho) / (2 * FD_STEP)
            h = {v: float(h_arr[graph.index(v)]) for v in graph.vertices}
            wg = network.conductances_from_pattern(graph, lab, sols[t].rho)
            lap = network.laplacian(wg, h)
            worst_resid = max(worst_resid,
                              max(abs(lap[v]) for v in graph.interior))
            worst_h = max(worst_h, max(abs(x) for x in h.values()))
            worst_var = max(worst_var, float(np.var(h_arr)))
            worst_var_win = max(worst_var_win, float(np.var(h_arr[win])))
        rows.append({
            "size": size,
            "max_harmonicity_residual": worst_resid,
            "max_h": worst_h,
            "max_lambda": max_lam,
            "h_bound_ok": bool(worst_h <= max_lam + 1e-6),
            "var_h_window": worst_var_win,
            "var_h_all": worst_var,
        })
    return {"experiment": "rigidity", "spec": spec.to_dict(),
            "prng": {"name": PRNG_NAME, "seed": spec.seed}, "rows": rows}


# --- properness probe and radius-ratio diagnostic ---------------------------------

def properness_probe(artifacts, margin):
    """Distances of discrete-map preimages of a target compact to the boundary.

    Measurement only: for each level, sample the margin-shrunk image domain
    at target vertices, pull them back through the inverse map, and report
    how far the preimages stay from the source boundary.
    """
    rows = []
    for art in artifacts:
        ref = art["reference"]
        domain = art["domain"]
        inv = dcmap.build_map(art["target"], art["source"])
        tgt = art["target"]
        pts = ([tuple(tgt.center(v)) for v in tgt.graph.vertices]
               + [tuple(tgt.black[b]) for b in sorted(tgt.black)])
        sel = [p for p in pts
               if (image_boundary_distance(ref, domain, complex(*p)) or 0.0)
               >= margin]
        pre = [dcmap.eval_map(inv, p) for p in sel]
        margins = [domain.boundary_distance(tuple(p)) for p in pre]
        rows.append({
            "n": art["n"],
            "samples": len(sel),
            "preimage_margin_min": min(margins) if margins else None,
            "preimage_margin_max": max(margins) if margins else None,
            "delta_tilde": 2.0 * float(np.max(tgt.radii)),
        })
    return {"experiment": "properness", "margin": margin, "rows": rows}


def tau_diagnostic(pattern, origin):
    """Per-vertex radius-to-distance ratio r(v) / d(origin, disc(v)).

    The ratio is +inf when the origin lies inside the disc; the max over the
    boundary vertices serves as the outer-ring proxy for the limsup.  The
    table is invariant under similarities applied to pattern and origin.
    """
    graph = pattern.graph
    ox, oy = origin
    tau = {}
    for v in graph.vertices:
        c = pattern.center(v)
        d = math.hypot(c[0] - ox, c[1] - oy) - pattern.radius(v)
        tau[v] = math.inf if d <= 0 else pattern.radius(v) / d
    outer = max(tau[v] for v in graph.boundary)
    return {"tau": tau, "max_boundary_tau": outer}

"""Command-line front end.

Human-readable progress goes to stdout, structured error JSON to stderr.
Exit codes: 0 success, 1 domain or input errors, 2 usage errors (argparse).
KITEFLOW_SEED overrides the seed of the experiment subcommands.
"""

import argparse
import json
import math
import os
import sys

from . import bquad, dcmap, euclid, harness, hyper, io, layout, network
from .errors import KiteflowError


def _seed(default):
    env = os.environ.get("KITEFLOW_SEED")
    return int(env) if env else default


def _load_graph(path):
    bq, lab = bquad.load_bquad(path)
    return bq, lab, bquad.derive_white_graph(bq)


def _cmd_gen(args):
    if args.family != "sg":
        raise KiteflowError(f"unknown generator family {args.family!r}")
    bq, lab = bquad.generate_square_grid(args.n, args.m, args.alpha)
    bquad.save_bquad(args.output, bq, lab)
    rep = bquad.check_admissible(bq, lab)
    print(f"wrote {args.output}: {len(bq.white)} white, {len(bq.black)} black, "
          f"{len(bq.quads)} quads, admissible={rep.admissible}")
    return 0


def _cmd_solve(args):
    _, lab, graph = _load_graph(args.graph)
    boundary = io.boundary_from_dict(io.read_json(args.boundary))
    rf, rep = euclid.solve_boundary_radii(graph, lab, boundary, tol=args.tol)
    io.write_json(args.output, io.radii_to_dict(rf))
    print(f"solved in {rep.iterations} iterations, residual {rep.residual:.3e}; "
          f"wrote {args.output}")
    return 0


def _cmd_hsolve(args):
    _, lab, graph = _load_graph(args.graph)
    boundary = io.hyp_boundary_from_dict(io.read_json(args.boundary))
    assignment, rep = hyper.minimize_s_hyp(graph, lab, boundary, tol=args.tol)
    io.write_json(args.output, io.hyp_to_dict(assignment))
    print(f"minimized in {rep.iterations} iterations, gradient {rep.residual:.3e}; "
          f"wrote {args.output}")
    return 0


def _cmd_layout(args):
    _, lab, graph = _load_graph(args.graph)
    rf = io.radii_from_dict(io.read_json(args.radii), graph)
    pattern = layout.layout(graph, lab, rf.rho)
    io.write_json(args.output, io.pattern_to_dict(pattern))
    worst, _ = layout.closure_residual(pattern)
    print(f"laid out {len(graph.vertices)} circles, closure {worst:.3e}; "
          f"wrote {args.output}")
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(layout.to_svg(pattern))
        print(f"wrote {args.svg}")
    return 0


def _cmd_map(args):
    _, lab, graph = _load_graph(args.graph)
    src = io.pattern_from_dict(io.read_json(args.source), graph, lab)
    tgt = io.pattern_from_dict(io.read_json(args.target), graph, lab)
    dm = dcmap.build_map(src, tgt)
    out = {}
    if args.eval:
        pts = io.read_json(args.eval)["points"]
        images = [list(map(float, dcmap.eval_map(dm, p))) for p in pts]
        out["images"] = images
    if args.dilatation:
        rep = dcmap.dilatation(dm)
        out["dilatation_max"] = rep.max
        out["dilatation"] = [float(k) for k in rep.per_triangle]
    io.write_json(args.output, out)
    print(f"map on {dm.n_triangles} triangles; wrote {args.output}")
    return 0


def _cmd_net(args):
    _, lab, graph = _load_graph(args.graph)
    rf = io.radii_from_dict(io.read_json(args.radii), graph)
    wg = network.conductances_from_pattern(graph, lab, rf.rho)
    out = {}
    if args.reff:
        A = io.vertex_set_from_dict(io.read_json(args.reff[0]))
        Z = io.vertex_set_from_dict(io.read_json(args.reff[1]))
        out["reff"] = network.effective_resistance(wg, A, Z)
    if args.vel:
        V1 = io.vertex_set_from_dict(io.read_json(args.vel[0]))
        V2 = io.vertex_set_from_dict(io.read_json(args.vel[1]))
        res = network.vel(wg, V1, V2)
        out["vel"] = res.vel
        out["mod"] = res.mod
        out["eta"] = {str(v): res.eta[v] for v in sorted(res.eta)}
    if args.profile is not None:
        if not args.pattern:
            raise KiteflowError("--profile needs -p/--pattern for circle centers")
        pat = io.pattern_from_dict(io.read_json(args.pattern), graph, lab)
        centers = {v: tuple(pat.center(v)) for v in graph.vertices}
        radii = [float(x) for x in args.profile_radii.split(",")]
        out["profile"] = network.annuli_resistance_profile(
            wg, centers, args.profile, radii)
    io.write_json(args.output, out)
    print(f"wrote {args.output}")
    return 0


def _cmd_converge(args):
    spec = harness.ConvergenceSpec(
        domain=args.domain, map=args.map,
        levels=tuple(int(x) for x in args.levels.split(",")),
        margin=args.margin, q_max=args.q_max, seed=_seed(args.seed))
    if args.svg_dir:
        report, artifacts = harness.run_convergence(spec, keep_artifacts=True)
        os.makedirs(args.svg_dir, exist_ok=True)
        for art in artifacts:
            for tag in ("source", "target"):
                path = os.path.join(args.svg_dir, f"level{art['n']}_{tag}.svg")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(layout.to_svg(art[tag]))
    else:
        report = harness.run_convergence(spec)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(io.canonical_dumps(report))
    for row in report["rows"]:
        print(f"n={row['n']:4d}  sup_error={row['sup_error']:.6e}  "
              f"K_max={row['K_max']:.6f}  delta~={row['delta_tilde']:.4e}")
    print(f"wrote {args.output}")
    return 0


def _cmd_rigidity(args):
    spec = harness.RigiditySpec(
        sizes=tuple(int(x) for x in args.sizes.split(",")),
        amplitude=args.amp,
        tgrid=tuple(float(x) for x in args.tgrid.split(",")),
        seed=_seed(args.seed))
    report = harness.run_rigidity(spec)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(io.canonical_dumps(report))
    for row in report["rows"]:
        print(f"size={row['size']:3d}  |lap h|={row['max_harmonicity_residual']:.3e}  "
              f"var h={row['var_h_window']:.3e}  bound_ok={row['h_bound_ok']}")
    print(f"wrote {args.output}")
    return 0


def _cmd_constants(args):
    rep = network.constants_diagnostic(args.alpha0, args.N, args.C1)
    doc = {"alpha0": rep.alpha0, "N": rep.N, "C1": rep.C1,
           "C0": rep.C0, "C2": rep.C2, "C6": rep.C6}
    print(json.dumps(doc, indent=1))
    if args.output:
        io.write_json(args.output, doc)
    return 0


def _cmd_tau(args):
    _, lab, graph = _load_graph(args.graph)
    pat = io.pattern_from_dict(io.read_json(args.pattern), graph, lab)
    ox, oy = (float(x) for x in args.origin.split(","))
    rep = harness.tau_diagnostic(pat, (ox, oy))
    doc = {"tau": {str(v): rep["tau"][v] for v in sorted(rep["tau"])},
           "max_boundary_tau": rep["max_boundary_tau"]}
    io.write_json(args.output, doc)
    print(f"max boundary tau = {rep['max_boundary_tau']}; wrote {args.output}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="kiteflow",
                                description="circle-pattern toolbox")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a labelled quad complex")
    g.add_argument("family", choices=["sg"], help="generator family")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--alpha", type=float, default=math.pi / 2)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="Euclidean boundary-value solve")
    s.add_argument("-g", "--graph", required=True)
    s.add_argument("-b", "--boundary", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=_cmd_solve)

    h = sub.add_parser("hsolve", help="hyperbolic boundary-value solve")
    h.add_argument("-g", "--graph", required=True)
    h.add_argument("-b", "--boundary", required=True)
    h.add_argument("-o", "--output", required=True)
    h.add_argument("--tol", type=float, default=1e-8)
    h.set_defaults(func=_cmd_hsolve)

    l = sub.add_parser("layout", help="realize a solved pattern in the plane")
    l.add_argument("-g", "--graph", required=True)
    l.add_argument("-r", "--radii", required=True)
    l.add_argument("-o", "--output", required=True)
    l.add_argument("--svg")
    l.set_defaults(func=_cmd_layout)

    m = sub.add_parser("map", help="discrete conformal map between patterns")
    m.add_argument("-g", "--graph", required=True)
    m.add_argument("-s", "--source", required=True)
    m.add_argument("-t", "--target", required=True)
    m.add_argument("--eval", help="JSON {\"points\": [[x,y],...]}")
    m.add_argument("--dilatation", action="store_true")
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=_cmd_map)

    n = sub.add_parser("net", help="network quantities of a solved pattern")
    n.add_argument("-g", "--graph", required=True)
    n.add_argument("-r", "--radii", required=True)
    n.add_argument("-p", "--pattern")
    n.add_argument("--reff", nargs=2, metavar=("A", "Z"))
    n.add_argument("--vel", nargs=2, metavar=("V1", "V2"))
    n.add_argument("--profile", type=int, metavar="V0")
    n.add_argument("--radii-list", dest="profile_radii", default="")
    n.add_argument("-o", "--output", required=True)
    n.set_defaults(func=_cmd_net)

    c = sub.add_parser("converge", help="conformal-map convergence experiment")
    c.add_argument("--domain", choices=["disc", "square"], default="disc")
    c.add_argument("--map", default="moebius:0.3")
    c.add_argument("--levels", default="8,16,32")
    c.add_argument("--margin", type=float, default=0.2)
    c.add_argument("--q-max", type=float, default=4.0)
    c.add_argument("--seed", type=int, default=20260809)
    c.add_argument("--svg-dir")
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=_cmd_converge)

    r = sub.add_parser("rigidity", help="interpolation-family rigidity experiment")
    r.add_argument("--sizes", default="8,16,24")
    r.add_argument("--amp", type=float, default=0.1)
    r.add_argument("--tgrid", default="0,0.25,0.5,0.75,1")
    r.add_argument("--seed", type=int, default=20260809)
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=_cmd_rigidity)

    k = sub.add_parser("constants", help="estimate-chain constants diagnostic")
    k.add_argument("--alpha0", type=float, required=True)
    k.add_argument("--N", type=float, required=True)
    k.add_argument("--C1", type=float, required=True)
    k.add_argument("-o", "--output")
    k.set_defaults(func=_cmd_constants)

    t = sub.add_parser("tau", help="radius-to-distance diagnostic table")
    t.add_argument("-g", "--graph", required=True)
    t.add_argument("-p", "--pattern", required=True)
    t.add_argument("--origin", default="0,0")
    t.add_argument("-o", "--output", required=True)
    t.set_defaults(func=_cmd_tau)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KiteflowError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps(
            {"error": "IOError", "message": str(exc)}) + "\n")
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

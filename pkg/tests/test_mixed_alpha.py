"""End-to-end behavior on a non-orthogonal admissible labelling.

Columns alternate between alpha0 and pi - alpha0; adjacent columns then sum
to pi around every interior black vertex, so the labelling is admissible
and the isoradial assignment still solves the angle equations.
"""

import math

import numpy as np
import pytest

from kiteflow import bquad, dcmap, euclid, layout, network


def mixed_grid(n, m, alpha0=math.pi / 3):
    bq, _ = bquad.generate_square_grid(n, m, math.pi / 2)
    alphas = []
    for j in range(m):
        for i in range(n):
            alphas.append(alpha0 if i % 2 == 0 else math.pi - alpha0)
    lab = bquad.Labelling(tuple(alphas))
    assert bquad.check_admissible(bq, lab).admissible
    return bquad.derive_white_graph(bq), lab


def test_isoradial_solves_mixed_grid():
    g, lab = mixed_grid(6, 6)
    res = euclid.residual(g, lab, np.zeros(len(g.vertices)))
    assert max(abs(x) for x in res.values()) < 1e-14


def test_mixed_solve_layout_embed():
    g, lab = mixed_grid(6, 6)
    rng = np.random.default_rng(3)
    bnd = {v: math.exp(rng.uniform(-0.2, 0.2)) for v in g.boundary}
    rf, rep = euclid.solve_boundary_radii(g, lab, bnd)
    assert rep.converged
    pat = layout.layout(g, lab, rf.rho)
    worst, _ = layout.closure_residual(pat)
    assert worst <= 1e-9 * pat.diameter()
    ok, pair = layout.check_embedded(pat)
    assert ok, pair
    cons = layout.black_point_constructions(pat)
    tol = 1e-9 * pat.diameter()
    assert all(np.hypot(*(p - pat.black[b])) <= tol
               for b, pts in cons.items() for p in pts)
    qb = euclid.q_bound(g, lab, rf.rho)
    assert not qb.nonconvex_edges
    wg = network.conductances_from_pattern(g, lab, rf.rho)
    assert np.max(np.abs(np.array(wg.mu) - np.array(qb.ratios))) <= 1e-12


def test_mixed_map_and_subharmonicity():
    g, lab = mixed_grid(5, 5)
    rng = np.random.default_rng(9)
    src = layout.layout(g, lab, np.zeros(len(g.vertices)))
    b2 = {v: math.exp(rng.uniform(-0.2, 0.2)) for v in g.boundary}
    rf, _ = euclid.solve_boundary_radii(g, lab, b2)
    tgt = layout.layout(g, lab, rf.rho)
    dm = dcmap.build_map(src, tgt)
    for v in g.vertices:
        w = dcmap.eval_map(dm, src.center(v))
        assert np.hypot(*(w - tgt.center(v))) <= 1e-11 * tgt.diameter()
    assert dcmap.dilatation(dm).max < 2.0
    u = {v: math.exp(rf.rho[g.index(v)]) for v in g.vertices}
    lap = network.laplacian(
        network.conductances_from_pattern(g, lab, np.zeros(len(g.vertices))), u)
    for v in g.interior:
        assert lap[v] >= -1e-9


def test_mixed_max_principle_and_hyperbolic():
    from kiteflow import hyper

    g, lab = mixed_grid(4, 4)
    rng = np.random.default_rng(21)
    for _ in range(5):
        b1 = {v: math.exp(rng.uniform(-0.2, 0.2)) for v in g.boundary}
        b2 = {v: math.exp(rng.uniform(-0.2, 0.2)) for v in g.boundary}
        r1, _ = euclid.solve_boundary_radii(g, lab, b1)
        r2, _ = euclid.solve_boundary_radii(g, lab, b2)
        ok, _ = euclid.check_max_principle(g, lab, r1.rho, r2.rho)
        assert ok
    a, rep = hyper.minimize_s_hyp(g, lab, {v: -1.0 for v in g.boundary})
    assert rep.residual <= 1e-8
    base = {v: -1.0 for v in g.boundary}
    dom = {v: -0.8 for v in g.boundary}
    a2, _ = hyper.minimize_s_hyp(g, lab, dom)
    ok, info = hyper.check_max_principle_hyp(g, lab, a, a2)
    assert ok and info["min_interior_gap"] > 0

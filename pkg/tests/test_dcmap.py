import math

import numpy as np
import pytest

from kiteflow import bquad, dcmap, euclid, layout, network
from kiteflow.errors import (AngleMismatch, CombinatoricsMismatch,
                             DegenerateTriangle, NotEmbedded, OutsideDomain)


def laid_out(graph, lab, rho, **kw):
    return layout.layout(graph, lab, rho, **kw)


def solved_pair(sg_factory, n, seed, spread=0.3):
    graph, lab = sg_factory(n, n)
    rng = np.random.default_rng(seed)
    rho0 = np.zeros(len(graph.vertices))
    src = laid_out(graph, lab, rho0)
    bnd = {v: math.exp(rng.uniform(-spread, spread)) for v in graph.boundary}
    rf, _ = euclid.solve_boundary_radii(graph, lab, bnd)
    tgt = laid_out(graph, lab, rf.rho)
    return graph, lab, src, tgt


def test_identity_map(sg):
    g, lab = sg(4, 4)
    src = laid_out(g, lab, np.zeros(len(g.vertices)))
    dm = dcmap.build_map(src, src)
    rng = np.random.default_rng(0)
    pts = src.centers[rng.integers(0, len(g.vertices), 100)]
    for p in pts:
        assert np.hypot(*(dcmap.eval_map(dm, p) - p)) <= 1e-12
    rep = dcmap.dilatation(dm)
    assert np.max(np.abs(rep.per_triangle - 1.0)) <= 1e-12


def test_similarity_map(sg):
    g, lab = sg(4, 4)
    src = laid_out(g, lab, np.zeros(len(g.vertices)))
    a = 0.8 * np.exp(1j * 1.1)
    b = complex(-1.0, 2.0)
    root = src.anchor[0]
    w0 = a * complex(*src.center(root)) + b
    tgt = laid_out(g, lab, np.full(len(g.vertices), math.log(abs(a))),
                   anchor=(root, (w0.real, w0.imag),
                           src.anchor[2] + np.angle(a)))
    dm = dcmap.build_map(src, tgt)
    rng = np.random.default_rng(1)
    pts = src.centers[rng.integers(0, len(g.vertices), 60)]
    for p in pts:
        w = dcmap.eval_map(dm, p)
        assert abs(complex(*w) - (a * complex(*p) + b)) <= 1e-10
    assert dcmap.dilatation(dm).max <= 1 + 1e-9


def test_vertices_map_exactly(sg):
    g, lab, src, tgt = solved_pair(sg, 5, 3)
    dm = dcmap.build_map(src, tgt)
    for v in g.vertices:
        w = dcmap.eval_map(dm, src.center(v))
        assert np.hypot(*(w - tgt.center(v))) <= 1e-12 * tgt.diameter()
    for b in src.black:
        w = dcmap.eval_map(dm, src.black[b])
        assert np.hypot(*(w - tgt.black[b])) <= 1e-12 * tgt.diameter()


def test_barycenter_affine_arithmetic(sg):
    g, lab, src, tgt = solved_pair(sg, 4, 5)
    dm = dcmap.build_map(src, tgt)
    for k in range(0, dm.n_triangles, 7):
        bary = dm.tri_src[k].mean(axis=0)
        expect = dm.tri_tgt[k].mean(axis=0)
        got = dcmap.eval_map(dm, bary)
        assert np.hypot(*(got - expect)) <= 1e-11 * tgt.diameter()


def test_continuity_at_shared_edges(sg):
    g, lab, src, tgt = solved_pair(sg, 4, 8)
    dm = dcmap.build_map(src, tgt)
    # within a kite: the splitting diagonal midpoint
    corners = layout.kite_corners(src)
    tcorners = layout.kite_corners(tgt)
    for eid in range(corners.shape[0]):
        mid = 0.5 * (corners[eid, 0] + corners[eid, 2])
        w1 = dm.lin[2 * eid] @ mid + dm.off[2 * eid]
        w2 = dm.lin[2 * eid + 1] @ mid + dm.off[2 * eid + 1]
        assert np.hypot(*(w1 - w2)) <= 1e-9 * tgt.diameter()
        # across kites: each kite side midpoint maps consistently via eval
        for i in range(4):
            m = 0.5 * (corners[eid, i] + corners[eid, (i + 1) % 4])
            tm = 0.5 * (tcorners[eid, i] + tcorners[eid, (i + 1) % 4])
            w = dcmap.eval_map(dm, m)
            assert np.hypot(*(w - tm)) <= 1e-9 * tgt.diameter()


def test_outside_domain(sg):
    g, lab, src, tgt = solved_pair(sg, 3, 2)
    dm = dcmap.build_map(src, tgt)
    far = src.centers.max(axis=0) + np.array([10.0, 10.0])
    with pytest.raises(OutsideDomain):
        dcmap.eval_map(dm, far)


def test_build_map_validations(sg):
    g, lab, src, tgt = solved_pair(sg, 3, 4)
    g2, lab2 = sg(4, 3)
    other = laid_out(g2, lab2, np.zeros(len(g2.vertices)))
    with pytest.raises(CombinatoricsMismatch):
        dcmap.build_map(src, other)
    lab3 = bquad.Labelling(tuple(a for a in lab.alpha[:-1]) + (lab.alpha[-1],))
    # same alpha object is fine; a genuinely different labelling is not
    mixed = bquad.Labelling(tuple(math.pi / 3 for _ in lab.alpha))
    fake = layout.CirclePattern(g, mixed, tgt.rho, tgt.centers, tgt.radii,
                                tgt.black, tgt.anchor, tgt.tree_edges, {})
    with pytest.raises(AngleMismatch):
        dcmap.build_map(src, fake)
    centers = tgt.centers.copy()
    v = g.interior[0]
    u = g.neighbors(v)[0][1]
    centers[g.index(v)] = 2 * centers[g.index(u)] - centers[g.index(v)]
    broken = layout.CirclePattern(g, lab, tgt.rho, centers, tgt.radii,
                                  tgt.black, tgt.anchor, tgt.tree_edges, {})
    with pytest.raises(NotEmbedded):
        dcmap.build_map(src, broken)


def test_degenerate_triangle(sg):
    g, lab, src, tgt = solved_pair(sg, 3, 6)
    blk = dict(src.black)
    b0 = g.bquad.quads[0][1]
    blk[b0] = src.center(g.bquad.quads[0][0]).copy()   # collapse one corner
    broken = layout.CirclePattern(g, lab, src.rho, src.centers, src.radii,
                                  blk, src.anchor, src.tree_edges, {})
    with pytest.raises(DegenerateTriangle):
        dcmap.build_map(broken, tgt, require_embedded=False)


def test_stretch_dilatation(sg):
    g, lab = sg(4, 4)
    src = laid_out(g, lab, np.zeros(len(g.vertices)))
    stretch = np.diag([2.0, 1.0])
    tgt = layout.CirclePattern(
        g, lab, src.rho, src.centers @ stretch.T, src.radii,
        {k: stretch @ v for k, v in src.black.items()},
        src.anchor, src.tree_edges, {})
    dm = dcmap.build_map(src, tgt, require_embedded=False)
    rep = dcmap.dilatation(dm)
    assert np.max(np.abs(rep.per_triangle - 2.0)) <= 1e-9


def test_singular_values_are_radius_ratios_for_orthogonal_kites(sg):
    g, lab, src, tgt = solved_pair(sg, 5, 7)
    dm = dcmap.build_map(src, tgt)
    sv = dcmap.dilatation(dm).singular_values
    u = dcmap.ratio_function(src, tgt).u
    for eid, (va, vb) in enumerate(g.edges):
        pair = sorted((u[g.index(va)], u[g.index(vb)]), reverse=True)
        for t in (2 * eid, 2 * eid + 1):
            assert sv[t][0] == pytest.approx(pair[0], abs=1e-9)
            assert sv[t][1] == pytest.approx(pair[1], abs=1e-9)


def test_ratio_function_trivials(sg):
    g, lab, src, tgt = solved_pair(sg, 3, 9)
    r1 = dcmap.ratio_function(src, src)
    assert np.max(np.abs(r1.u - 1.0)) == 0.0
    scaled = layout.CirclePattern(g, lab, src.rho + math.log(3),
                                  src.centers * 3, src.radii * 3,
                                  {k: 3 * v for k, v in src.black.items()},
                                  src.anchor, src.tree_edges, {})
    r3 = dcmap.ratio_function(src, scaled)
    assert np.max(np.abs(r3.u - 3.0)) <= 1e-12


def test_bijectivity_probe(sg):
    g, lab, src, tgt = solved_pair(sg, 4, 10)
    fwd = dcmap.build_map(src, tgt)
    inv = dcmap.build_map(tgt, src)
    rng = np.random.default_rng(3)
    pts = src.centers[rng.integers(0, len(g.vertices), 40)]
    mids = 0.5 * (pts + src.centers[rng.integers(0, len(g.vertices), 40)])
    for p in list(pts) + [m for m in mids if _inside(fwd, m)]:
        w = dcmap.eval_map(fwd, p)
        back = dcmap.eval_map(inv, w)
        assert np.hypot(*(back - p)) <= 1e-9 * src.diameter()


def _inside(dm, p):
    try:
        dcmap.locate(dm, p)
        return True
    except OutsideDomain:
        return False


def test_subharmonicity_of_ratio(sg):
    rng = np.random.default_rng(17)
    for trial in range(10):
        g, lab = sg(5, 5)
        b1 = {v: math.exp(rng.uniform(-0.4, 0.4)) for v in g.boundary}
        b2 = {v: math.exp(rng.uniform(-0.4, 0.4)) for v in g.boundary}
        rf1, _ = euclid.solve_boundary_radii(g, lab, b1)
        rf2, _ = euclid.solve_boundary_radii(g, lab, b2)
        u = {v: math.exp(rf2.rho[g.index(v)] - rf1.rho[g.index(v)])
             for v in g.vertices}
        wg1 = network.conductances_from_pattern(g, lab, rf1.rho)
        wg2 = network.conductances_from_pattern(g, lab, rf2.rho)
        lap_u = network.laplacian(wg1, u)
        lap_inv = network.laplacian(wg2, {v: 1.0 / u[v] for v in u})
        for v in g.interior:
            assert lap_u[v] >= -1e-9
            assert lap_inv[v] >= -1e-9
        # radius-quotient extremes on the boundary
        vals = np.array([u[v] for v in g.vertices])
        bvals = np.array([u[v] for v in g.boundary])
        assert vals.max() <= bvals.max() + 1e-12
        assert vals.min() >= bvals.min() - 1e-12


def test_sup_error_trivials(sg):
    g, lab, src, tgt = solved_pair(sg, 3, 12)
    dm = dcmap.build_map(src, src)
    samples = [tuple(p) for p in src.centers]
    assert dcmap.sup_error(dm, lambda z: z, samples) <= 1e-12
    a, b = complex(2.0, 1.0), complex(-0.5, 0.25)
    err = dcmap.sup_error(dm, lambda z: a * z + b, samples, similarity=(a, b))
    assert err <= 1e-10

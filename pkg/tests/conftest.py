import math

import numpy as np
import pytest

from kiteflow import bquad, euclid


@pytest.fixture
def sg():
    def make(n, m, alpha=math.pi / 2):
        bq, lab = bquad.generate_square_grid(n, m, alpha)
        return bquad.derive_white_graph(bq), lab
    return make


@pytest.fixture
def solved_sg(sg):
    """Solved SG instance with seeded random boundary radii."""
    def make(n, m, seed=0, spread=0.4, tol=1e-10):
        graph, lab = sg(n, m)
        rng = np.random.default_rng(seed)
        bnd = {v: math.exp(rng.uniform(-spread, spread)) for v in graph.boundary}
        rf, rep = euclid.solve_boundary_radii(graph, lab, bnd, tol=tol)
        return graph, lab, rf, rep
    return make


def hex_packing_complex(rings=2):
    """Quad complex of a hexagonal circle packing patch, plus exact radii.

    Lattice circles (radius 1/2 for unit edge length) and face circles
    through the three tangency points (radius 1/(2*sqrt(3))) form an
    orthogonal pattern; quads pair each triangle with each of its corners.
    Returns (quad list, radius per white id, lattice white ids, face white
    ids).
    """
    pts = sorted((q, r) for q in range(-rings, rings + 1)
                 for r in range(-rings, rings + 1) if abs(q + r) <= rings)
    pset = set(pts)

    def xy(q, r):
        return (q + r / 2.0, r * math.sqrt(3) / 2.0)

    tris = []
    for q, r in pts:
        up = ((q, r), (q + 1, r), (q, r + 1))
        dn = ((q + 1, r), (q, r + 1), (q + 1, r + 1))
        for t in (up, dn):
            if all(p in pset for p in t):
                tris.append(t)
    tris = sorted(set(tris))
    edges = sorted({tuple(sorted((t[i], t[(i + 1) % 3]))) for t in tris
                    for i in range(3)})

    ids = {}
    for p in pts:
        ids[("v", p)] = len(ids)
    for t in tris:
        ids[("f", t)] = len(ids)
    for e in edges:
        ids[("e", e)] = len(ids)

    def centroid(t):
        xs = [xy(*p) for p in t]
        return (sum(x for x, _ in xs) / 3.0, sum(y for _, y in xs) / 3.0)

    def midpoint(e):
        a, b = xy(*e[0]), xy(*e[1])
        return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)

    quads = []
    for t in tris:
        for v in t:
            e1, e2 = sorted(tuple(sorted((v, w))) for w in t if w != v)
            corners = [ids[("v", v)], ids[("e", e1)], ids[("f", t)], ids[("e", e2)]]
            px = [xy(*v), midpoint(e1), centroid(t), midpoint(e2)]
            area = sum(px[i][0] * px[(i + 1) % 4][1]
                       - px[(i + 1) % 4][0] * px[i][1] for i in range(4))
            if area < 0:
                corners = [corners[0], corners[3], corners[2], corners[1]]
            quads.append(tuple(corners))

    radii = {}
    for p in pts:
        radii[ids[("v", p)]] = 0.5
    for t in tris:
        radii[ids[("f", t)]] = 1.0 / (2.0 * math.sqrt(3))
    lattice = [ids[("v", p)] for p in pts]
    faces = [ids[("f", t)] for t in tris]
    return quads, radii, lattice, faces


@pytest.fixture
def hex_patch():
    return hex_packing_complex

"""JSON schemas and canonical serialization for all file-facing types.

Numbers are emitted with Python's shortest round-trip representation, so a
save/load cycle is bit-exact.  Reports use canonical dumps (sorted keys,
fixed separators) to make identical runs byte-identical.
"""

import json
import math

import numpy as np

from . import hyper
from .errors import ParseError
from .euclid import RadiusFunction
from .layout import CirclePattern


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path, obj, canonical=False):
    text = canonical_dumps(obj) if canonical else json.dumps(obj, indent=1) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


# radii ------------------------------------------------------------------------

def radii_to_dict(rf: RadiusFunction) -> dict:
    return {"r": [float(x) for x in rf.as_array()]}


def radii_from_dict(doc, graph) -> RadiusFunction:
    try:
        values = [float(x) for x in doc["r"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed radii document: {exc}") from exc
    if len(values) != len(graph.vertices):
        raise ParseError("radii list length does not match white vertex count")
    if any(not math.isfinite(v) or v <= 0 for v in values):
        raise ParseError("radii must be finite and positive")
    return RadiusFunction(tuple(graph.vertices),
                          np.log(np.asarray(values, dtype=float)),
                          tuple(values))


def boundary_from_dict(doc) -> dict:
    """{"boundary": [[vertex id, radius], ...]} -> dict."""
    try:
        return {int(v): float(r) for v, r in doc["boundary"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed boundary document: {exc}") from exc


# hyperbolic assignments --------------------------------------------------------

def hyp_to_dict(a: hyper.HypRadiusAssignment) -> dict:
    rho = [0.0 if k == hyper.KIND_BETA else float(x)
           for x, k in zip(a.values, a.kinds)]
    beta = [float(x) if k == hyper.KIND_BETA else 0.0
            for x, k in zip(a.values, a.kinds)]
    return {"rho": rho, "kind": list(a.kinds), "beta": beta}


def hyp_from_dict(doc, graph) -> hyper.HypRadiusAssignment:
    try:
        rho = [float(x) for x in doc["rho"]]
        kind = [str(k) for k in doc["kind"]]
        beta = [float(x) for x in doc["beta"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed hyperbolic document: {exc}") from exc
    if not (len(rho) == len(kind) == len(beta) == len(graph.vertices)):
        raise ParseError("hyperbolic arrays must match white vertex count")
    values = [b if k == hyper.KIND_BETA else r
              for r, k, b in zip(rho, kind, beta)]
    return hyper.HypRadiusAssignment(tuple(graph.vertices),
                                     np.asarray(values, dtype=float),
                                     tuple(kind))


def hyp_boundary_from_dict(doc) -> dict:
    out = {}
    try:
        for v, r in doc.get("rho", []):
            out[int(v)] = ("rho", float(r))
        for v, b in doc.get("beta", []):
            out[int(v)] = ("beta", float(b))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed hyperbolic boundary document: {exc}") from exc
    if not out:
        raise ParseError("hyperbolic boundary document is empty")
    return out


# patterns -----------------------------------------------------------------------

def pattern_to_dict(p: CirclePattern) -> dict:
    return {
        "center": [[float(x), float(y)] for x, y in p.centers],
        "radius": [float(r) for r in p.radii],
        "black": [[float(p.black[b][0]), float(p.black[b][1])]
                  for b in sorted(p.black)],
    }


def pattern_from_dict(doc, graph, alpha) -> CirclePattern:
    try:
        centers = np.asarray(doc["center"], dtype=float)
        radii = np.asarray(doc["radius"], dtype=float)
        blk = np.asarray(doc["black"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed pattern document: {exc}") from exc
    if centers.shape != (len(graph.vertices), 2):
        raise ParseError("center array shape mismatch")
    if radii.shape != (len(graph.vertices),):
        raise ParseError("radius array shape mismatch")
    blacks = sorted(graph.bquad.black)
    if blk.shape != (len(blacks), 2):
        raise ParseError("black point array shape mismatch")
    root = min(graph.vertices)
    ref_edge = min(eid for eid, _ in graph.neighbors(root))
    other = graph.other_end(ref_edge, root)
    d = centers[graph.index(other)] - centers[graph.index(root)]
    anchor = (root, (float(centers[graph.index(root)][0]),
                     float(centers[graph.index(root)][1])),
              float(np.arctan2(d[1], d[0])))
    return CirclePattern(graph, alpha, np.log(radii), centers, radii,
                         {b: blk[i] for i, b in enumerate(blacks)},
                         anchor, frozenset(), {})


# vertex sets ---------------------------------------------------------------------

def vertex_set_from_dict(doc):
    try:
        return [int(v) for v in doc["vertices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed vertex-set document: {exc}") from exc

import json
import math

import pytest

from kiteflow import cli, io


def run(argv):
    return cli.main(argv)


def test_gen_solve_layout_map_pipeline(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert run(["gen", "sg", "--n", "4", "--m", "4",
                "--alpha", repr(math.pi / 2), "-o", str(g)]) == 0

    doc = io.read_json(g)
    assert set(doc) == {"white", "black", "quads", "alpha"}

    from kiteflow import bquad
    bq, lab = bquad.load_bquad(g)
    graph = bquad.derive_white_graph(bq)
    bnd = tmp_path / "b.json"
    io.write_json(bnd, {"boundary": [[v, 1.0 + 0.1 * (v % 3)]
                                     for v in graph.boundary]})
    r = tmp_path / "r.json"
    assert run(["solve", "-g", str(g), "-b", str(bnd), "-o", str(r)]) == 0

    pat = tmp_path / "p.json"
    svg = tmp_path / "p.svg"
    assert run(["layout", "-g", str(g), "-r", str(r), "-o", str(pat),
                "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<?xml")

    pts = tmp_path / "pts.json"
    pdoc = io.read_json(pat)
    io.write_json(pts, {"points": pdoc["center"][:5]})
    out = tmp_path / "images.json"
    assert run(["map", "-g", str(g), "-s", str(pat), "-t", str(pat),
                "--eval", str(pts), "--dilatation", "-o", str(out)]) == 0
    odoc = io.read_json(out)
    assert odoc["dilatation_max"] == pytest.approx(1.0, abs=1e-9)
    for p, q in zip(pdoc["center"][:5], odoc["images"]):
        assert abs(p[0] - q[0]) < 1e-9 and abs(p[1] - q[1]) < 1e-9


def test_net_subcommand(tmp_path):
    g = tmp_path / "g.json"
    run(["gen", "sg", "--n", "3", "--m", "3", "-o", str(g)])
    from kiteflow import bquad
    bq, lab = bquad.load_bquad(g)
    graph = bquad.derive_white_graph(bq)
    bnd = tmp_path / "b.json"
    io.write_json(bnd, {"boundary": [[v, 1.0] for v in graph.boundary]})
    r = tmp_path / "r.json"
    run(["solve", "-g", str(g), "-b", str(bnd), "-o", str(r)])
    A = tmp_path / "A.json"
    Z = tmp_path / "Z.json"
    io.write_json(A, {"vertices": [graph.interior[0]]})
    io.write_json(Z, {"vertices": list(graph.boundary)})
    out = tmp_path / "net.json"
    assert run(["net", "-g", str(g), "-r", str(r), "--reff", str(A), str(Z),
                "--vel", str(A), str(Z), "-o", str(out)]) == 0
    doc = io.read_json(out)
    assert doc["reff"] > 0 and doc["vel"] > 0 and doc["mod"] > 0

    p = tmp_path / "p.json"
    run(["layout", "-g", str(g), "-r", str(r), "-o", str(p)])
    prof = tmp_path / "prof.json"
    assert run(["net", "-g", str(g), "-r", str(r), "-p", str(p),
                "--profile", str(graph.interior[0]),
                "--radii-list", "0.5,1.5,3", "-o", str(prof)]) == 0
    vals = io.read_json(prof)["profile"]
    finite = [v for v in vals if v is not None]
    assert finite == sorted(finite)


def test_hsolve(tmp_path):
    g = tmp_path / "g.json"
    run(["gen", "sg", "--n", "3", "--m", "3", "-o", str(g)])
    from kiteflow import bquad
    bq, _ = bquad.load_bquad(g)
    graph = bquad.derive_white_graph(bq)
    b = tmp_path / "b.json"
    io.write_json(b, {"rho": [[v, -1.0] for v in graph.boundary]})
    out = tmp_path / "rho.json"
    assert run(["hsolve", "-g", str(g), "-b", str(b), "-o", str(out)]) == 0
    doc = io.read_json(out)
    assert set(doc) == {"rho", "kind", "beta"}
    assert all(k in ("int", "bnd", "beta") for k in doc["kind"])


def test_converge_and_rigidity(tmp_path, capsys):
    out = tmp_path / "conv.json"
    svgdir = tmp_path / "svgs"
    assert run(["converge", "--domain", "disc", "--map", "moebius:0.3",
                "--levels", "4,8", "--margin", "0.2", "-o", str(out),
                "--svg-dir", str(svgdir)]) == 0
    doc = io.read_json(out)
    assert [r["n"] for r in doc["rows"]] == [4, 8]
    assert (svgdir / "level8_source.svg").exists()

    rout = tmp_path / "rig.json"
    assert run(["rigidity", "--sizes", "6,8", "--amp", "0.1",
                "--tgrid", "0,0.5,1", "-o", str(rout)]) == 0
    rdoc = io.read_json(rout)
    assert all(r["max_harmonicity_residual"] <= 1e-5 for r in rdoc["rows"])


def test_constants_and_tau(tmp_path, capsys):
    assert run(["constants", "--alpha0", "1.0", "--N", "2", "--C1", "1"]) == 0
    out = capsys.readouterr().out
    doc = json.loads(out[:out.rindex("}") + 1])
    assert doc["C0"] == pytest.approx(1 / math.sin(1.0))

    g = tmp_path / "g.json"
    run(["gen", "sg", "--n", "3", "--m", "3", "-o", str(g)])
    from kiteflow import bquad
    bq, _ = bquad.load_bquad(g)
    graph = bquad.derive_white_graph(bq)
    b = tmp_path / "b.json"
    io.write_json(b, {"boundary": [[v, 1.0] for v in graph.boundary]})
    r = tmp_path / "r.json"
    run(["solve", "-g", str(g), "-b", str(b), "-o", str(r)])
    p = tmp_path / "p.json"
    run(["layout", "-g", str(g), "-r", str(r), "-o", str(p)])
    t = tmp_path / "tau.json"
    assert run(["tau", "-g", str(g), "-p", str(p), "--origin=-40,-40",
                "-o", str(t)]) == 0
    assert io.read_json(t)["max_boundary_tau"] < 1.0


def test_error_exit_codes(tmp_path, capsys):
    # missing input file: domain error, machine-readable JSON on stderr
    assert run(["solve", "-g", str(tmp_path / "nope.json"),
                "-b", str(tmp_path / "b.json"), "-o", str(tmp_path / "r.json")]) == 1
    err = capsys.readouterr().err
    doc = json.loads(err)
    assert doc["error"] == "IOError"

    # malformed boundary file: structured parse error
    g = tmp_path / "g.json"
    run(["gen", "sg", "--n", "2", "--m", "2", "-o", str(g)])
    bad = tmp_path / "bad.json"
    bad.write_text("{\"boundary\": 7}")
    assert run(["solve", "-g", str(g), "-b", str(bad),
                "-o", str(tmp_path / "r.json")]) == 1
    doc = json.loads(capsys.readouterr().err)
    assert doc["error"] == "ParseError"

    # unknown flag: argparse usage error, exit code 2
    with pytest.raises(SystemExit) as exc:
        run(["gen", "sg", "--n", "2", "--m", "2", "--frobnicate", "-o",
             str(tmp_path / "x.json")])
    assert exc.value.code == 2


def test_seed_env_override(tmp_path, monkeypatch):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    run(["rigidity", "--sizes", "6", "--tgrid", "0,1", "-o", str(out1)])
    monkeypatch.setenv("KITEFLOW_SEED", "12345")
    run(["rigidity", "--sizes", "6", "--tgrid", "0,1", "-o", str(out2)])
    d1, d2 = io.read_json(out1), io.read_json(out2)
    assert d1["prng"]["seed"] == 20260809
    assert d2["prng"]["seed"] == 12345
    assert d1["rows"] != d2["rows"]


def test_cli_reports_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        run(["converge", "--levels", "4", "--margin", "0.2", "-o", str(out)])
    assert a.read_bytes() == b.read_bytes()


def test_radii_file_roundtrip_bit_exact(tmp_path):
    import numpy as np

    from kiteflow import bquad, euclid

    bq, lab = bquad.generate_square_grid(3, 3, math.pi / 2)
    graph = bquad.derive_white_graph(bq)
    rng = np.random.default_rng(5)
    bnd = {v: math.exp(rng.uniform(-1, 1)) for v in graph.boundary}
    rf, _ = euclid.solve_boundary_radii(graph, lab, bnd)
    d1 = io.radii_to_dict(rf)
    d2 = io.radii_to_dict(io.radii_from_dict(d1, graph))
    assert json.dumps(d1) == json.dumps(d2)


def test_hyp_file_roundtrip(tmp_path):
    from kiteflow import bquad, hyper

    bq, lab = bquad.generate_square_grid(3, 3, math.pi / 2)
    graph = bquad.derive_white_graph(bq)
    bvals = {v: ("beta", 0.3) if k == 0 else ("rho", -1.0)
             for k, v in enumerate(graph.boundary)}
    a, _ = hyper.minimize_s_hyp(graph, lab, bvals)
    doc = io.hyp_to_dict(a)
    back = io.hyp_from_dict(doc, graph)
    assert back.kinds == a.kinds
    assert json.dumps(io.hyp_to_dict(back)) == json.dumps(doc)

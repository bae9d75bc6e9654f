import numpy as np
import pytest

import bwtransport as bwt

A = np.diag([4.0, 1.0, 0.0])
B = np.array([[0, 0, 0], [0, 4, 2], [0, 2, 1]], dtype=float)
C = np.diag([0.0, 0.0, 1.0])


def test_distance():
    assert bwt.w2_squared(A, B) == pytest.approx(6.0, abs=1e-12)
    assert bwt.w2_distance(A, A) == 0.0
    assert bwt.rank(A) == 2


def test_maps():
    t = bwt.canonical_spd_map(A, B)["t"]
    np.testing.assert_allclose(t, [[0, 0, 0], [0, 2, 1], [0, 1, 0.5]], atol=1e-12)
    m = bwt.ot_map(A, C)
    np.testing.assert_allclose(m["t"] @ A @ m["t"].T, C, atol=1e-10)
    with pytest.raises(bwt.NoSpdMap):
        bwt.canonical_spd_map(A, C)
    with pytest.raises(bwt.Unreachable):
        bwt.ot_map(C, A)
    assert isinstance(bwt.NoSpdMap("x"), bwt.Error)


def test_spd_and_schur():
    assert all(bwt.spd_reachability(A, B).values())
    assert not any(bwt.spd_reachability(A, C).values())
    np.testing.assert_allclose(bwt.schur_complement(A, C), C, atol=1e-12)


def test_geodesic_and_barycenter():
    e1, e2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    mid = bwt.geodesic(e1, e2, [0.5], style="scaled", s=0.0)[0]
    np.testing.assert_allclose(mid, np.diag([0.25, 0.25]), atol=1e-12)
    r = bwt.barycenter([e1, e2])
    assert r["objective"] == pytest.approx(0.5, abs=1e-9)
    assert r["frechet_variance"] == pytest.approx(0.5, abs=1e-9)
    assert np.all(np.diff(r["history"]) >= -1e-12)
    with pytest.raises(bwt.InvalidInput):
        bwt.barycenter([e1, e2], weights=[0.3, 0.3])


def test_gproc():
    assert bwt.ibm_w2_analytic(1, 3) == (41, 120)
    assert bwt.ibm_w2_numeric(2, 2, 50) == 0.0
    assert bwt.cross_gram(1, 1, 50)["kind"] == "psd"


def test_cli_reports_match_schemas(cli, schemas, write_matrix, tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    a, b = write_matrix("a.json", A), write_matrix("b.json", B)
    e1, e2 = write_matrix("e1.json", np.diag([1, 0])), write_matrix("e2.json", np.diag([0, 1]))
    reports = {
        "distance": cli("distance", a, b),
        "map": cli("map", a, b, "--spd-canonical", "--out", tmp_path / "t.json"),
        "geodesic": cli("geodesic", a, b, "--out-dir", tmp_path / "geo"),
        "barycenter": cli("barycenter", e1, e2),
        "gp": cli("gp", 1, 2, "--m", 40, "--refine"),
    }
    assert set(reports) == set(schemas)
    for name, rep in reports.items():
        jsonschema.validate(rep, schemas[name])
    assert reports["barycenter"]["midpoint_family"]["member"]
    cli("map", a, write_matrix("c.json", C), "--spd-canonical", expect=4)

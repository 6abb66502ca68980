import json
import math
import os

import numpy as np
import pytest

import gbl


def test_canonical_plane():
    P0 = gbl.GrassmannPoint.canonical(3, 2)
    assert P0.frame.shape == (3, 5)
    assert gbl.v_value(P0, P0) == pytest.approx(1.0)
    assert gbl.distance(P0, P0) == pytest.approx(0.0, abs=1e-12)


def test_chart_and_v():
    rng = np.random.default_rng(3)
    P0 = gbl.GrassmannPoint.canonical(3, 2)
    Z = 0.5 * rng.standard_normal((3, 2))
    P = gbl.from_chart(Z, P0)
    assert np.allclose(gbl.to_chart(P, P0), Z, atol=1e-10)
    expected = math.sqrt(np.linalg.det(np.eye(3) + Z @ Z.T))
    assert gbl.v_value(P, P0) == pytest.approx(expected, rel=1e-12)
    thetas = gbl.jordan_angles(P, P0)
    assert np.prod(1.0 / np.cos(thetas)) == pytest.approx(expected, rel=1e-10)
    assert np.linalg.norm(gbl.t_embedding(Z)) == pytest.approx(expected - 1.0, abs=1e-10)


def test_rank_deficient_frame_raises():
    with pytest.raises(gbl.Error):
        gbl.GrassmannPoint(np.zeros((2, 4)))


def test_K0_and_constants():
    r = gbl.compute_K0(4, 3, 1.0, audit_samples=1000)
    assert r["K0"] == 1.0
    r = gbl.compute_K0(4, 3, 2.9, audit_samples=2000)
    assert 0.0 < r["K0"] < 1.0
    assert r["worst_violation"] >= 0.0
    closed = sorted(row["closed_form"] for row in gbl.auxiliary_extrema())
    assert closed == pytest.approx(sorted([13.5, 5 + 2 * math.sqrt(6), (187 - 38 * math.sqrt(19)) / 27]))


def test_graph_geometry():
    G = gbl.builtin_graph("holomorphic_pair")
    x = np.array([0.3, -0.2, 0.1])
    pg = gbl.point_geometry(G, x)
    assert pg["slope"] == pytest.approx(1 + 4 * (0.09 + 0.04), rel=1e-12)
    assert np.linalg.norm(pg["meanH"]) < 1e-10
    P0 = gbl.GrassmannPoint.canonical(3, 2)
    closed = gbl.laplacian_v_closed_form(G, x, P0)
    fd = gbl.laplacian_v_finite_difference(G, x, P0, 1e-3)
    assert fd == pytest.approx(closed, rel=1e-3)
    with pytest.raises(gbl.Error):
        gbl.builtin_graph("helicoid")


def test_shrinking():
    assert gbl.shrink_threshold(3.0) == pytest.approx(math.sqrt(6) / 2, abs=1e-12)
    e = gbl.compute_epsilon1(3.0, 2.9, 2, 2)
    assert e["epsilon1"] > 0.0
    P1 = gbl.GrassmannPoint.canonical(2, 2)
    Q = gbl.from_chart(np.array([[1.2, 0.0], [0.0, 0.9]]), P1)
    b = gbl.v_value(Q, P1)
    step = gbl.shrink_center(P1, Q, 3.0, b, 2.9)
    assert step["new_bound_on_Q"] <= b - e["epsilon1"] + 1e-12


def test_run_matches_itself():
    text, code = gbl.run("certify", samples=2000, seed=42)
    again, _ = gbl.run("certify", samples=2000, seed=42)
    assert code == 0
    assert text == again
    report = json.loads(text)
    assert report["schema"] == 1
    assert report["status"] == "PASS"


def test_run_graph_spec_and_usage_errors():
    spec = os.path.join(os.environ.get("GBL_TEST_DATA", ""), "holomorphic_poly.json")
    if os.path.exists(spec):
        text, code = gbl.run("graph", graph_spec=spec, samples=3)
        assert code == 0
    csv, code = gbl.run("lemmas", which="aux", format="csv")
    assert code == 0 and csv.startswith("name,")
    with pytest.raises(ValueError):
        gbl.run("certify", beta0=3.5)
    with pytest.raises(ValueError):
        gbl.run("certify", bogus=1)

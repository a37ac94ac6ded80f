import json

import pytest
from fastapi.testclient import TestClient

from transferops.fixtures import GRAPH_DOCS, MATRIX_DOCS
from transferops.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200 and resp.json()["status"] == "ok"


class TestGraphEndpoints:
    def test_classify_fixture(self, client):
        resp = client.post(
            "/graph/classify",
            json={"fixture": "g_2loop", "lambda_mode": "uniform", "depth": 3},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["is_exel"] and body["is_regular"] and body["outcome"] == "pass"

    def test_classify_inline_document(self, client):
        resp = client.post(
            "/graph/classify",
            json={"document": GRAPH_DOCS["g_line"], "depth": 2},
        )
        assert resp.status_code == 200
        assert resp.json()["is_corner"] is True

    def test_check_lambda(self, client):
        resp = client.post("/graph/check-lambda", json={"fixture": "g_2loop"})
        body = resp.json()
        assert body["verdict"] == "holds" and body["sup"] == "1"

    def test_ideals(self, client):
        resp = client.post("/graph/ideals", json={"fixture": "g_fork", "depth": 2})
        body = resp.json()
        assert body["covariance_span"]["equal"] is True
        assert {"path": [], "vertex": "w1"} in body["N_L"]

    def test_represent(self, client):
        resp = client.post("/graph/represent", json={"fixture": "g_line", "depth": 2})
        body = resp.json()
        assert body["outcome"] == "pass"
        assert body["partial_isometry"]["is_partial_isometry"] is True
        assert all(c["passed"] for c in body["verification"]["checks"])

    def test_missing_weights_is_400(self, client):
        doc = {"vertices": ["v"], "edges": [{"id": "e", "src": "v", "rng": "v"}]}
        resp = client.post("/graph/classify", json={"document": doc, "depth": 2})
        assert resp.status_code == 400

    def test_edgeless_graph_needs_no_weights(self, client):
        resp = client.post("/graph/represent", json={"fixture": "g_point", "depth": 1})
        assert resp.status_code == 200 and resp.json()["outcome"] == "pass"

    def test_unknown_fixture_is_400(self, client):
        resp = client.post("/graph/classify", json={"fixture": "nope"})
        assert resp.status_code == 400

    def test_schema_violation_is_422(self, client):
        resp = client.post("/graph/classify", json={"depth": "soon"})
        assert resp.status_code == 422

    def test_both_sources_rejected(self, client):
        resp = client.post(
            "/graph/classify",
            json={"fixture": "g_line", "document": GRAPH_DOCS["g_line"]},
        )
        assert resp.status_code == 422


class TestCpEndpoints:
    def test_analyze(self, client):
        resp = client.post(
            "/cp/analyze",
            json={"matrix": MATRIX_DOCS["m_half"], "subalgebra": [[0, 1]]},
        )
        body = resp.json()
        assert body["norm"] == "1"
        assert body["gns_kernel_support"] == []
        assert body["multiplicative_domain"]["dimension"] == 1
        assert body["faithfulness"]["verdict"] is True
        assert body["conditional_expectation"]["verdict"] is False

    def test_quiver(self, client):
        resp = client.post("/cp/quiver", json={"fixture": "m_half"})
        body = resp.json()
        assert body["roundtrip_exact"] and len(body["quiver"]["edges"]) == 3

    def test_correspondence(self, client):
        resp = client.post("/cp/correspondence", json={"fixture": "m_half"})
        body = resp.json()
        assert body["dimension"] == 3
        assert body["quiver_dimension"]["actions_match"] is True

    def test_enumerate_regular(self, client):
        resp = client.post("/exel/enumerate-regular", json={"fixture": "m_two_sections"})
        body = resp.json()
        assert body["status"] == "ok" and body["count"] == 2

    def test_enumerate_regular_negative(self, client):
        resp = client.post("/exel/enumerate-regular", json={"fixture": "m_nonideal"})
        body = resp.json()
        assert body["outcome"] == "fail" and body["status"] == "image_not_ideal"

    def test_bad_matrix_400(self, client):
        resp = client.post("/cp/analyze", json={"matrix": [["1", "2"]]})
        assert resp.status_code == 400


def test_fixture_listing(client):
    resp = client.get("/fixtures")
    names = [f["name"] for f in resp.json()["fixtures"]]
    for expected in ["g_line", "g_loop", "g_2loop", "g_fork", "m_half"]:
        assert expected in names
    assert sum(1 for f in resp.json()["fixtures"] if f["kind"] == "regression-graph") == 20


def test_determinism_byte_identical(client):
    payload = {"fixture": "g_2loop", "lambda_mode": "uniform", "depth": 3}
    a = client.post("/graph/classify", json=payload).content
    b = client.post("/graph/classify", json=payload).content
    assert a == b

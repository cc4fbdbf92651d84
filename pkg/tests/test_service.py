from fastapi.testclient import TestClient

from mfcover.mf import format_mf
from mfcover.service import EXIT, app, handle

client = TestClient(app)


def test_health():
    r = client.get("/v1/health")
    assert r.status_code == 200 and r.json()["status"] == "ok"


def test_verify_endpoint(e6):
    r = client.post("/v1/verify", json={"params": {"mf": format_mf(e6.get("B"))}})
    body = r.json()
    assert r.status_code == 200 and body["status"] == "pass" and body["schema"] == "v1"


def test_decompose_endpoint_with_config(e6):
    r = client.post("/v1/decompose", json={"config": {"seed": 5, "cache": False},
                                           "params": {"mf": format_mf(e6.get("X")), "catalog": "E6"}})
    body = r.json()
    assert body["result"]["decomposition"] == {"X": 1}
    assert body["config"]["seed"] == 5 and body["config"]["cache"] is False


def test_errors():
    r = client.post("/v1/nope", json={"params": {}})
    assert r.status_code == 404 and r.json()["status"] == "error"
    r = client.post("/v1/verify", json={"params": {"mf": "garbage"}})
    assert r.status_code == 422
    r = client.post("/v1/bounds", json={"params": {}})
    assert r.status_code == 422


def test_handle_in_process(e6):
    rep = handle("sigma", {"mf": format_mf(e6.get("M1"))})
    assert rep["status"] == "pass" and rep["result"]["annihilator_power"] == 1
    assert EXIT[rep["status"]] == 0


def test_prec_override(e6):
    rep = handle("verify", {"mf": format_mf(e6.get("N1"))}, {"prec": 12})
    assert rep["status"] == "pass"
    assert rep["config"]["prec"] == 12


def test_quiver_endpoint():
    r = client.post("/v1/quiver", json={"params": {"ring": [3, 4], "ideals": {"N1": [3, 4]}}})
    body = r.json()
    assert body["status"] == "pass" and body["result"]["vertices"]

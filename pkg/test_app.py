"""
Tests for the Flask JSON API
"""

import pytest

from app import app


@pytest.fixture
def client():
    app.config["TESTING"] = True
    with app.test_client() as client:
        yield client


def k5_edges():
    return [[u, v] for u in range(5) for v in range(u + 1, 5)]


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    data = response.get_json()
    assert data["status"] == "healthy"
    assert "google_sheets_configured" in data


def test_catalog(client):
    data = client.get("/api/catalog?k=4").get_json()
    assert data["k"] == 4
    assert data["count"] == 6
    assert len(data["patterns"]) == 6


def test_catalog_out_of_range(client):
    response = client.get("/api/catalog?k=9")
    assert response.status_code == 400
    assert "error" in response.get_json()


def test_coverage_of_complete_graph(client):
    response = client.post("/api/coverage", json={"edges": k5_edges(), "k": 5, "seed": 3})
    assert response.status_code == 200
    data = response.get_json()
    assert (data["nodes"], data["edges"]) == (5, 10)
    (pattern,) = data["patterns"]
    assert pattern["nc"] == 1.0
    assert pattern["instances"] == 1


def test_coverage_needs_edges(client):
    assert client.post("/api/coverage", json={}).status_code == 400
    assert client.post("/api/coverage", json={"edges": [[1, 2, 3]]}).status_code == 400


def test_run_with_bad_config_is_rejected(client):
    response = client.post("/api/run", json={"k": 9})
    assert response.status_code == 400
    assert response.get_json()["success"] is False


def test_run_without_events_is_rejected(client, tmp_path):
    response = client.post("/api/run", json={"output_dir": str(tmp_path)})
    assert response.status_code == 400


def test_run_with_undecodable_events_is_rejected(client, tmp_path):
    events = tmp_path / "events.csv"
    events.write_bytes(b"\xff\xfe\n")
    response = client.post("/api/run", json={"events_path": str(events), "output_dir": str(tmp_path / "out")})
    assert response.status_code == 400
    assert "UTF-8" in response.get_json()["error"]

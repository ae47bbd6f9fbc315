import io
import json

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from pylonroute.service import app, reset_store


@pytest.fixture
def client():
    reset_store()
    return TestClient(app)


def upload(client, scenario_dir, mutate=None):
    doc = json.loads((scenario_dir / "scenario.json").read_text())
    if mutate:
        mutate(doc)
    files = [
        ("scenario", ("scenario.json", json.dumps(doc).encode(),
                      "application/json")),
        ("grids", ("terrain.asc",
                   (scenario_dir / "terrain.asc").read_bytes(),
                   "text/plain")),
        ("grids", ("water.asc",
                   (scenario_dir / "water.asc").read_bytes(),
                   "text/plain")),
    ]
    return client.post("/api/scenario", files=files)


def line_features(doc):
    return [f for f in doc["features"]
            if f["geometry"]["type"] == "LineString"]


def test_health(client):
    assert client.get("/api/health").status_code == 200


class TestUpload:
    def test_valid_upload_returns_id(self, client, scenario_dir):
        r = upload(client, scenario_dir)
        assert r.status_code == 200
        assert "scenario_id" in r.json()

    def test_reupload_gets_fresh_id(self, client, scenario_dir):
        a = upload(client, scenario_dir).json()["scenario_id"]
        b = upload(client, scenario_dir).json()["scenario_id"]
        assert a != b

    def test_missing_grid_file_is_400(self, client, scenario_dir):
        doc = json.loads((scenario_dir / "scenario.json").read_text())
        files = [("scenario", ("scenario.json", json.dumps(doc).encode(),
                               "application/json"))]
        r = client.post("/api/scenario", files=files)
        assert r.status_code == 400
        assert "not found" in r.json()["message"]

    def test_invalid_scenario_is_400(self, client, scenario_dir):
        r = upload(client, scenario_dir,
                   mutate=lambda d: d.pop("w_c"))
        assert r.status_code == 400
        assert "w_c" in r.json()["message"]


class TestRoute:
    def test_route_matches_repeated_request(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        a = client.post("/api/route", json={"scenario_id": sid})
        b = client.post("/api/route", json={"scenario_id": sid})
        assert a.status_code == 200
        assert a.json() == b.json()

    def test_unknown_id_is_404(self, client):
        r = client.post("/api/route", json={"scenario_id": "nope"})
        assert r.status_code == 404

    def test_cable_weight_override_changes_geometry_or_cost(
            self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        base = client.post("/api/route", json={"scenario_id": sid}).json()
        heavy = client.post("/api/route", json={
            "scenario_id": sid, "overrides": {"w_c": 50.0}}).json()
        base_cost = line_features(base)[0]["properties"]["total_cost"]
        heavy_cost = line_features(heavy)[0]["properties"]["total_cost"]
        assert heavy_cost > base_cost

    def test_forbidden_override_is_422(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        r = client.post("/api/route", json={
            "scenario_id": sid,
            "overrides": {"weights": {"terrain": {"pylon_weight": "inf"}}}})
        assert r.status_code == 422
        assert "forbidden" in r.json()["message"]

    def test_report_decomposition(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        doc = client.post("/api/route", json={"scenario_id": sid}).json()
        props = line_features(doc)[0]["properties"]
        total = props["pylon_sum"] + props["cable_sum"] + props["angle_sum"]
        assert abs(total - props["total_cost"]) < 1e-6
        assert doc["properties"]["map_elements"] == 2 * doc["properties"]["m"]


class TestKsp:
    def test_k_paths_with_nondecreasing_costs(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        r = client.post("/api/ksp", json={"scenario_id": sid, "k": 3,
                                          "method": "k_shortest"})
        assert r.status_code == 200
        costs = [f["properties"]["total_cost"]
                 for f in line_features(r.json())]
        assert len(costs) == 3
        assert costs == sorted(costs)
        assert r.json()["properties"]["map_elements"] == \
            4 * r.json()["properties"]["m"]

    def test_k1_single_feature(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        r = client.post("/api/ksp", json={"scenario_id": sid, "k": 1})
        assert len(line_features(r.json())) == 1

    def test_unknown_method_is_422(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        r = client.post("/api/ksp", json={"scenario_id": sid, "k": 2,
                                          "method": "zigzag"})
        assert r.status_code == 422
        assert r.json()["field"] == "method"


class TestRasterPng:
    def test_png_dimensions_and_forbidden_pixels(self, client, scenario_dir):
        sid = upload(client, scenario_dir).json()["scenario_id"]
        r = client.get(f"/api/raster/{sid}.png")
        assert r.status_code == 200
        img = Image.open(io.BytesIO(r.content))
        assert img.size == (20, 16)
        # forbidden water patch rendered in a non-gray color
        px = img.convert("RGB").getpixel((9, 7))
        assert px[0] != px[1]

    def test_uniform_raster_constant_gray(self, client, tmp_path):
        import numpy as np
        from pylonroute.raster import write_ascii_grid
        write_ascii_grid(tmp_path / "u.asc", np.ones((4, 4), int))
        doc = {
            "layers": [{"name": "u", "grid_path": "u.asc",
                        "pylon_weight": 2.0, "cable_weight": 2.0}],
            "w_c": 1.0, "d_min_m": 1.0, "d_max_m": 1.5,
            "theta_alpha_deg": 180.0, "angle_cost": {"kind": "zero"},
            "source": [0, 0], "target": [3, 3],
        }
        files = [
            ("scenario", ("s.json", json.dumps(doc).encode(),
                          "application/json")),
            ("grids", ("u.asc", (tmp_path / "u.asc").read_bytes(),
                       "text/plain")),
        ]
        sid = client.post("/api/scenario", files=files).json()["scenario_id"]
        r = client.get(f"/api/raster/{sid}.png")
        img = Image.open(io.BytesIO(r.content)).convert("RGB")
        colors = {img.getpixel((x, y)) for x in range(4) for y in range(4)}
        assert len(colors) == 1
        c = colors.pop()
        assert c[0] == c[1] == c[2]

    def test_unknown_id_is_404(self, client):
        assert client.get("/api/raster/zzz.png").status_code == 404

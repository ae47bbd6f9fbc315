"""HTTP planning service: scenario upload, route/ksp compute, heatmap."""

from __future__ import annotations

import io
import json
import math
import uuid
from dataclasses import dataclass, field
from threading import Lock
from typing import Any, Optional

import numpy as np
from fastapi import FastAPI, Request
from starlette.datastructures import UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from PIL import Image

from .anglecost import AngleCostFunction, from_spec
from .cli import _ksp_run, paths_to_geojson
from .graph import (
    GraphBuildError,
    InfeasibleError,
    RouteGraph,
    build_graph,
    solve_route,
)
from .ksp import METRICS
from .raster import INFINITE, Layer, LayerWeight, build_resistance
from .scenario import Scenario, ScenarioError, parse_scenario

app = FastAPI(title="pylonroute")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

KSP_METHODS = ("k_shortest", "find_ksp_max", "find_ksp_mean",
               "greedy_set", "k_dispersion", "corridor_penalizing")


def _error(status: int, message: str,
           field_name: Optional[str] = None) -> JSONResponse:
    body: dict[str, Any] = {"code": status, "message": message}
    if field_name:
        body["field"] = field_name
    return JSONResponse(status_code=status, content=body)


@dataclass
class ScenarioHandle:
    """Uploaded scenario plus cached graphs keyed by parameter hash."""

    doc: dict
    layers: list[Layer]
    weights: list[LayerWeight]
    cell_size: float
    scenario: Scenario
    graphs: dict[tuple, RouteGraph] = field(default_factory=dict)
    lock: Lock = field(default_factory=Lock)


_store: dict[str, ScenarioHandle] = {}
_store_lock = Lock()


def reset_store() -> None:
    """Drop all uploaded scenarios (tests)."""
    with _store_lock:
        _store.clear()


def _get_handle(scenario_id: str) -> Optional[ScenarioHandle]:
    with _store_lock:
        return _store.get(scenario_id)


# ---------------------------------------------------------------------------
# upload


@app.post("/api/scenario")
async def upload_scenario(request: Request):
    form = await request.form()
    scenario_file = form.get("scenario")
    if not isinstance(scenario_file, UploadFile):
        return _error(400, "missing scenario JSON file", "scenario")
    try:
        doc = json.loads(await scenario_file.read())
    except json.JSONDecodeError as exc:
        return _error(400, f"scenario is not valid JSON: {exc}", "scenario")

    grids: dict[str, bytes] = {}
    for key, value in form.multi_items():
        if key != "scenario" and isinstance(value, UploadFile):
            grids[value.filename or key] = await value.read()

    import tempfile
    from pathlib import Path as FsPath

    with tempfile.TemporaryDirectory() as tmp:
        base = FsPath(tmp)
        for name, data in grids.items():
            # filenames are basenames; grid_path entries must match them
            (base / FsPath(name).name).write_bytes(data)
        try:
            scenario = parse_scenario(doc, base_dir=base)
        except ScenarioError as exc:
            return _error(400, str(exc))
        layers, weights = [], []
        for spec in doc["layers"]:
            from .raster import read_ascii_layer
            grid, _ = read_ascii_layer(base / FsPath(spec["grid_path"]).name)
            layers.append(Layer(spec["name"], grid))
            w = spec["pylon_weight"], spec["cable_weight"]
            weights.append(LayerWeight(
                *(INFINITE if v == "inf" else float(v) for v in w)))

    scenario_id = uuid.uuid4().hex
    handle = ScenarioHandle(doc, layers, weights, scenario.raster.cell_size_m,
                            scenario)
    with _store_lock:
        _store[scenario_id] = handle
    return {"scenario_id": scenario_id}


# ---------------------------------------------------------------------------
# compute


def _apply_overrides(handle: ScenarioHandle, overrides: dict
                     ) -> tuple[Scenario, tuple]:
    """Scenario with override values applied, plus the graph cache key."""
    sc = handle.scenario
    weights = list(handle.weights)
    if "weights" in overrides:
        by_name = {layer.name: i for i, layer in enumerate(handle.layers)}
        for name, w in overrides["weights"].items():
            if name not in by_name:
                raise ScenarioError(f"unknown layer {name!r}")
            old = weights[by_name[name]]
            pw = w.get("pylon_weight", old.pylon_weight)
            cw = w.get("cable_weight", old.cable_weight)
            weights[by_name[name]] = LayerWeight(
                INFINITE if pw == "inf" else float(pw),
                INFINITE if cw == "inf" else float(cw))
    w_c = float(overrides.get("w_c", sc.w_c))
    theta = float(overrides.get("theta", sc.theta_alpha))
    angle_fn: AngleCostFunction = sc.angle_fn
    if "angle_cost" in overrides:
        angle_fn = from_spec(overrides["angle_cost"])

    raster = build_resistance(handle.layers, weights, handle.cell_size)
    resolved = Scenario(
        raster=raster, source=sc.source, target=sc.target,
        d_min=sc.d_min, d_max=sc.d_max, theta_alpha=theta, w_c=w_c,
        angle_fn=angle_fn, p=sc.p, scales=sc.scales,
        edge_budget=sc.edge_budget, ksp=sc.ksp, raw=handle.doc)
    key = (tuple((w.pylon_weight, w.cable_weight) for w in weights),
           w_c, theta)
    return resolved, key


def _graph_for(handle: ScenarioHandle, sc: Scenario,
               key: tuple) -> RouteGraph:
    with handle.lock:
        graph = handle.graphs.get(key)
    if graph is None:
        graph = build_graph(sc.raster, sc.source, sc.target, sc.d_min,
                            sc.d_max, sc.theta_alpha, sc.w_c)
        with handle.lock:
            handle.graphs[key] = graph
    return graph


@app.post("/api/route")
async def compute_route(body: dict):
    scenario_id = body.get("scenario_id", "")
    handle = _get_handle(scenario_id)
    if handle is None:
        return _error(404, f"unknown scenario {scenario_id!r}",
                      "scenario_id")
    overrides = body.get("overrides") or {}
    try:
        sc, key = _apply_overrides(handle, overrides)
        graph = _graph_for(handle, sc, key)
        path = solve_route(graph, sc.angle_fn, p=sc.p)
    except (ScenarioError, ValueError) as exc:
        return _error(422, str(exc))
    except (GraphBuildError, InfeasibleError) as exc:
        return _error(422, str(exc))
    return paths_to_geojson([path], graph, maps=2)


@app.post("/api/ksp")
async def compute_ksp(body: dict):
    scenario_id = body.get("scenario_id", "")
    handle = _get_handle(scenario_id)
    if handle is None:
        return _error(404, f"unknown scenario {scenario_id!r}",
                      "scenario_id")
    k = int(body.get("k", 3))
    method = body.get("method", "k_shortest")
    metric = body.get("metric", "yau_hausdorff")
    theta = float(body.get("theta", 0.0))
    if k < 1:
        return _error(422, "k must be positive", "k")
    if method not in KSP_METHODS:
        return _error(422, f"unknown method {method!r}", "method")
    if metric not in METRICS:
        return _error(422, f"unknown metric {metric!r}", "metric")
    overrides = body.get("overrides") or {}
    try:
        sc, key = _apply_overrides(handle, overrides)
        graph = _graph_for(handle, sc, key)
        result = _ksp_run(sc, graph, method, k, metric, theta,
                          body.get("penalty"))
    except (ScenarioError, ValueError) as exc:
        return _error(422, str(exc))
    except (GraphBuildError, InfeasibleError) as exc:
        return _error(422, str(exc))
    doc = paths_to_geojson(result.paths, graph, maps=4)
    doc["properties"]["truncated"] = result.truncated
    return doc


# ---------------------------------------------------------------------------
# raster image


@app.get("/api/raster/{scenario_id}.png")
async def raster_png(scenario_id: str):
    handle = _get_handle(scenario_id)
    if handle is None:
        return _error(404, f"unknown scenario {scenario_id!r}",
                      "scenario_id")
    raster = handle.scenario.raster
    cost = raster.pylon_cost + raster.cable_cost
    forbidden = raster.forbidden_pylon | raster.forbidden_cable
    finite = cost[~forbidden]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 0.0
    if hi > lo:
        gray = ((cost - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        gray = np.full(cost.shape, 128, dtype=np.uint8)
    rgb = np.stack([gray, gray, gray], axis=-1)
    rgb[forbidden] = (180, 30, 30)  # forbidden cells stand out
    img = Image.fromarray(rgb, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return Response(content=buf.getvalue(), media_type="image/png")


@app.get("/api/health")
async def health():
    return {"status": "ok"}

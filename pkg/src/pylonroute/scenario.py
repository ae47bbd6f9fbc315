"""Scenario files: JSON parameters plus referenced layer grids."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema

from .anglecost import AngleCostFunction, from_spec
from .raster import (
    INFINITE,
    Layer,
    LayerWeight,
    ResistanceRaster,
    build_resistance,
    read_ascii_layer,
)

__all__ = ["Scenario", "ScenarioError", "load_scenario", "parse_scenario"]


class ScenarioError(ValueError):
    """Invalid scenario document or referenced data."""


def _schema() -> dict:
    text = (resources.files("pylonroute.schemas")
            .joinpath("scenario.schema.json").read_text())
    return json.loads(text)


def _weight(value: Union[float, str]) -> float:
    return INFINITE if value == "inf" else float(value)


@dataclass
class Scenario:
    """Validated scenario: raster, graph parameters, and solver options."""

    raster: ResistanceRaster
    source: tuple[int, int]
    target: tuple[int, int]
    d_min: float                 # cell units
    d_max: float
    theta_alpha: float
    w_c: float
    angle_fn: AngleCostFunction
    p: Optional[int] = None
    scales: Optional[list[int]] = None
    edge_budget: Optional[int] = None
    ksp: Optional[dict] = None
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not (0 < self.d_min <= self.d_max):
            raise ScenarioError("need 0 < d_min <= d_max (in cells)")
        if self.source == self.target:
            raise ScenarioError("source equals target")
        for name, (x, y) in (("source", self.source),
                             ("target", self.target)):
            if not self.raster.in_bounds(x, y):
                raise ScenarioError(f"{name} outside raster")
            if self.raster.forbidden_pylon[y, x]:
                raise ScenarioError(f"{name} forbidden")
        if self.scales is not None:
            s = self.scales
            if s[-1] != 1 or any(a <= b for a, b in zip(s, s[1:])):
                raise ScenarioError(
                    "scales must strictly decrease and end at 1")


def parse_scenario(doc: dict, base_dir: Union[str, Path, None] = None
                   ) -> Scenario:
    """Validate a scenario document and load its layer grids."""
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ScenarioError(f"{path or 'document'}: {exc.message}") from exc

    base = Path(base_dir) if base_dir is not None else Path(".")
    layers: list[Layer] = []
    weights: list[LayerWeight] = []
    cell_size: Optional[float] = None
    for spec in doc["layers"]:
        grid_path = base / spec["grid_path"]
        if not grid_path.exists():
            raise ScenarioError(f"layer grid not found: {spec['grid_path']}")
        try:
            grid, size = read_ascii_layer(grid_path)
            layers.append(Layer(spec["name"], grid))
        except ValueError as exc:
            raise ScenarioError(f"layer {spec['name']!r}: {exc}") from exc
        weights.append(LayerWeight(_weight(spec["pylon_weight"]),
                                   _weight(spec["cable_weight"])))
        if cell_size is None:
            cell_size = size
        elif not math.isclose(cell_size, size):
            raise ScenarioError("layers disagree on cell size")
    assert cell_size is not None

    try:
        raster = build_resistance(layers, weights, cell_size)
        angle_fn = from_spec(doc["angle_cost"])
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc

    if doc["d_min_m"] > doc["d_max_m"]:
        raise ScenarioError("d_min_m exceeds d_max_m")
    return Scenario(
        raster=raster,
        source=tuple(doc["source"]),
        target=tuple(doc["target"]),
        d_min=doc["d_min_m"] / cell_size,
        d_max=doc["d_max_m"] / cell_size,
        theta_alpha=float(doc["theta_alpha_deg"]),
        w_c=float(doc["w_c"]),
        angle_fn=angle_fn,
        p=doc.get("p"),
        scales=doc.get("scales"),
        edge_budget=doc.get("edge_budget"),
        ksp=doc.get("ksp"),
        raw=doc,
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    return parse_scenario(doc, base_dir=path.parent)

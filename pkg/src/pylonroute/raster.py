"""Resistance rasters built from weighted binary layers.

Grid convention: row 0 is the top row, ``x`` indexes columns and ``y`` rows,
so a cell is addressed as ``grid[y, x]``.  Forbidden cells keep a cost value
of 0 and are tracked through the boolean masks instead of an in-band
infinity, which keeps all arithmetic total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "INFINITE",
    "Layer",
    "LayerWeight",
    "ResistanceRaster",
    "build_resistance",
    "downsample",
    "corridor_mask",
    "read_ascii_grid",
    "read_ascii_layer",
    "write_ascii_grid",
]

INFINITE = math.inf


@dataclass(frozen=True)
class Layer:
    """A named binary geographic layer."""

    name: str
    grid: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.int8)
        if grid.ndim != 2:
            raise ValueError(f"layer {self.name!r}: grid must be 2-D")
        if not np.isin(grid, (0, 1)).all():
            raise ValueError(f"layer {self.name!r}: values must be 0 or 1")
        object.__setattr__(self, "grid", grid)

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]


@dataclass(frozen=True)
class LayerWeight:
    """Pylon/cable weights for one layer; INFINITE means prohibition."""

    pylon_weight: float
    cable_weight: float

    def __post_init__(self) -> None:
        for w in (self.pylon_weight, self.cable_weight):
            if not (w >= 0):  # also rejects NaN
                raise ValueError("weights must be nonnegative or INFINITE")


@dataclass(frozen=True)
class ResistanceRaster:
    """Pylon and cable cost grids with matching forbidden masks."""

    pylon_cost: np.ndarray
    cable_cost: np.ndarray
    forbidden_pylon: np.ndarray
    forbidden_cable: np.ndarray
    cell_size_m: float = 1.0

    def __post_init__(self) -> None:
        pc = np.asarray(self.pylon_cost, dtype=float)
        cc = np.asarray(self.cable_cost, dtype=float)
        fp = np.asarray(self.forbidden_pylon, dtype=bool)
        fc = np.asarray(self.forbidden_cable, dtype=bool)
        shapes = {pc.shape, cc.shape, fp.shape, fc.shape}
        if len(shapes) != 1 or pc.ndim != 2:
            raise ValueError("all four grids must share one 2-D shape")
        if self.cell_size_m <= 0:
            raise ValueError("cell_size_m must be positive")
        if (pc[~fp] < 0).any() or (cc[~fc] < 0).any():
            raise ValueError("finite costs must be nonnegative")
        # forbidden cells carry no cost; zero them for determinism
        pc = np.where(fp, 0.0, pc)
        cc = np.where(fc, 0.0, cc)
        for name, arr in (("pylon_cost", pc), ("cable_cost", cc),
                          ("forbidden_pylon", fp), ("forbidden_cable", fc)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def rows(self) -> int:
        return self.pylon_cost.shape[0]

    @property
    def cols(self) -> int:
        return self.pylon_cost.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pylon_cost.shape

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.cols and 0 <= y < self.rows


def build_resistance(layers: Sequence[Layer],
                     weights: Sequence[LayerWeight],
                     cell_size_m: float = 1.0) -> ResistanceRaster:
    """Weighted sum of binary layers, with infinite weights turning into
    forbidden masks instead of contributing to the sums."""
    if not layers:
        raise ValueError("at least one layer required")
    if len(layers) != len(weights):
        raise ValueError("one weight per layer required")
    shape = layers[0].grid.shape
    for layer in layers[1:]:
        if layer.grid.shape != shape:
            raise ValueError(f"layer {layer.name!r} has mismatched dimensions")

    pylon = np.zeros(shape, dtype=float)
    cable = np.zeros(shape, dtype=float)
    fp = np.zeros(shape, dtype=bool)
    fc = np.zeros(shape, dtype=bool)
    for layer, w in zip(layers, weights):
        mask = layer.grid.astype(bool)
        if math.isinf(w.pylon_weight):
            fp |= mask
        else:
            pylon += w.pylon_weight * layer.grid
        if math.isinf(w.cable_weight):
            fc |= mask
        else:
            cable += w.cable_weight * layer.grid
    return ResistanceRaster(pylon, cable, fp, fc, cell_size_m)


def _block_reduce(cost: np.ndarray, forbidden: np.ndarray,
                  factor: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = cost.shape
    out_r = -(-rows // factor)
    out_c = -(-cols // factor)
    pad_r = out_r * factor - rows
    pad_c = out_c * factor - cols
    # padding cells count as forbidden so they never enter a block mean
    cost_p = np.pad(cost, ((0, pad_r), (0, pad_c)))
    forb_p = np.pad(forbidden, ((0, pad_r), (0, pad_c)), constant_values=True)
    cost_b = cost_p.reshape(out_r, factor, out_c, factor)
    forb_b = forb_p.reshape(out_r, factor, out_c, factor)
    finite = ~forb_b
    counts = finite.sum(axis=(1, 3))
    sums = np.where(finite, cost_b, 0.0).sum(axis=(1, 3))
    out_forb = counts == 0
    out_cost = np.divide(sums, counts, out=np.zeros_like(sums),
                         where=~out_forb)
    return out_cost, out_forb


def downsample(raster: ResistanceRaster, factor: int) -> ResistanceRaster:
    """Coarsen by block mean of finite costs.

    A coarse cell is forbidden only when every finite cell of its block is,
    so coarse scales never over-block a corridor that a finer scale could
    still thread.
    """
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    if factor == 1:
        return raster
    pc, fp = _block_reduce(raster.pylon_cost, raster.forbidden_pylon, factor)
    cc, fc = _block_reduce(raster.cable_cost, raster.forbidden_cable, factor)
    return ResistanceRaster(pc, cc, fp, fc, raster.cell_size_m * factor)


def corridor_mask(raster: ResistanceRaster,
                  paths: Sequence[Sequence[tuple[int, int]]],
                  width_cells: float) -> ResistanceRaster:
    """Forbid everything farther than width_cells from all path vertices.

    Cells already forbidden stay forbidden.  Distance is Euclidean in cell
    units to the nearest vertex of any path; the corridor of several paths
    is the union of their buffers.
    """
    if not paths or not any(len(p) for p in paths):
        raise ValueError("at least one nonempty path required")
    if width_cells <= 0:
        raise ValueError("width_cells must be positive")
    points = np.array([(x, y) for path in paths for (x, y) in path],
                      dtype=float)
    ys, xs = np.mgrid[0:raster.rows, 0:raster.cols]
    inside = np.zeros(raster.shape, dtype=bool)
    w2 = width_cells * width_cells
    for px, py in points:
        inside |= (xs - px) ** 2 + (ys - py) ** 2 <= w2
    return ResistanceRaster(
        raster.pylon_cost.copy(),
        raster.cable_cost.copy(),
        raster.forbidden_pylon | ~inside,
        raster.forbidden_cable | ~inside,
        raster.cell_size_m,
    )


# ---------------------------------------------------------------------------
# ESRI-ASCII-style layer files


def read_ascii_grid(path: Union[str, Path]) -> np.ndarray:
    """Grid values of a text layer file (see read_ascii_layer)."""
    return read_ascii_layer(path)[0]


def read_ascii_layer(path: Union[str, Path]) -> tuple[np.ndarray, float]:
    """Read a text grid plus its cell size.

    Format: header lines (ncols, nrows, cellsize, NODATA_value, optionally
    xllcorner/yllcorner), then row-major integers, row 0 on top."""
    tokens: list[str] = Path(path).read_text().split()
    header: dict[str, float] = {}
    i = 0
    while i + 1 < len(tokens) and tokens[i][0].isalpha():
        header[tokens[i].lower()] = float(tokens[i + 1])
        i += 2
    if "ncols" not in header or "nrows" not in header:
        raise ValueError(f"{path}: missing ncols/nrows header")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    values = np.array(tokens[i:], dtype=float)
    if values.size != nrows * ncols:
        raise ValueError(f"{path}: expected {nrows * ncols} values, "
                         f"got {values.size}")
    grid = values.reshape(nrows, ncols)
    nodata = header.get("nodata_value")
    if nodata is not None:
        grid = np.where(grid == nodata, 0, grid)
    return grid.astype(int), float(header.get("cellsize", 1.0))


def write_ascii_grid(path: Union[str, Path], grid: np.ndarray,
                     cellsize: float = 1.0, nodata: int = -9999) -> None:
    grid = np.asarray(grid)
    lines = [
        f"ncols {grid.shape[1]}",
        f"nrows {grid.shape[0]}",
        f"cellsize {cellsize}",
        f"NODATA_value {nodata}",
    ]
    for row in grid:
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")

import json

import numpy as np
import pytest

from pylonroute.raster import Layer, LayerWeight, ResistanceRaster, write_ascii_grid


def make_raster(pylon, cable=None, forbidden_pylon=None, forbidden_cable=None,
                cell_size=1.0):
    pylon = np.asarray(pylon, dtype=float)
    cable = pylon.copy() if cable is None else np.asarray(cable, dtype=float)
    fp = (np.zeros(pylon.shape, bool) if forbidden_pylon is None
          else np.asarray(forbidden_pylon, bool))
    fc = (np.zeros(pylon.shape, bool) if forbidden_cable is None
          else np.asarray(forbidden_cable, bool))
    return ResistanceRaster(pylon, cable, fp, fc, cell_size)


def uniform_raster(rows, cols, pylon=1.0, cable=1.0):
    return make_raster(np.full((rows, cols), pylon),
                       np.full((rows, cols), cable))


def random_raster(rng, rows, cols, lo=1, hi=9):
    cp = rng.integers(lo, hi + 1, size=(rows, cols)).astype(float)
    cc = rng.integers(0, hi + 1, size=(rows, cols)).astype(float)
    return make_raster(cp, cc)


@pytest.fixture
def scenario_dir(tmp_path):
    """A loadable two-layer scenario on disk."""
    rng = np.random.default_rng(42)
    g1 = (rng.random((16, 20)) < 0.4).astype(int)
    g2 = np.zeros((16, 20), int)
    g2[6:9, 8:12] = 1  # a small prohibition patch away from s/t
    write_ascii_grid(tmp_path / "terrain.asc", g1, cellsize=50.0)
    write_ascii_grid(tmp_path / "water.asc", g2, cellsize=50.0)
    doc = {
        "layers": [
            {"name": "terrain", "grid_path": "terrain.asc",
             "pylon_weight": 3.0, "cable_weight": 1.0},
            {"name": "water", "grid_path": "water.asc",
             "pylon_weight": "inf", "cable_weight": 0.5},
        ],
        "w_c": 1.0,
        "d_min_m": 100.0,
        "d_max_m": 250.0,
        "theta_alpha_deg": 60.0,
        "angle_cost": {"kind": "convex", "scale": 5.0, "exponent": 2.0},
        "source": [1, 1],
        "target": [18, 14],
    }
    (tmp_path / "scenario.json").write_text(json.dumps(doc))
    return tmp_path

"""Turning-angle cost functions.

Three families are supported:

* ``StepAngleCost`` -- piecewise constant with breakpoints in (0, 180); the
  cost between consecutive breakpoints g[s-1] and g[s] is level[s] (the last
  level closes the interval at 180).
* ``PowerAngleCost`` -- a * (x / 180) ** q. Convex and increasing for q >= 1,
  concave for q <= 1.
* ``ZeroAngleCost`` -- no turning penalty; reduces the solver to plain
  Bellman-Ford.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class AngleCostFunction:
    """Common interface: evaluate a cost for an angle in degrees [0, 180]."""

    is_step = False
    is_convex_increasing = False
    is_concave = False

    def __call__(self, angle_deg: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroAngleCost(AngleCostFunction):
    is_concave = True  # constant functions are (weakly) concave

    def __call__(self, angle_deg: float) -> float:
        return 0.0


@dataclass(frozen=True)
class StepAngleCost(AngleCostFunction):
    """Piecewise-constant angle cost with ``len(levels)`` distinct values."""

    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]

    is_step = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", tuple(self.breakpoints))
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more level than breakpoints")
        if any(not 0.0 < b < 180.0 for b in self.breakpoints):
            raise ValueError("breakpoints must lie strictly inside (0, 180)")
        if list(self.breakpoints) != sorted(set(self.breakpoints)):
            raise ValueError("breakpoints must be strictly increasing")
        if any(lv < 0 for lv in self.levels):
            raise ValueError("levels must be nonnegative")

    def __call__(self, angle_deg: float) -> float:
        for b, lv in zip(self.breakpoints, self.levels):
            if angle_deg < b:
                return lv
        return self.levels[-1]

    @property
    def n_levels(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class PowerAngleCost(AngleCostFunction):
    """a * (x / 180) ** q; convex increasing for q >= 1, concave for q <= 1."""

    scale: float
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")
        if self.exponent <= 0:
            raise ValueError("exponent must be positive")

    def __call__(self, angle_deg: float) -> float:
        if angle_deg <= 0.0:
            return 0.0
        return self.scale * (angle_deg / 180.0) ** self.exponent

    @property
    def is_convex_increasing(self) -> bool:  # type: ignore[override]
        return self.exponent >= 1.0

    @property
    def is_concave(self) -> bool:  # type: ignore[override]
        return self.exponent <= 1.0

    def crossing_offset(self, delta_d: float, arc_deg: float) -> float | None:
        """Solve cost(u) - cost(arc - u) = delta_d for u in [0, arc].

        Used by the convex frontier kernel to place the crossing between two
        shifted copies of this function whose base distances differ by
        delta_d and whose minima are arc degrees apart. Returns None when the
        equation has no solution in range (one copy dominates the whole arc).
        """
        a, q = self.scale, self.exponent
        if a == 0.0:
            return arc_deg / 2.0 if delta_d == 0.0 else None

        def g(u: float) -> float:
            return a * ((u / 180.0) ** q - ((arc_deg - u) / 180.0) ** q) - delta_d

        if q == 1.0:
            u = (delta_d * 180.0 / a + arc_deg) / 2.0
        elif q == 2.0:
            u = (delta_d * 180.0 ** 2 / a + arc_deg ** 2) / (2.0 * arc_deg)
        else:
            lo, hi = 0.0, arc_deg
            if g(lo) > 0.0 or g(hi) < 0.0:
                return None
            u = arc_deg / 2.0
            for _ in range(80):
                mid = (lo + hi) / 2.0
                if g(mid) <= 0.0:
                    lo = mid
                else:
                    hi = mid
            u = (lo + hi) / 2.0
        if u < 0.0 or u > arc_deg:
            return None
        return u


def sqrt_angle_cost(scale: float) -> PowerAngleCost:
    """Concave family used for provably acyclic routes: a * sqrt(x/180)."""
    return PowerAngleCost(scale=scale, exponent=0.5)


def from_spec(spec: dict) -> AngleCostFunction:
    """Build an angle cost function from a scenario JSON fragment."""
    kind = spec.get("kind")
    if kind == "zero" or kind is None:
        return ZeroAngleCost()
    if kind == "step":
        return StepAngleCost(
            breakpoints=tuple(float(b) for b in spec["breakpoints"]),
            levels=tuple(float(v) for v in spec["levels"]),
        )
    if kind == "convex":
        q = float(spec.get("exponent", 2.0))
        if q < 1.0:
            raise ValueError("convex angle cost requires exponent >= 1")
        return PowerAngleCost(scale=float(spec["scale"]), exponent=q)
    if kind == "concave":
        q = float(spec.get("exponent", 0.5))
        if q > 1.0:
            raise ValueError("concave angle cost requires exponent <= 1")
        return PowerAngleCost(scale=float(spec["scale"]), exponent=q)
    raise ValueError(f"unknown angle cost kind: {kind!r}")

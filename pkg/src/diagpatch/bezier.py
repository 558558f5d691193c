"""Bernstein/Bezier primitives: basis values, de Casteljau evaluation, degree elevation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CurvePolygon",
    "ControlNet",
    "binomial",
    "bernstein",
    "eval_curve",
    "eval_surface",
    "degree_elevate",
    "bounding_box_diagonal",
]


def binomial(n: int, k: int) -> int:
    """C(n, k) as an exact integer, zero outside 0 <= k <= n.

    Exact for every degree this toolkit touches; Python integers do not
    overflow, so there is no capacity ceiling to guard.
    """
    if n < 0:
        raise ValueError("binomial: n must be non-negative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def bernstein(degree: int, index: int, t: float) -> float:
    """Bernstein basis value C(degree,index) * t**index * (1-t)**(degree-index)."""
    if not 0 <= index <= degree:
        raise ValueError(f"bernstein: index {index} out of range for degree {degree}")
    t = _check_unit("t", t)
    return binomial(degree, index) * t**index * (1.0 - t) ** (degree - index)


def _frozen_points(points, ndim: int, what: str) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{what}: expected a {ndim}-dimensional point array, got shape {arr.shape}")
    if arr.shape[-1] < 1:
        raise ValueError(f"{what}: points need at least one coordinate")
    if arr.shape[0] < 1:
        raise ValueError(f"{what}: needs at least one point")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: coordinates must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CurvePolygon:
    """Control polygon of a Bezier curve; shape (degree+1, d)."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen_points(self.points, 2, "curve polygon"))

    @property
    def degree(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __eq__(self, other):
        return isinstance(other, CurvePolygon) and np.array_equal(self.points, other.points)


@dataclass(frozen=True)
class ControlNet:
    """Square control net of a tensor-product Bezier surface; shape (n+1, n+1, d).

    points[i][j] multiplies B^n_i(u) * B^n_j(v).
    """

    points: np.ndarray

    def __post_init__(self):
        arr = _frozen_points(self.points, 3, "control net")
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"control net must be square, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("control net degree must be positive")
        object.__setattr__(self, "points", arr)

    @property
    def degree(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[2]

    def __eq__(self, other):
        return isinstance(other, ControlNet) and np.array_equal(self.points, other.points)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} = {value} outside [0, 1]")
    return value


def _de_casteljau(points: np.ndarray, t: float) -> np.ndarray:
    pts = np.array(points, dtype=float)
    m = len(pts) - 1
    for r in range(m):
        pts[: m - r] = (1.0 - t) * pts[: m - r] + t * pts[1 : m - r + 1]
    return pts[0]


def eval_curve(polygon: CurvePolygon, t: float) -> np.ndarray:
    """Point on the curve at parameter t, by de Casteljau's algorithm."""
    return _de_casteljau(polygon.points, _check_unit("t", t))


def eval_surface(net: ControlNet, u: float, v: float) -> np.ndarray:
    """Point on the surface at (u, v): de Casteljau across rows, then down the column."""
    u = _check_unit("u", u)
    v = _check_unit("v", v)
    rows = np.array([_de_casteljau(row, v) for row in net.points])
    return _de_casteljau(rows, u)


def degree_elevate(polygon: CurvePolygon) -> CurvePolygon:
    """The same curve one degree higher: convex recombination of neighbours."""
    old = polygon.points
    m = polygon.degree
    out = np.empty((m + 2, polygon.dim))
    out[0] = old[0]
    out[m + 1] = old[m]
    for i in range(1, m + 1):
        w = i / (m + 1)
        out[i] = w * old[i - 1] + (1.0 - w) * old[i]
    return CurvePolygon(out)


def bounding_box_diagonal(*point_arrays: np.ndarray) -> float:
    """Diagonal length of the axis-aligned box around every point given."""
    stacked = np.concatenate([np.asarray(a, dtype=float).reshape(-1, np.asarray(a).shape[-1]) for a in point_arrays])
    return float(np.linalg.norm(stacked.max(axis=0) - stacked.min(axis=0)))

"""Diagonal curves of a tensor-product patch: extraction, admissibility, repair.

The two diagonal curves of a degree-n square patch x(u, v) are
alpha1(t) = x(t, t) and alpha2(t) = x(t, 1-t); both are Bezier curves of
degree 2n. Their control points Q_k, R_k come from weighted sums over the
anti-diagonals (constant i+j) and diagonals (constant i-j) of the control
net. A pair (Q, R) is *admissible* when it is realizable as the diagonals of
a single net, which happens exactly when two parity-split weighted sums
agree; see check_compatibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bezier import ControlNet, CurvePolygon, binomial, bounding_box_diagonal

__all__ = [
    "DEFAULT_TOL",
    "DiagonalPair",
    "CompatibilityReport",
    "main_diagonal_sum",
    "anti_diagonal_sum",
    "extract_diagonals",
    "midpoint_gap",
    "sign_flip",
    "check_compatibility",
    "repair_central",
    "repair_by_elevation",
    "project_to_admissible",
    "repair",
    "default_repair_mode",
    "REPAIR_MODES",
]

# Relative tolerance against the bounding-box diagonal, floored at 1.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DiagonalPair:
    """Control polygons q, r of the two diagonal curves of a degree-n patch.

    Both polygons have degree 2n and share a coordinate dimension.
    """

    q: CurvePolygon
    r: CurvePolygon

    def __post_init__(self):
        if self.q.degree != self.r.degree:
            raise ValueError(f"diagonal pair: degrees differ ({self.q.degree} vs {self.r.degree})")
        if self.q.degree % 2 != 0 or self.q.degree < 2:
            raise ValueError(f"diagonal pair: degree must be even and >= 2, got {self.q.degree}")
        if self.q.dim != self.r.dim:
            raise ValueError("diagonal pair: coordinate dimensions differ")

    @property
    def n(self) -> int:
        """Degree of a surface realizing this pair."""
        return self.q.degree // 2

    @property
    def dim(self) -> int:
        return self.q.dim

    def scale(self) -> float:
        return bounding_box_diagonal(self.q.points, self.r.points)


def main_diagonal_sum(net: ControlNet, k: int) -> np.ndarray:
    """Weighted sum over the anti-diagonal i+j = k of the net.

    Equals C(2n,k) times the k-th control point of the main diagonal curve
    x(t, t).
    """
    n = net.degree
    if not 0 <= k <= 2 * n:
        raise ValueError(f"k = {k} outside 0..{2 * n}")
    acc = np.zeros(net.dim)
    for i in range(max(0, k - n), min(k, n) + 1):
        acc += binomial(n, i) * binomial(n, k - i) * net.points[i, k - i]
    return acc


def anti_diagonal_sum(net: ControlNet, k: int) -> np.ndarray:
    """Weighted sum over the diagonal j - i = n - k of the net.

    Equals C(2n,k) times the k-th control point of the second diagonal curve
    x(t, 1-t).
    """
    n = net.degree
    if not 0 <= k <= 2 * n:
        raise ValueError(f"k = {k} outside 0..{2 * n}")
    acc = np.zeros(net.dim)
    for i in range(max(0, k - n), min(k, n) + 1):
        acc += binomial(n, i) * binomial(n, k - i) * net.points[i, n - k + i]
    return acc


def extract_diagonals(net: ControlNet) -> DiagonalPair:
    """Control polygons of the two diagonal curves of the patch."""
    n = net.degree
    q = np.empty((2 * n + 1, net.dim))
    r = np.empty((2 * n + 1, net.dim))
    for k in range(2 * n + 1):
        w = binomial(2 * n, k)
        q[k] = main_diagonal_sum(net, k) / w
        r[k] = anti_diagonal_sum(net, k) / w
    return DiagonalPair(CurvePolygon(q), CurvePolygon(r))


def _weights(two_n: int) -> np.ndarray:
    return np.array([binomial(two_n, k) for k in range(two_n + 1)], dtype=float)


def midpoint_gap(pair: DiagonalPair) -> np.ndarray:
    """Difference of the binomial-weighted control sums of q and r.

    Equals 2^(2n) * (alpha1(1/2) - alpha2(1/2)); zero for every pair that
    comes from an actual net, since the diagonals cross at x(1/2, 1/2).
    """
    w = _weights(pair.q.degree)
    return w @ pair.q.points - w @ pair.r.points


def sign_flip(net: ControlNet) -> ControlNet:
    """The net with entries scaled by (-1)**(i+j).

    An involution; it flips the sign of every other control point of both
    diagonal curves (q_k by (-1)**k, r_k by (-1)**(n-k) up to a global sign).
    """
    n = net.degree
    ij = np.add.outer(np.arange(n + 1), np.arange(n + 1))
    signs = np.where(ij % 2 == 0, 1.0, -1.0)
    return ControlNet(net.points * signs[:, :, None])


@dataclass(frozen=True)
class CompatibilityReport:
    """Outcome of the admissibility check for a diagonal pair.

    residual_a and residual_b are the two parity-split condition residuals
    (lhs - rhs); the pair is admissible when both stay below tol relative to
    the bounding-box scale (floored at 1 for degenerate boxes).
    """

    parity: str
    residual_a: np.ndarray
    residual_b: np.ndarray
    scale: float
    tol: float
    admissible: bool

    @property
    def max_residual(self) -> float:
        return max(float(np.linalg.norm(self.residual_a)), float(np.linalg.norm(self.residual_b)))


def _parity_residuals(pair: DiagonalPair) -> tuple[str, np.ndarray, np.ndarray]:
    n = pair.n
    w = _weights(2 * n)
    q, r = pair.q.points, pair.r.points
    even = np.arange(0, 2 * n + 1, 2)
    odd = np.arange(1, 2 * n + 1, 2)
    if n % 2 == 0:
        res_a = w[even] @ (q[even] - r[even])
        res_b = w[odd] @ (q[odd] - r[odd])
        return "even", res_a, res_b
    res_a = w[even] @ q[even] - w[odd] @ r[odd]
    res_b = w[odd] @ q[odd] - w[even] @ r[even]
    return "odd", res_a, res_b


def check_compatibility(pair: DiagonalPair, tol: float = DEFAULT_TOL) -> CompatibilityReport:
    """Decide whether the pair is realizable as the diagonals of one net.

    For even n both parity classes of q must match the same class of r; for
    odd n the classes cross (q-even against r-odd and vice versa).
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    parity, res_a, res_b = _parity_residuals(pair)
    scale = pair.scale()
    worst = max(float(np.linalg.norm(res_a)), float(np.linalg.norm(res_b)))
    return CompatibilityReport(
        parity=parity,
        residual_a=res_a,
        residual_b=res_b,
        scale=scale,
        tol=tol,
        admissible=bool(worst <= tol * max(scale, 1.0)),
    )


def repair_central(pair: DiagonalPair) -> DiagonalPair:
    """Restore admissibility by replacing one central control point per curve.

    For odd n the replaced points are q_n and r_n; for even n they are q_n
    and r_{n+1} (q_n and r_n would land in the same condition, which cannot
    absorb two substitutions). Each replaced point is solved from the one
    condition it appears in, so the result satisfies both conditions to
    floating rounding and the repair is idempotent on admissible input.
    """
    n = pair.n
    two_n = 2 * n
    w = _weights(two_n)
    q = np.array(pair.q.points)
    r = np.array(pair.r.points)
    even = np.arange(0, two_n + 1, 2)
    odd = np.arange(1, two_n + 1, 2)
    if n % 2 == 1:
        odd_rest = odd[odd != n]
        q_new = (w[even] @ r[even] - w[odd_rest] @ q[odd_rest]) / w[n]
        r_new = (w[even] @ q[even] - w[odd_rest] @ r[odd_rest]) / w[n]
        q[n] = q_new
        r[n] = r_new
    else:
        even_rest = even[even != n]
        odd_rest = odd[odd != n + 1]
        q_new = (w[even] @ r[even] - w[even_rest] @ q[even_rest]) / w[n]
        r_new = (w[odd] @ q[odd] - w[odd_rest] @ r[odd_rest]) / w[n + 1]
        q[n] = q_new
        r[n + 1] = r_new
    return DiagonalPair(CurvePolygon(q), CurvePolygon(r))


def repair_by_elevation(pair: DiagonalPair) -> DiagonalPair:
    """Repair an even-n pair without moving any original control point.

    Degree-elevates both polygons twice (degree 2n -> 2n+2, surface degree
    n+1, odd), then applies the central substitution, which now only touches
    the freshly interpolated central points. Rejects odd n, where the direct
    central substitution already applies.
    """
    from .bezier import degree_elevate

    if pair.n % 2 == 1:
        raise ValueError("repair_by_elevation needs even n; use repair_central for odd n")
    q = degree_elevate(degree_elevate(pair.q))
    r = degree_elevate(degree_elevate(pair.r))
    return repair_central(DiagonalPair(q, r))


def _condition_matrix(n: int) -> np.ndarray:
    """2 x (2*(2n+1)) coefficient matrix of the admissibility conditions.

    Columns are the stacked control points [q_0..q_2n, r_0..r_2n]; a pair is
    admissible iff A @ x = 0 (per coordinate).
    """
    two_n = 2 * n
    w = _weights(two_n)
    m = two_n + 1
    a = np.zeros((2, 2 * m))
    even = np.arange(0, m, 2)
    odd = np.arange(1, m, 2)
    if n % 2 == 0:
        a[0, even] = w[even]
        a[0, m + even] = -w[even]
        a[1, odd] = w[odd]
        a[1, m + odd] = -w[odd]
    else:
        a[0, even] = w[even]
        a[0, m + odd] = -w[odd]
        a[1, odd] = w[odd]
        a[1, m + even] = -w[even]
    return a


def project_to_admissible(pair: DiagonalPair) -> DiagonalPair:
    """Orthogonal projection onto the admissible subspace.

    Minimizes the total squared displacement of all control points subject to
    the two (homogeneous, per-coordinate) admissibility conditions; the
    minimum-norm correction is x - A^T (A A^T)^{-1} A x.
    """
    n = pair.n
    m = 2 * n + 1
    a = _condition_matrix(n)
    x = np.vstack([pair.q.points, pair.r.points])
    lam = np.linalg.solve(a @ a.T, a @ x)
    x = x - a.T @ lam
    return DiagonalPair(CurvePolygon(x[:m]), CurvePolygon(x[m:]))


REPAIR_MODES = ("central", "elevate", "project")


def default_repair_mode(n: int) -> str:
    """central for odd n (no degree change possible), project for even n."""
    return "central" if n % 2 == 1 else "project"


def repair(pair: DiagonalPair, mode: str) -> DiagonalPair:
    """Dispatch to one of the repair strategies: central, elevate, project."""
    if mode == "central":
        return repair_central(pair)
    if mode == "elevate":
        return repair_by_elevation(pair)
    if mode == "project":
        return project_to_admissible(pair)
    raise ValueError(f"unknown repair mode {mode!r}; expected one of {', '.join(REPAIR_MODES)}")

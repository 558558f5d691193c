"""Linear systems tying a control net to prescribed diagonal curves.

Every control point of the two diagonal curves pins one weighted sum over an
(anti-)diagonal of the net, giving 2(2n+1) linear equations in the (n+1)^2
net slots. Prescribing the boundary (and, for C1 tangency across it, the
adjacent rings) removes slots from the unknown set and drops the rows that
only relate prescribed slots, which instead become consistency checks. The
solver computes the exact rank and an exact affine basis of the solution
space over the rationals; point coordinates are then solved in floating
point against that pivot structure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bezier import ControlNet, CurvePolygon, binomial, bounding_box_diagonal
from .diagonals import DEFAULT_TOL, DiagonalPair, check_compatibility, extract_diagonals
from .exactlin import RrefResult, rref

__all__ = [
    "PrescriptionMode",
    "SolverError",
    "ModeDegreeError",
    "InadmissiblePairError",
    "CornerMismatchError",
    "RingMismatchError",
    "InconsistentSystemError",
    "BoundaryData",
    "C1BoundaryData",
    "Prescription",
    "ConstraintRow",
    "ConstraintSystem",
    "SolutionSpace",
    "SpaceDimension",
    "build_system",
    "solve_space",
    "solve_prescription",
    "realize",
    "fill_free",
    "dimension_formula",
    "system_structure",
]

Slot = tuple[int, int]


class PrescriptionMode(Enum):
    """What is prescribed besides the diagonal pair."""

    DIAGONALS = "diagonals"
    BOUNDARY = "boundary"
    C1 = "c1"

    @classmethod
    def coerce(cls, value) -> "PrescriptionMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown prescription mode {value!r}; expected one of "
                             f"{', '.join(m.value for m in cls)}") from None

    @property
    def min_degree(self) -> int:
        return {PrescriptionMode.DIAGONALS: 1, PrescriptionMode.BOUNDARY: 2, PrescriptionMode.C1: 4}[self]

    @property
    def formula_min_degree(self) -> int:
        """Smallest n for which the closed-form dimension count is validated."""
        return {PrescriptionMode.DIAGONALS: 1, PrescriptionMode.BOUNDARY: 3, PrescriptionMode.C1: 5}[self]

    def formula_dimension(self, n: int) -> int:
        offset = {PrescriptionMode.DIAGONALS: 1, PrescriptionMode.BOUNDARY: 3, PrescriptionMode.C1: 5}[self]
        return (n - offset) ** 2


class SolverError(Exception):
    """Base class for prescription/solve failures."""


class ModeDegreeError(SolverError):
    pass


class InadmissiblePairError(SolverError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f"diagonal pair is not admissible (max residual {report.max_residual:.3e}, "
            f"tol {report.tol:g} * scale {max(report.scale, 1.0):g}); repair it first "
            f"(repair_central, repair_by_elevation, or project_to_admissible)"
        )


class CornerMismatchError(SolverError):
    def __init__(self, mismatches):
        self.mismatches = mismatches
        detail = ", ".join(f"{kind} k={k} off by {err:.3e}" for kind, k, err in mismatches)
        super().__init__(f"diagonal endpoints disagree with the prescribed boundary corners: {detail}")


class RingMismatchError(SolverError):
    def __init__(self, mismatches):
        self.mismatches = mismatches
        detail = ", ".join(f"{kind} k={k} off by {err:.3e}" for kind, k, err in mismatches)
        super().__init__(f"near-corner diagonal points disagree with the prescribed rings: {detail}")


class InconsistentSystemError(SolverError):
    pass


def _line(points) -> CurvePolygon:
    return points if isinstance(points, CurvePolygon) else CurvePolygon(np.asarray(points, dtype=float))


@dataclass(frozen=True)
class BoundaryData:
    """The four edge polygons of a net: rows i=0, i=n and columns j=0, j=n."""

    row0: CurvePolygon
    row_n: CurvePolygon
    col0: CurvePolygon
    col_n: CurvePolygon

    def __post_init__(self):
        edges = {name: _line(getattr(self, name)) for name in ("row0", "row_n", "col0", "col_n")}
        for name, poly in edges.items():
            object.__setattr__(self, name, poly)
        degrees = {poly.degree for poly in edges.values()}
        dims = {poly.dim for poly in edges.values()}
        if len(degrees) != 1 or len(dims) != 1:
            raise ValueError("boundary edges must share one degree and one coordinate dimension")
        n = self.degree
        corners = [
            ("row0[0]", self.row0.points[0], "col0[0]", self.col0.points[0]),
            ("row0[n]", self.row0.points[n], "col_n[0]", self.col_n.points[0]),
            ("row_n[0]", self.row_n.points[0], "col0[n]", self.col0.points[n]),
            ("row_n[n]", self.row_n.points[n], "col_n[n]", self.col_n.points[n]),
        ]
        for name_a, a, name_b, b in corners:
            if not np.array_equal(a, b):
                raise ValueError(f"boundary corners disagree: {name_a} != {name_b}")

    @property
    def degree(self) -> int:
        return self.row0.degree

    @property
    def dim(self) -> int:
        return self.row0.dim

    def slot_points(self) -> dict[Slot, np.ndarray]:
        n = self.degree
        out: dict[Slot, np.ndarray] = {}
        for j in range(n + 1):
            out[(0, j)] = self.row0.points[j]
            out[(n, j)] = self.row_n.points[j]
        for i in range(n + 1):
            out[(i, 0)] = self.col0.points[i]
            out[(i, n)] = self.col_n.points[i]
        return out

    @classmethod
    def from_net(cls, net: ControlNet) -> "BoundaryData":
        n = net.degree
        return cls(
            row0=CurvePolygon(net.points[0]),
            row_n=CurvePolygon(net.points[n]),
            col0=CurvePolygon(net.points[:, 0]),
            col_n=CurvePolygon(net.points[:, n]),
        )


@dataclass(frozen=True)
class C1BoundaryData:
    """Boundary edges plus the four adjacent full rows/columns (i=1, i=n-1, j=1, j=n-1)."""

    boundary: BoundaryData
    row1: CurvePolygon
    row_n1: CurvePolygon
    col1: CurvePolygon
    col_n1: CurvePolygon

    def __post_init__(self):
        rings = {name: _line(getattr(self, name)) for name in ("row1", "row_n1", "col1", "col_n1")}
        for name, poly in rings.items():
            object.__setattr__(self, name, poly)
        n = self.boundary.degree
        if n < 3:
            raise ValueError("ring prescription needs degree >= 3 so the rings are distinct from the boundary")
        for name, poly in rings.items():
            if poly.degree != n or poly.dim != self.boundary.dim:
                raise ValueError(f"ring {name} must match the boundary degree and dimension")
        # Overlapping slots (ring/boundary endpoints, ring crossings) must agree exactly.
        combined: dict[Slot, np.ndarray] = self.boundary.slot_points()
        for slot, value in self._ring_slot_points().items():
            if slot in combined and not np.array_equal(combined[slot], value):
                raise ValueError(f"ring and boundary values disagree at slot {slot}")
            combined[slot] = value

    @property
    def degree(self) -> int:
        return self.boundary.degree

    @property
    def dim(self) -> int:
        return self.boundary.dim

    def _ring_slot_points(self) -> dict[Slot, np.ndarray]:
        n = self.degree
        out: dict[Slot, np.ndarray] = {}
        for j in range(n + 1):
            out[(1, j)] = self.row1.points[j]
            out[(n - 1, j)] = self.row_n1.points[j]
        for i in range(n + 1):
            if (i, 1) not in out:
                out[(i, 1)] = self.col1.points[i]
            if (i, n - 1) not in out:
                out[(i, n - 1)] = self.col_n1.points[i]
        return out

    def slot_points(self) -> dict[Slot, np.ndarray]:
        out = self.boundary.slot_points()
        out.update(self._ring_slot_points())
        return out

    @classmethod
    def from_net(cls, net: ControlNet) -> "C1BoundaryData":
        n = net.degree
        return cls(
            boundary=BoundaryData.from_net(net),
            row1=CurvePolygon(net.points[1]),
            row_n1=CurvePolygon(net.points[n - 1]),
            col1=CurvePolygon(net.points[:, 1]),
            col_n1=CurvePolygon(net.points[:, n - 1]),
        )


@dataclass(frozen=True)
class Prescription:
    """A diagonal pair plus whatever boundary data the mode requires."""

    pair: DiagonalPair
    mode: PrescriptionMode
    boundary: BoundaryData | C1BoundaryData | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", PrescriptionMode.coerce(self.mode))

    @property
    def n(self) -> int:
        return self.pair.n

    @classmethod
    def from_net(cls, net: ControlNet, mode) -> "Prescription":
        mode = PrescriptionMode.coerce(mode)
        pair = extract_diagonals(net)
        if mode is PrescriptionMode.DIAGONALS:
            return cls(pair, mode)
        if mode is PrescriptionMode.BOUNDARY:
            return cls(pair, mode, BoundaryData.from_net(net))
        return cls(pair, mode, C1BoundaryData.from_net(net))


# --- row construction ---------------------------------------------------

def _row_coeffs(n: int, kind: str, k: int) -> dict[Slot, int]:
    out: dict[Slot, int] = {}
    for i in range(max(0, k - n), min(k, n) + 1):
        slot = (i, k - i) if kind == "main" else (i, n - k + i)
        out[slot] = binomial(n, i) * binomial(n, k - i)
    return out


def _system_ks(n: int, mode: PrescriptionMode) -> range:
    if mode is PrescriptionMode.DIAGONALS:
        return range(0, 2 * n + 1)
    if mode is PrescriptionMode.BOUNDARY:
        return range(2, 2 * n - 1)
    return range(4, 2 * n - 3)


def _prescribed_slots(n: int, mode: PrescriptionMode) -> frozenset[Slot]:
    if mode is PrescriptionMode.DIAGONALS:
        return frozenset()
    if mode is PrescriptionMode.BOUNDARY:
        fixed = {0, n}
    else:
        fixed = {0, 1, n - 1, n}
    return frozenset(
        (i, j) for i in range(n + 1) for j in range(n + 1) if i in fixed or j in fixed
    )


@dataclass(frozen=True)
class SystemStructure:
    """Exact elimination of the coefficient matrix for one (degree, mode)."""

    n: int
    mode: PrescriptionMode
    row_labels: tuple[tuple[str, int], ...]
    unknown_slots: tuple[Slot, ...]
    matrix: tuple[tuple[int, ...], ...]
    reduction: RrefResult

    @property
    def rank(self) -> int:
        return self.reduction.rank

    @property
    def dimension(self) -> int:
        return len(self.unknown_slots) - self.rank

    @property
    def free_slots(self) -> tuple[Slot, ...]:
        return tuple(self.unknown_slots[c] for c in self.reduction.free_cols)


@lru_cache(maxsize=None)
def system_structure(n: int, mode: PrescriptionMode) -> SystemStructure:
    """Rows, unknown columns, and exact RREF for the given degree and mode."""
    prescribed = _prescribed_slots(n, mode)
    unknown = sorted(
        ((i, j) for i in range(n + 1) for j in range(n + 1) if (i, j) not in prescribed),
        key=lambda s: (s[0] + s[1], s[0]),
    )
    col_index = {slot: c for c, slot in enumerate(unknown)}
    labels: list[tuple[str, int]] = []
    rows: list[list[int]] = []
    for kind in ("main", "anti"):
        for k in _system_ks(n, mode):
            coeffs = _row_coeffs(n, kind, k)
            row = [0] * len(unknown)
            for slot, c in coeffs.items():
                if slot in col_index:
                    row[col_index[slot]] = c
            labels.append((kind, k))
            rows.append(row)
    return SystemStructure(
        n=n,
        mode=mode,
        row_labels=tuple(labels),
        unknown_slots=tuple(unknown),
        matrix=tuple(tuple(r) for r in rows),
        reduction=rref(rows),
    )


@dataclass(frozen=True)
class ConstraintRow:
    kind: str  # "main" or "anti"
    k: int
    coeffs: dict[Slot, int]
    rhs: np.ndarray  # C(2n,k) * pair point, before prescribed slots move over


@dataclass(frozen=True)
class ConstraintSystem:
    n: int
    mode: PrescriptionMode
    rows: tuple[ConstraintRow, ...]
    prescribed: dict[Slot, np.ndarray]
    dim: int
    scale: float
    tol: float


def _pair_point(pair: DiagonalPair, kind: str, k: int) -> np.ndarray:
    return pair.q.points[k] if kind == "main" else pair.r.points[k]


def build_system(pair: DiagonalPair, mode, boundary=None, *, tol: float = DEFAULT_TOL,
                 check_admissible: bool = True) -> ConstraintSystem:
    """Assemble the linear system for nets realizing the prescription.

    Admissibility of the pair is checked up front (disable with
    check_admissible=False to let solve_space surface the inconsistency
    instead). Corner and, in C1 mode, ring consistency between the pair and
    the prescribed slots is always enforced: the rows expressing them carry
    no unknowns, so a violation can never be repaired by solving.
    """
    mode = PrescriptionMode.coerce(mode)
    n = pair.n
    if n < mode.min_degree:
        raise ModeDegreeError(f"mode {mode.value!r} needs degree >= {mode.min_degree}, got n = {n}")

    if mode is PrescriptionMode.DIAGONALS:
        if boundary is not None:
            raise ValueError("diagonals mode takes no boundary data")
        prescribed: dict[Slot, np.ndarray] = {}
    else:
        expected = BoundaryData if mode is PrescriptionMode.BOUNDARY else C1BoundaryData
        if not isinstance(boundary, expected):
            raise TypeError(f"mode {mode.value!r} needs {expected.__name__}")
        if boundary.degree != n:
            raise ValueError(f"boundary degree {boundary.degree} does not match the pair's surface degree {n}")
        if boundary.dim != pair.dim:
            raise ValueError("boundary and pair coordinate dimensions differ")
        prescribed = boundary.slot_points()

    if check_admissible:
        report = check_compatibility(pair, tol)
        if not report.admissible:
            raise InadmissiblePairError(report)

    if prescribed:
        scale = bounding_box_diagonal(pair.q.points, pair.r.points, np.array(list(prescribed.values())))
    else:
        scale = pair.scale()
    tol_abs = tol * max(scale, 1.0)

    # Rows outside the system range touch only prescribed slots; check them
    # now and report by locus (corners at k in {0,1,2n-1,2n}, rings next to
    # them in C1 mode).
    system_ks = _system_ks(n, mode)
    corner_ks = {0, 1, 2 * n - 1, 2 * n}
    corner_bad: list[tuple[str, int, float]] = []
    ring_bad: list[tuple[str, int, float]] = []
    for kind in ("main", "anti"):
        for k in range(2 * n + 1):
            if k in system_ks:
                continue
            coeffs = _row_coeffs(n, kind, k)
            lhs = sum(c * prescribed[slot] for slot, c in coeffs.items())
            err = float(np.linalg.norm(lhs - binomial(2 * n, k) * _pair_point(pair, kind, k)))
            if err > tol_abs:
                (corner_bad if k in corner_ks else ring_bad).append((kind, k, err))
    if corner_bad:
        raise CornerMismatchError(corner_bad)
    if ring_bad:
        raise RingMismatchError(ring_bad)

    rows = tuple(
        ConstraintRow(
            kind=kind,
            k=k,
            coeffs=_row_coeffs(n, kind, k),
            rhs=binomial(2 * n, k) * _pair_point(pair, kind, k),
        )
        for kind in ("main", "anti")
        for k in system_ks
    )
    return ConstraintSystem(n=n, mode=mode, rows=rows, prescribed=prescribed,
                            dim=pair.dim, scale=scale, tol=tol)


@dataclass(frozen=True)
class SolutionSpace:
    """Affine parameterization of every net realizing a prescription.

    particular is one realization (free slots filled by the Dirichlet
    strategy); basis maps each dependent slot to exact rational coefficients
    over the free slots. Slots carrying neither a basis row nor a free-slot
    role are prescribed and reproduced bit-identically by realize.
    """

    n: int
    mode: PrescriptionMode
    particular: ControlNet
    free_slots: tuple[Slot, ...]
    basis: dict[Slot, tuple[tuple[Slot, Fraction], ...]]

    @property
    def dimension(self) -> int:
        return len(self.free_slots)

    @property
    def dim(self) -> int:
        return self.particular.dim


def _as_point(value, dim: int, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"{what}: expected {dim} coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: coordinates must be finite")
    return arr


def realize(space: SolutionSpace, free_values: dict[Slot, np.ndarray] | None = None) -> ControlNet:
    """One net from the space; unspecified free slots keep the particular's fill."""
    fv = dict(free_values or {})
    unknown = set(fv) - set(space.free_slots)
    if unknown:
        raise KeyError(f"unknown free slots: {sorted(unknown)}; free slots are {list(space.free_slots)}")
    base = space.particular.points
    values = {
        slot: _as_point(fv[slot], space.dim, f"free value for {slot}") if slot in fv else base[slot]
        for slot in space.free_slots
    }
    out = np.array(base)
    for slot in space.free_slots:
        out[slot] = values[slot]
    for dep, terms in space.basis.items():
        delta = np.zeros(space.dim)
        for free_slot, coeff in terms:
            delta += float(coeff) * (values[free_slot] - base[free_slot])
        out[dep] = base[dep] + delta
    return ControlNet(out)


def solve_space(system: ConstraintSystem) -> SolutionSpace:
    """Exact-rank elimination of the system into an affine solution space.

    Raises InconsistentSystemError when the right-hand side leaves the column
    space by more than tol * scale (for an admissible, corner-consistent
    prescription this cannot happen).
    """
    structure = system_structure(system.n, system.mode)
    red = structure.reduction
    tol_abs = system.tol * max(system.scale, 1.0)

    b = np.empty((len(system.rows), system.dim))
    for idx, row in enumerate(system.rows):
        rhs = np.array(row.rhs, dtype=float)
        for slot, c in row.coeffs.items():
            if slot in system.prescribed:
                rhs -= c * system.prescribed[slot]
        b[idx] = rhs

    transform = np.array([[float(x) for x in trow] for trow in red.transform])
    b_red = transform @ b

    for r in range(red.rank, len(system.rows)):
        residual = float(np.linalg.norm(b_red[r]))
        if residual > tol_abs:
            raise InconsistentSystemError(
                f"prescription is not realizable: eliminated row residual {residual:.3e} "
                f"exceeds {system.tol:g} * scale"
            )

    unknown = structure.unknown_slots
    free_slots = structure.free_slots
    basis: dict[Slot, tuple[tuple[Slot, Fraction], ...]] = {}
    offsets: dict[Slot, np.ndarray] = {}
    for r, c in red.pivots:
        dep = unknown[c]
        offsets[dep] = b_red[r]
        terms = tuple(
            (unknown[f], -red.reduced[r][f])
            for f in red.free_cols
            if red.reduced[r][f] != 0
        )
        basis[dep] = terms

    n, d = system.n, system.dim
    arr = np.zeros((n + 1, n + 1, d))
    for slot, value in system.prescribed.items():
        arr[slot] = value
    for dep, value in offsets.items():
        arr[dep] = value
    space = SolutionSpace(
        n=n,
        mode=system.mode,
        particular=ControlNet(arr),
        free_slots=free_slots,
        basis=basis,
    )
    if space.dimension:
        space = replace(space, particular=realize(space, fill_free(space, "dirichlet")))
    return space


def solve_prescription(prescription: Prescription, *, tol: float = DEFAULT_TOL,
                       check_admissible: bool = True) -> SolutionSpace:
    system = build_system(prescription.pair, prescription.mode, prescription.boundary,
                          tol=tol, check_admissible=check_admissible)
    return solve_space(system)


# --- fill strategies ------------------------------------------------------

def _grid_laplacian(n: int) -> np.ndarray:
    size = (n + 1) * (n + 1)
    lap = np.zeros((size, size))

    def idx(i, j):
        return i * (n + 1) + j

    for i in range(n + 1):
        for j in range(n + 1):
            a = idx(i, j)
            for bi, bj in ((i + 1, j), (i, j + 1)):
                if bi <= n and bj <= n:
                    b = idx(bi, bj)
                    lap[a, a] += 1
                    lap[b, b] += 1
                    lap[a, b] -= 1
                    lap[b, a] -= 1
    return lap


def fill_free(space: SolutionSpace, strategy: str = "dirichlet") -> dict[Slot, np.ndarray]:
    """Values for the free slots; {} when the space has dimension zero.

    dirichlet: minimize the discrete Dirichlet energy (sum of squared
    distances between grid-adjacent control points) over the solution space;
    the normal equations are nonsingular because no nonzero homogeneous
    solution is a constant net. coons: the bilinear blend of the particular
    net's boundary rows and columns.
    """
    if strategy not in ("dirichlet", "coons"):
        raise ValueError(f"unknown fill strategy {strategy!r}; expected dirichlet or coons")
    if not space.dimension:
        return {}
    n, d = space.n, space.dim
    if strategy == "coons":
        p = space.particular.points
        out = {}
        for i, j in space.free_slots:
            u, v = i / n, j / n
            blend = (
                (1 - u) * p[0, j] + u * p[n, j]
                + (1 - v) * p[i, 0] + v * p[i, n]
                - ((1 - u) * (1 - v) * p[0, 0] + (1 - u) * v * p[0, n]
                   + u * (1 - v) * p[n, 0] + u * v * p[n, n])
            )
            out[(i, j)] = blend
        return out

    size = (n + 1) * (n + 1)

    def idx(slot):
        return slot[0] * (n + 1) + slot[1]

    zeros = {slot: np.zeros(d) for slot in space.free_slots}
    c = realize(space, zeros).points.reshape(size, d)
    basis_mat = np.zeros((size, len(space.free_slots)))
    col = {slot: f for f, slot in enumerate(space.free_slots)}
    for slot in space.free_slots:
        basis_mat[idx(slot), col[slot]] = 1.0
    for dep, terms in space.basis.items():
        for free_slot, coeff in terms:
            basis_mat[idx(dep), col[free_slot]] = float(coeff)

    lap = _grid_laplacian(n)
    normal = basis_mat.T @ lap @ basis_mat
    if np.linalg.matrix_rank(normal) < len(space.free_slots):
        raise ArithmeticError("dirichlet fill: singular normal equations")
    solution = np.linalg.solve(normal, -(basis_mat.T @ (lap @ c)))
    return {slot: solution[col[slot]] for slot in space.free_slots}


# --- dimension bookkeeping ------------------------------------------------

@dataclass(frozen=True)
class SpaceDimension:
    dimension: int
    formula_exempt: bool


def dimension_formula(n: int, mode) -> SpaceDimension:
    """Solution-space dimension for the given degree and mode.

    Inside the validated ranges (n >= 1 / 3 / 5) this is the closed-form
    count (n-1)^2 / (n-3)^2 / (n-5)^2; below them (but still meaningful for
    the mode) the dimension is computed by actual elimination and flagged
    formula-exempt.
    """
    mode = PrescriptionMode.coerce(mode)
    if n < mode.min_degree:
        raise ModeDegreeError(f"mode {mode.value!r} needs degree >= {mode.min_degree}, got n = {n}")
    if n >= mode.formula_min_degree:
        return SpaceDimension(mode.formula_dimension(n), formula_exempt=False)
    return SpaceDimension(system_structure(n, mode).dimension, formula_exempt=True)

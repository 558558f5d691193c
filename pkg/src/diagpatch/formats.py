"""Canonical JSON documents and OBJ mesh export.

One external representation per domain object, version 1 throughout. Writing
is deterministic: fixed key order, floats rendered by Python's shortest
round-trip repr, exact rationals as num/den integer pairs. read_document and
write_document are mutually inverse, and write(read(write(x))) is
byte-identical to write(x).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bezier import ControlNet, CurvePolygon, eval_surface
from .diagonals import CompatibilityReport, DiagonalPair
from .solver import (
    BoundaryData,
    C1BoundaryData,
    ModeDegreeError,
    Prescription,
    PrescriptionMode,
    SolutionSpace,
)

__all__ = ["Document", "DocumentError", "read_document", "write_document", "export_mesh", "KINDS"]

KINDS = ("net", "curve", "diagonal_pair", "prescription", "solution_space", "report")
VERSION = 1


class DocumentError(ValueError):
    """Malformed document; the message carries the offending field path."""


@dataclass(frozen=True)
class Document:
    kind: str
    payload: object


def _fail(path: str, message: str):
    raise DocumentError(f"{path}: {message}")


def _get(obj: dict, key: str, path: str):
    if key not in obj:
        _fail(path, f"missing field {key!r}")
    return obj[key]


def _int_field(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _float_field(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(path, "number must be finite")
    return value


def _point(value, path: str, dim: int | None = None) -> list[float]:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a non-empty coordinate array")
    coords = [_float_field(c, f"{path}[{idx}]") for idx, c in enumerate(value)]
    if dim is not None and len(coords) != dim:
        _fail(path, f"expected {dim} coordinates, got {len(coords)}")
    return coords


def _point_rows(value, path: str, count: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a non-empty array of points")
    if count is not None and len(value) != count:
        _fail(path, f"expected {count} points, got {len(value)}")
    first = _point(value[0], f"{path}[0]")
    rows = [first]
    for idx, entry in enumerate(value[1:], start=1):
        rows.append(_point(entry, f"{path}[{idx}]", dim=len(first)))
    return np.array(rows, dtype=float)


def _slot(value, path: str, n: int) -> tuple[int, int]:
    if not isinstance(value, list) or len(value) != 2:
        _fail(path, "expected a slot [i, j]")
    i = _int_field(value[0], f"{path}[0]")
    j = _int_field(value[1], f"{path}[1]")
    if not (0 <= i <= n and 0 <= j <= n):
        _fail(path, f"slot [{i}, {j}] outside the (n+1) x (n+1) grid for n = {n}")
    return (i, j)


# --- parsing ---------------------------------------------------------------

def _parse_net(obj: dict, path: str) -> ControlNet:
    degree = _int_field(_get(obj, "degree", path), f"{path}.degree")
    if degree < 1:
        _fail(f"{path}.degree", "degree must be positive")
    rows = _get(obj, "points", path)
    if not isinstance(rows, list) or len(rows) != degree + 1:
        _fail(f"{path}.points", f"expected {degree + 1} rows")
    grid = [_point_rows(row, f"{path}.points[{i}]", count=degree + 1) for i, row in enumerate(rows)]
    dims = {g.shape[1] for g in grid}
    if len(dims) != 1:
        _fail(f"{path}.points", "rows disagree on the coordinate dimension")
    try:
        return ControlNet(np.array(grid))
    except ValueError as exc:
        _fail(f"{path}.points", str(exc))


def _parse_curve_payload(obj: dict, path: str, degree: int | None = None) -> CurvePolygon:
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    deg = _int_field(_get(obj, "degree", path), f"{path}.degree")
    if degree is not None and deg != degree:
        _fail(f"{path}.degree", f"expected degree {degree}, got {deg}")
    points = _point_rows(_get(obj, "points", path), f"{path}.points", count=deg + 1)
    try:
        return CurvePolygon(points)
    except ValueError as exc:
        _fail(f"{path}.points", str(exc))


def _parse_pair_payload(obj: dict, path: str, n: int) -> DiagonalPair:
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    q = _parse_curve_payload(_get(obj, "q", path), f"{path}.q", degree=2 * n)
    r = _parse_curve_payload(_get(obj, "r", path), f"{path}.r", degree=2 * n)
    try:
        return DiagonalPair(q, r)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_pair(obj: dict, path: str) -> DiagonalPair:
    n = _int_field(_get(obj, "n", path), f"{path}.n")
    if n < 1:
        _fail(f"{path}.n", "n must be positive")
    return _parse_pair_payload(obj, path, n)


_BOUNDARY_KEYS = ("row0", "row_n", "col0", "col_n")
_RING_KEYS = ("row1", "row_n1", "col1", "col_n1")


def _parse_lines(obj: dict, path: str, keys: tuple[str, ...], n: int) -> dict[str, CurvePolygon]:
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    out = {}
    for key in keys:
        points = _point_rows(_get(obj, key, path), f"{path}.{key}", count=n + 1)
        out[key] = CurvePolygon(points)
    return out


def _parse_prescription(obj: dict, path: str) -> Prescription:
    n = _int_field(_get(obj, "n", path), f"{path}.n")
    if n < 1:
        _fail(f"{path}.n", "n must be positive")
    mode_raw = _get(obj, "mode", path)
    try:
        mode = PrescriptionMode.coerce(mode_raw)
    except ValueError as exc:
        _fail(f"{path}.mode", str(exc))
    if n < mode.min_degree:
        raise ModeDegreeError(f"{path}.mode: mode {mode.value!r} needs degree >= {mode.min_degree}, got n = {n}")
    pair = _parse_pair_payload(_get(obj, "pair", path), f"{path}.pair", n)

    boundary = None
    if mode is not PrescriptionMode.DIAGONALS:
        lines = _parse_lines(_get(obj, "boundary", path), f"{path}.boundary", _BOUNDARY_KEYS, n)
        try:
            boundary = BoundaryData(**lines)
        except ValueError as exc:
            _fail(f"{path}.boundary", str(exc))
        if mode is PrescriptionMode.C1:
            rings = _parse_lines(_get(obj, "rings", path), f"{path}.rings", _RING_KEYS, n)
            try:
                boundary = C1BoundaryData(boundary=boundary, **rings)
            except ValueError as exc:
                _fail(f"{path}.rings", str(exc))
    elif "boundary" in obj or "rings" in obj:
        _fail(path, "diagonals mode takes no boundary or rings")
    try:
        return Prescription(pair, mode, boundary)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_space(obj: dict, path: str) -> SolutionSpace:
    n = _int_field(_get(obj, "n", path), f"{path}.n")
    if n < 1:
        _fail(f"{path}.n", "n must be positive")
    try:
        mode = PrescriptionMode.coerce(_get(obj, "mode", path))
    except ValueError as exc:
        _fail(f"{path}.mode", str(exc))
    dimension = _int_field(_get(obj, "dimension", path), f"{path}.dimension")
    particular_obj = _get(obj, "particular", path)
    if not isinstance(particular_obj, dict):
        _fail(f"{path}.particular", "expected an object")
    particular = _parse_net(particular_obj, f"{path}.particular")
    if particular.degree != n:
        _fail(f"{path}.particular", f"net degree {particular.degree} does not match n = {n}")

    raw_free = _get(obj, "free_slots", path)
    if not isinstance(raw_free, list):
        _fail(f"{path}.free_slots", "expected an array of slots")
    free_slots = tuple(_slot(s, f"{path}.free_slots[{idx}]", n) for idx, s in enumerate(raw_free))
    if len(set(free_slots)) != len(free_slots):
        _fail(f"{path}.free_slots", "free slots repeat")
    if dimension != len(free_slots):
        _fail(f"{path}.dimension", f"dimension {dimension} does not match {len(free_slots)} free slots")

    raw_basis = _get(obj, "basis", path)
    if not isinstance(raw_basis, list):
        _fail(f"{path}.basis", "expected an array")
    basis: dict[tuple[int, int], tuple] = {}
    free_set = set(free_slots)
    for idx, entry in enumerate(raw_basis):
        entry_path = f"{path}.basis[{idx}]"
        if not isinstance(entry, dict):
            _fail(entry_path, "expected an object")
        slot = _slot(_get(entry, "slot", entry_path), f"{entry_path}.slot", n)
        if slot in free_set or slot in basis:
            _fail(f"{entry_path}.slot", f"slot {list(slot)} is free or repeated")
        raw_terms = _get(entry, "terms", entry_path)
        if not isinstance(raw_terms, list):
            _fail(f"{entry_path}.terms", "expected an array")
        terms = []
        for tdx, term in enumerate(raw_terms):
            term_path = f"{entry_path}.terms[{tdx}]"
            if not isinstance(term, dict):
                _fail(term_path, "expected an object")
            free_slot = _slot(_get(term, "free", term_path), f"{term_path}.free", n)
            if free_slot not in free_set:
                _fail(f"{term_path}.free", f"slot {list(free_slot)} is not a free slot")
            num = _int_field(_get(term, "num", term_path), f"{term_path}.num")
            den = _int_field(_get(term, "den", term_path), f"{term_path}.den")
            if den == 0:
                _fail(f"{term_path}.den", "zero denominator")
            terms.append((free_slot, Fraction(num, den)))
        basis[slot] = tuple(terms)
    return SolutionSpace(n=n, mode=mode, particular=particular, free_slots=free_slots, basis=basis)


def _parse_report(obj: dict, path: str) -> CompatibilityReport:
    parity = _get(obj, "parity", path)
    if parity not in ("even", "odd"):
        _fail(f"{path}.parity", f"expected 'even' or 'odd', got {parity!r}")
    res_a = _point(_get(obj, "residual_a", path), f"{path}.residual_a")
    res_b = _point(_get(obj, "residual_b", path), f"{path}.residual_b", dim=len(res_a))
    scale = _float_field(_get(obj, "scale", path), f"{path}.scale")
    tol = _float_field(_get(obj, "tol", path), f"{path}.tol")
    admissible = _get(obj, "admissible", path)
    if not isinstance(admissible, bool):
        _fail(f"{path}.admissible", "expected a boolean")
    return CompatibilityReport(
        parity=parity,
        residual_a=np.array(res_a),
        residual_b=np.array(res_b),
        scale=scale,
        tol=tol,
        admissible=admissible,
    )


_PARSERS = {
    "net": _parse_net,
    "curve": lambda obj, path: _parse_curve_payload(obj, path),
    "diagonal_pair": _parse_pair,
    "prescription": _parse_prescription,
    "solution_space": _parse_space,
    "report": _parse_report,
}


def _reject_constant(token: str):
    raise DocumentError(f"$: non-finite number {token!r} is not allowed")


def read_document(data: bytes | str) -> Document:
    """Parse and validate one document; raises DocumentError with a field path."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"$: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        _fail("$", "top level must be an object")
    kind = _get(obj, "kind", "$")
    if kind not in KINDS:
        _fail("$.kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    version = _get(obj, "version", "$")
    if version != VERSION:
        _fail("$.version", f"unsupported version {version!r}; this toolkit reads version {VERSION}")
    payload = _PARSERS[kind](obj, "$")
    return Document(kind=kind, payload=payload)


# --- serialization ---------------------------------------------------------

def _coords(point) -> list[float]:
    return [float(c) for c in np.asarray(point)]


def _curve_payload(poly: CurvePolygon) -> dict:
    return {"degree": poly.degree, "points": [_coords(p) for p in poly.points]}


def _net_fields(net: ControlNet) -> dict:
    return {
        "degree": net.degree,
        "points": [[_coords(p) for p in row] for row in net.points],
    }


def _pair_fields(pair: DiagonalPair) -> dict:
    return {"n": pair.n, "q": _curve_payload(pair.q), "r": _curve_payload(pair.r)}


def _prescription_fields(presc: Prescription) -> dict:
    out = {"n": presc.n, "mode": presc.mode.value, "pair": {"q": _curve_payload(presc.pair.q), "r": _curve_payload(presc.pair.r)}}
    if presc.mode is not PrescriptionMode.DIAGONALS:
        boundary = presc.boundary.boundary if isinstance(presc.boundary, C1BoundaryData) else presc.boundary
        out["boundary"] = {key: [_coords(p) for p in getattr(boundary, key).points] for key in _BOUNDARY_KEYS}
        if presc.mode is PrescriptionMode.C1:
            out["rings"] = {key: [_coords(p) for p in getattr(presc.boundary, key).points] for key in _RING_KEYS}
    return out


def _space_fields(space: SolutionSpace) -> dict:
    return {
        "n": space.n,
        "mode": space.mode.value,
        "dimension": space.dimension,
        "free_slots": [list(slot) for slot in space.free_slots],
        "particular": _net_fields(space.particular),
        "basis": [
            {
                "slot": list(slot),
                "terms": [
                    {"free": list(free_slot), "num": coeff.numerator, "den": coeff.denominator}
                    for free_slot, coeff in terms
                ],
            }
            for slot, terms in space.basis.items()
        ],
    }


def _report_fields(report: CompatibilityReport) -> dict:
    return {
        "parity": report.parity,
        "residual_a": _coords(report.residual_a),
        "residual_b": _coords(report.residual_b),
        "scale": float(report.scale),
        "tol": float(report.tol),
        "admissible": bool(report.admissible),
    }


_WRITERS = (
    (ControlNet, "net", _net_fields),
    (CurvePolygon, "curve", _curve_payload),
    (DiagonalPair, "diagonal_pair", _pair_fields),
    (Prescription, "prescription", _prescription_fields),
    (SolutionSpace, "solution_space", _space_fields),
    (CompatibilityReport, "report", _report_fields),
)


def document_fields(payload) -> tuple[str, dict]:
    for cls, kind, writer in _WRITERS:
        if isinstance(payload, cls):
            return kind, writer(payload)
    raise TypeError(f"no document representation for {type(payload).__name__}")


def write_document(payload) -> bytes:
    """Serialize a domain object (or Document) to canonical JSON bytes."""
    if isinstance(payload, Document):
        payload = payload.payload
    kind, fields = document_fields(payload)
    obj = {"kind": kind, "version": VERSION, **fields}
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- mesh export -----------------------------------------------------------

def export_mesh(net: ControlNet, samples: int, include_diagonals: bool = False) -> bytes:
    """Wavefront OBJ triangulation of the surface on a (samples+1)^2 grid.

    Two triangles per grid cell, 1-based vertex indices. With
    include_diagonals, the two diagonal curves are appended as polyline
    objects sampled at the same parameter density.
    """
    if net.dim != 3:
        raise ValueError(f"mesh export needs 3-D points, got dimension {net.dim}")
    if not isinstance(samples, int) or samples < 1:
        raise ValueError("samples must be a positive integer")
    k = samples
    ts = [step / k for step in range(k + 1)]
    lines = ["o surface"]
    for u in ts:
        for v in ts:
            x, y, z = (float(c) for c in eval_surface(net, u, v))
            lines.append(f"v {x!r} {y!r} {z!r}")
    for a in range(k):
        for b in range(k):
            v00 = a * (k + 1) + b + 1
            v10 = (a + 1) * (k + 1) + b + 1
            v11 = (a + 1) * (k + 1) + b + 2
            v01 = a * (k + 1) + b + 2
            lines.append(f"f {v00} {v10} {v11}")
            lines.append(f"f {v00} {v11} {v01}")
    if include_diagonals:
        base = (k + 1) * (k + 1)
        for name, other in (("diagonal_main", lambda t: t), ("diagonal_cross", lambda t: 1.0 - t)):
            lines.append(f"o {name}")
            for t in ts:
                x, y, z = (float(c) for c in eval_surface(net, t, other(t)))
                lines.append(f"v {x!r} {y!r} {z!r}")
            lines.append("l " + " ".join(str(base + idx + 1) for idx in range(k + 1)))
            base += k + 1
    return ("\n".join(lines) + "\n").encode("utf-8")

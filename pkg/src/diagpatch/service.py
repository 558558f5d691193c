"""HTTP design service: sessions holding a prescription and live free-slot edits.

Sessions are in-memory. Every successful mutation bumps the session revision
by exactly one (no gaps); clients may send If-Match with the revision they
last saw and get 409 when it is stale. Mutations within a session are
serialized by a per-session lock. Before a mesh is served, the realized
net's extracted diagonals are re-checked against the session's prescribed
pair; a drift beyond 1e-9 of the scale is a server bug and turns into a 500
rather than a silently wrong mesh.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np
from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse

from .diagonals import (
    DEFAULT_TOL,
    check_compatibility,
    default_repair_mode,
    extract_diagonals,
    repair,
    REPAIR_MODES,
)
from .formats import DocumentError, export_mesh, read_document, write_document, document_fields
from .solver import (
    CornerMismatchError,
    InadmissiblePairError,
    InconsistentSystemError,
    ModeDegreeError,
    Prescription,
    RingMismatchError,
    SolutionSpace,
    realize,
    solve_prescription,
)

MAX_MESH_SAMPLES = 256

Slot = tuple[int, int]


@dataclass
class Session:
    id: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    revision: int = 0
    prescription: Prescription | None = None
    space: SolutionSpace | None = None
    free_values: dict[Slot, list[float]] = field(default_factory=dict)


class SessionStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create(self) -> Session:
        session = Session(id=uuid.uuid4().hex[:12])
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def all(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())


def _error(status: int, code: str, **extra):
    return JSONResponse(status_code=status, content={"code": code, **extra})


def _json_doc(payload) -> Response:
    return Response(content=write_document(payload), media_type="application/json")


def _stale(session: Session, if_match: str | None):
    """409 response when the client's revision is not the current one."""
    if if_match is None:
        return None
    try:
        seen = int(if_match.strip().strip('"'))
    except ValueError:
        return _error(409, "revision_mismatch", detail=f"unparsable If-Match {if_match!r}",
                      current_revision=session.revision)
    if seen != session.revision:
        return _error(409, "revision_mismatch", current_revision=session.revision)
    return None


def _residual_payload(report) -> dict:
    return {
        "parity": report.parity,
        "residual_a": [float(c) for c in report.residual_a],
        "residual_b": [float(c) for c in report.residual_b],
        "scale": float(report.scale),
        "max_residual": float(report.max_residual),
    }


def _solve_into(session: Session) -> Response | None:
    """Solve the stored prescription; on failure leave the session unsolved."""
    session.space = None
    session.free_values = {}
    presc = session.prescription
    try:
        session.space = solve_prescription(presc)
    except InadmissiblePairError as exc:
        return _error(422, "inadmissible", residuals=_residual_payload(exc.report),
                      revision=session.revision)
    except CornerMismatchError as exc:
        return _error(422, "corner_mismatch", residuals=[
            {"curve": kind, "k": k, "error": err} for kind, k, err in exc.mismatches
        ], revision=session.revision)
    except RingMismatchError as exc:
        return _error(422, "ring_mismatch", residuals=[
            {"curve": kind, "k": k, "error": err} for kind, k, err in exc.mismatches
        ], revision=session.revision)
    except ModeDegreeError as exc:
        return _error(422, "mode_degree", detail=str(exc), revision=session.revision)
    except InconsistentSystemError as exc:
        return _error(422, "inconsistent", detail=str(exc), revision=session.revision)
    return None


def _space_summary(session: Session) -> dict:
    return {
        "dimension": session.space.dimension,
        "free_slots": [list(slot) for slot in session.space.free_slots],
        "revision": session.revision,
    }


def _realized(session: Session):
    values = {slot: np.array(value) for slot, value in session.free_values.items()}
    return realize(session.space, values)


def create_app(snapshot_dir: str | None = None) -> FastAPI:
    store = SessionStore()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if snapshot_dir:
            _write_snapshots(store, snapshot_dir)

    app = FastAPI(title="diagpatch design service", lifespan=lifespan)
    app.state.store = store

    def _session_or_404(session_id: str):
        session = store.get(session_id)
        if session is None:
            return None, _error(404, "unknown_session", detail=f"no session {session_id!r}")
        return session, None

    @app.post("/sessions", status_code=201)
    def create_session():
        session = store.create()
        return {"id": session.id, "revision": session.revision}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session, err = _session_or_404(session_id)
        if err:
            return err
        with session.lock:
            state = {
                "id": session.id,
                "revision": session.revision,
                "prescription": None,
                "solved": session.space is not None,
            }
            if session.prescription is not None:
                kind, fields = document_fields(session.prescription)
                state["prescription"] = {"kind": kind, "version": 1, **fields}
                report = check_compatibility(session.prescription.pair)
                state["admissible"] = report.admissible
            if session.space is not None:
                state["dimension"] = session.space.dimension
                state["free_slots"] = [list(slot) for slot in session.space.free_slots]
                state["free_values"] = {
                    f"{i},{j}": [float(c) for c in value] for (i, j), value in session.free_values.items()
                }
            return state

    @app.put("/sessions/{session_id}/prescription")
    async def put_prescription(session_id: str, request: Request,
                               if_match: str | None = Header(default=None, alias="If-Match")):
        session, err = _session_or_404(session_id)
        if err:
            return err
        body = await request.body()
        try:
            doc = read_document(body)
        except DocumentError as exc:
            return _error(422, "invalid_document", detail=str(exc))
        except ModeDegreeError as exc:
            return _error(422, "mode_degree", detail=str(exc))
        if doc.kind != "prescription":
            return _error(422, "invalid_document", detail=f"expected a prescription document, got {doc.kind}")
        with session.lock:
            stale = _stale(session, if_match)
            if stale:
                return stale
            # The prescription is stored even when validation fails below, so
            # an inadmissible pair can be repaired in place afterwards.
            session.prescription = doc.payload
            session.revision += 1
            failure = _solve_into(session)
            if failure:
                return failure
            return _space_summary(session)

    @app.post("/sessions/{session_id}/repair")
    async def repair_session(session_id: str, request: Request,
                             if_match: str | None = Header(default=None, alias="If-Match")):
        session, err = _session_or_404(session_id)
        if err:
            return err
        try:
            body = json.loads((await request.body()) or b"{}")
        except json.JSONDecodeError as exc:
            return _error(422, "invalid_document", detail=f"repair body: {exc.msg}")
        if not isinstance(body, dict):
            return _error(422, "invalid_document", detail="repair body must be an object")
        with session.lock:
            stale = _stale(session, if_match)
            if stale:
                return stale
            if session.prescription is None:
                return _error(422, "no_prescription", detail="put a prescription first")
            presc = session.prescription
            mode = body.get("mode", default_repair_mode(presc.n))
            if mode not in REPAIR_MODES:
                return _error(422, "invalid_repair", detail=f"unknown repair mode {mode!r}")
            try:
                fixed_pair = repair(presc.pair, mode)
            except ValueError as exc:
                return _error(422, "invalid_repair", detail=str(exc))
            if fixed_pair.n != presc.n and presc.boundary is not None:
                return _error(422, "invalid_repair",
                              detail="elevation changes the degree and orphans the prescribed boundary")
            session.prescription = Prescription(fixed_pair, presc.mode, presc.boundary)
            session.revision += 1
            failure = _solve_into(session)
            if failure:
                return failure
            return _space_summary(session)

    @app.put("/sessions/{session_id}/free/{slot}")
    async def put_free_value(session_id: str, slot: str, request: Request,
                             if_match: str | None = Header(default=None, alias="If-Match")):
        session, err = _session_or_404(session_id)
        if err:
            return err
        try:
            i, j = (int(part) for part in slot.split(","))
        except ValueError:
            return _error(404, "unknown_slot", detail=f"slot path must be i,j; got {slot!r}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _error(422, "invalid_document", detail=f"free value body: {exc.msg}")
        if isinstance(body, dict):
            body = body.get("point")
        if not isinstance(body, list) or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in body):
            return _error(422, "invalid_document", detail="free value must be a coordinate array")
        with session.lock:
            stale = _stale(session, if_match)
            if stale:
                return stale
            if session.space is None:
                return _error(422, "unsolved", detail="session has no solved prescription")
            if (i, j) not in session.space.free_slots:
                return _error(404, "unknown_slot",
                              detail=f"[{i}, {j}] is not free; free slots: "
                                     f"{[list(s) for s in session.space.free_slots]}")
            value = [float(c) for c in body]
            if len(value) != session.space.dim or not all(np.isfinite(value)):
                return _error(422, "invalid_document",
                              detail=f"free value needs {session.space.dim} finite coordinates")
            session.free_values[(i, j)] = value
            session.revision += 1
            return {"revision": session.revision}

    @app.get("/sessions/{session_id}/net")
    def get_net(session_id: str):
        session, err = _session_or_404(session_id)
        if err:
            return err
        with session.lock:
            if session.space is None:
                return _error(422, "unsolved", detail="session has no solved prescription")
            return _json_doc(_realized(session))

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        session, err = _session_or_404(session_id)
        if err:
            return err
        with session.lock:
            if session.prescription is None:
                return _error(422, "no_prescription", detail="put a prescription first")
            return _json_doc(check_compatibility(session.prescription.pair))

    @app.get("/sessions/{session_id}/mesh")
    def get_mesh(session_id: str, samples: int = Query(default=32), diagonals: int = Query(default=0)):
        session, err = _session_or_404(session_id)
        if err:
            return err
        if not 1 <= samples <= MAX_MESH_SAMPLES:
            return _error(422, "invalid_samples", detail=f"samples must be in 1..{MAX_MESH_SAMPLES}")
        with session.lock:
            if session.space is None:
                return _error(422, "unsolved", detail="session has no solved prescription")
            net = _realized(session)
            prescribed = session.prescription.pair
        # Served meshes must come from a net whose diagonals match the
        # prescription; anything else is an internal invariant break.
        extracted = extract_diagonals(net)
        scale = max(prescribed.scale(), 1.0)
        drift = max(
            float(np.max(np.linalg.norm(extracted.q.points - prescribed.q.points, axis=1))),
            float(np.max(np.linalg.norm(extracted.r.points - prescribed.r.points, axis=1))),
        )
        if drift > DEFAULT_TOL * scale:
            return _error(500, "diagonal_drift",
                          detail=f"realized net drifted {drift:.3e} from the prescribed diagonals")
        data = export_mesh(net, samples, include_diagonals=bool(diagonals))
        return Response(content=data, media_type="text/plain")

    return app


def _write_snapshots(store: SessionStore, snapshot_dir: str):
    root = Path(snapshot_dir)
    root.mkdir(parents=True, exist_ok=True)
    for session in store.all():
        state: dict = {"id": session.id, "revision": session.revision, "prescription": None}
        if session.prescription is not None:
            kind, fields = document_fields(session.prescription)
            state["prescription"] = {"kind": kind, "version": 1, **fields}
            state["free_values"] = {
                f"{i},{j}": value for (i, j), value in session.free_values.items()
            }
        (root / f"{session.id}.json").write_text(json.dumps(state, indent=2) + "\n")


@click.command()
@click.option("--host", default=lambda: os.environ.get("DIAGPATCH_HOST", "127.0.0.1"),
              show_default="127.0.0.1 or $DIAGPATCH_HOST")
@click.option("--port", type=int, default=lambda: int(os.environ.get("DIAGPATCH_PORT", "8787")),
              show_default="8787 or $DIAGPATCH_PORT")
@click.option("--snapshot-dir", default=lambda: os.environ.get("DIAGPATCH_SNAPSHOT_DIR"),
              show_default="$DIAGPATCH_SNAPSHOT_DIR", help="Write session snapshots here on shutdown.")
def main(host, port, snapshot_dir):
    """Serve the design API over HTTP."""
    import uvicorn

    uvicorn.run(create_app(snapshot_dir=snapshot_dir), host=host, port=port)


if __name__ == "__main__":
    main()

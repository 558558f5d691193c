import json
import threading

import numpy as np
import pytest
from fastapi.testclient import TestClient

import diagpatch.service as service_mod
from conftest import random_net, scrambled_pair
from diagpatch.bezier import binomial
from diagpatch.formats import read_document, write_document
from diagpatch.service import create_app
from diagpatch.solver import Prescription


@pytest.fixture
def client():
    return TestClient(create_app())


def new_session(client):
    resp = client.post("/sessions")
    assert resp.status_code == 201
    body = resp.json()
    assert body["revision"] == 0
    return body["id"]


def prescription_bytes(rng, n, mode):
    return write_document(Prescription.from_net(random_net(rng, n), mode))


def tampered_prescription(rng, n, mode, k_lo, k_hi):
    """Admissible pair whose k_lo/k_hi main-diagonal points no longer match
    the prescribed slots: a bump at k_lo compensated at k_hi keeps the parity
    sums intact while breaking the pointwise agreement."""
    doc = json.loads(prescription_bytes(rng, n, mode))
    w_lo, w_hi = binomial(2 * n, k_lo), binomial(2 * n, k_hi)
    doc["pair"]["q"]["points"][k_lo][0] += 1.0
    doc["pair"]["q"]["points"][k_hi][0] -= w_lo / w_hi
    return json.dumps(doc).encode()


class TestSessionLifecycle:
    def test_create_and_fetch(self, client):
        sid = new_session(client)
        resp = client.get(f"/sessions/{sid}")
        assert resp.status_code == 200
        assert resp.json() == {
            "id": sid,
            "revision": 0,
            "prescription": None,
            "solved": False,
        }

    def test_unknown_session_is_404(self, client):
        for path in ("", "/net", "/mesh", "/report"):
            resp = client.get(f"/sessions/nope{path}")
            assert resp.status_code == 404
            assert resp.json()["code"] == "unknown_session"

    def test_prescription_flow(self, client, rng):
        sid = new_session(client)
        resp = client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary"))
        assert resp.status_code == 200
        body = resp.json()
        assert body["revision"] == 1
        assert body["dimension"] == 1
        assert len(body["free_slots"]) == 1

        state = client.get(f"/sessions/{sid}").json()
        assert state["solved"] and state["admissible"]
        assert state["dimension"] == 1
        assert state["prescription"]["kind"] == "prescription"

    def test_net_report_mesh(self, client, rng):
        sid = new_session(client)
        raw = prescription_bytes(rng, 4, "boundary")
        client.put(f"/sessions/{sid}/prescription", content=raw)

        net_doc = read_document(client.get(f"/sessions/{sid}/net").content)
        assert net_doc.kind == "net"
        presc = read_document(raw).payload
        np.testing.assert_array_equal(net_doc.payload.points[0, :], presc.boundary.row0.points)

        report = read_document(client.get(f"/sessions/{sid}/report").content)
        assert report.payload.admissible

        mesh = client.get(f"/sessions/{sid}/mesh?samples=4&diagonals=1")
        assert mesh.status_code == 200
        assert mesh.text.startswith("o surface")
        assert "o diagonal_main" in mesh.text

    def test_endpoints_need_solved_prescription(self, client):
        sid = new_session(client)
        for path in ("net", "mesh"):
            resp = client.get(f"/sessions/{sid}/{path}")
            assert resp.status_code == 422
            assert resp.json()["code"] == "unsolved"
        resp = client.get(f"/sessions/{sid}/report")
        assert resp.status_code == 422
        assert resp.json()["code"] == "no_prescription"


class TestFreeSlotEdits:
    def put_boundary_prescription(self, client, rng, sid, n=4):
        resp = client.put(
            f"/sessions/{sid}/prescription", content=prescription_bytes(rng, n, "boundary")
        )
        assert resp.status_code == 200
        return resp.json()

    def test_edit_moves_the_net(self, client, rng):
        sid = new_session(client)
        body = self.put_boundary_prescription(client, rng, sid)
        i, j = body["free_slots"][0]

        before = read_document(client.get(f"/sessions/{sid}/net").content).payload
        resp = client.put(f"/sessions/{sid}/free/{i},{j}", json=[5.0, -1.0, 2.0])
        assert resp.status_code == 200
        assert resp.json()["revision"] == 2
        after = read_document(client.get(f"/sessions/{sid}/net").content).payload

        np.testing.assert_array_equal(after.points[i, j], [5.0, -1.0, 2.0])
        assert not np.array_equal(before.points, after.points)
        # the prescribed boundary never moves
        np.testing.assert_array_equal(before.points[0, :], after.points[0, :])

    def test_point_object_body_accepted(self, client, rng):
        sid = new_session(client)
        body = self.put_boundary_prescription(client, rng, sid)
        i, j = body["free_slots"][0]
        resp = client.put(f"/sessions/{sid}/free/{i},{j}", json={"point": [1.0, 1.0, 1.0]})
        assert resp.status_code == 200

    def test_unknown_slot_404(self, client, rng):
        sid = new_session(client)
        self.put_boundary_prescription(client, rng, sid)
        resp = client.put(f"/sessions/{sid}/free/0,0", json=[0.0, 0.0, 0.0])
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_slot"
        resp = client.put(f"/sessions/{sid}/free/zero,zero", json=[0.0, 0.0, 0.0])
        assert resp.status_code == 404

    def test_malformed_values_rejected(self, client, rng):
        sid = new_session(client)
        body = self.put_boundary_prescription(client, rng, sid)
        i, j = body["free_slots"][0]
        for bad in (b"not json", b'{"x": 1}', b"[1.0, 2.0]", b'[1.0, 2.0, "three"]'):
            resp = client.put(f"/sessions/{sid}/free/{i},{j}", content=bad)
            assert resp.status_code == 422, bad
        # failed edits must not consume revisions
        assert client.get(f"/sessions/{sid}").json()["revision"] == 1

    def test_edit_before_solve_rejected(self, client):
        sid = new_session(client)
        resp = client.put(f"/sessions/{sid}/free/1,1", json=[0.0, 0.0, 0.0])
        assert resp.status_code == 422
        assert resp.json()["code"] == "unsolved"


class TestValidationCodes:
    def test_inadmissible_stored_with_residuals(self, client, rng):
        sid = new_session(client)
        pair = scrambled_pair(rng, 3)
        raw = write_document(Prescription(pair, "diagonals", None))
        resp = client.put(f"/sessions/{sid}/prescription", content=raw)
        assert resp.status_code == 422
        body = resp.json()
        assert body["code"] == "inadmissible"
        assert body["revision"] == 1  # stored: the revision advances
        assert body["residuals"]["max_residual"] > 0
        state = client.get(f"/sessions/{sid}").json()
        assert state["prescription"] is not None
        assert not state["solved"]
        assert state["admissible"] is False

    def test_corner_mismatch(self, client, rng):
        sid = new_session(client)
        raw = tampered_prescription(rng, 4, "boundary", k_lo=0, k_hi=2)
        resp = client.put(f"/sessions/{sid}/prescription", content=raw)
        assert resp.status_code == 422
        assert resp.json()["code"] == "corner_mismatch"

    def test_ring_mismatch(self, client, rng):
        sid = new_session(client)
        raw = tampered_prescription(rng, 6, "c1", k_lo=2, k_hi=4)
        resp = client.put(f"/sessions/{sid}/prescription", content=raw)
        assert resp.status_code == 422
        assert resp.json()["code"] == "ring_mismatch"

    def test_mode_degree(self, client, rng):
        sid = new_session(client)
        doc = json.loads(prescription_bytes(rng, 3, "boundary"))
        doc["mode"] = "c1"
        resp = client.put(f"/sessions/{sid}/prescription", content=json.dumps(doc).encode())
        assert resp.status_code == 422
        assert resp.json()["code"] == "mode_degree"

    def test_garbage_document(self, client):
        sid = new_session(client)
        resp = client.put(f"/sessions/{sid}/prescription", content=b"{]")
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_document"

    def test_wrong_kind_document(self, client, rng):
        sid = new_session(client)
        resp = client.put(
            f"/sessions/{sid}/prescription", content=write_document(random_net(rng, 3))
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_document"

    def test_mesh_sample_cap(self, client, rng):
        sid = new_session(client)
        client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary"))
        for samples in (0, 257, 100000):
            resp = client.get(f"/sessions/{sid}/mesh?samples={samples}")
            assert resp.status_code == 422
            assert resp.json()["code"] == "invalid_samples"
        assert client.get(f"/sessions/{sid}/mesh?samples=256").status_code == 200


class TestRepairEndpoint:
    def test_red_to_green(self, client, rng):
        sid = new_session(client)
        raw = write_document(Prescription(scrambled_pair(rng, 3), "diagonals", None))
        assert client.put(f"/sessions/{sid}/prescription", content=raw).status_code == 422

        resp = client.post(f"/sessions/{sid}/repair", json={"mode": "central"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["revision"] == 2
        assert body["dimension"] == 4

        report = read_document(client.get(f"/sessions/{sid}/report").content)
        assert report.payload.admissible
        assert client.get(f"/sessions/{sid}/net").status_code == 200

    def test_default_mode_used_when_unspecified(self, client, rng):
        sid = new_session(client)
        raw = write_document(Prescription(scrambled_pair(rng, 3), "diagonals", None))
        client.put(f"/sessions/{sid}/prescription", content=raw)
        resp = client.post(f"/sessions/{sid}/repair", content=b"")
        assert resp.status_code == 200

    def test_no_prescription(self, client):
        sid = new_session(client)
        resp = client.post(f"/sessions/{sid}/repair", json={"mode": "central"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "no_prescription"

    def test_unknown_mode(self, client, rng):
        sid = new_session(client)
        raw = write_document(Prescription(scrambled_pair(rng, 2), "diagonals", None))
        client.put(f"/sessions/{sid}/prescription", content=raw)
        resp = client.post(f"/sessions/{sid}/repair", json={"mode": "polish"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_repair"

    def test_elevation_refused_when_boundary_prescribed(self, client, rng):
        sid = new_session(client)
        client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary"))
        resp = client.post(f"/sessions/{sid}/repair", json={"mode": "elevate"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_repair"

    def test_elevation_allowed_in_diagonals_mode(self, client, rng):
        sid = new_session(client)
        raw = write_document(Prescription(scrambled_pair(rng, 2), "diagonals", None))
        client.put(f"/sessions/{sid}/prescription", content=raw)
        resp = client.post(f"/sessions/{sid}/repair", json={"mode": "elevate"})
        assert resp.status_code == 200
        assert resp.json()["dimension"] == 4  # degree rose to 3


class TestRevisions:
    def test_if_match_guard(self, client, rng):
        sid = new_session(client)
        body = client.put(
            f"/sessions/{sid}/prescription",
            content=prescription_bytes(rng, 4, "boundary"),
            headers={"If-Match": "0"},
        ).json()
        i, j = body["free_slots"][0]

        ok = client.put(f"/sessions/{sid}/free/{i},{j}", json=[1.0, 1.0, 1.0], headers={"If-Match": "1"})
        assert ok.status_code == 200

        stale = client.put(f"/sessions/{sid}/free/{i},{j}", json=[2.0, 2.0, 2.0], headers={"If-Match": "1"})
        assert stale.status_code == 409
        assert stale.json()["current_revision"] == 2

        garbage = client.put(f"/sessions/{sid}/free/{i},{j}", json=[2.0, 2.0, 2.0], headers={"If-Match": "soon"})
        assert garbage.status_code == 409

    def test_revisions_have_no_gaps(self, client, rng):
        sid = new_session(client)
        client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 5, "boundary"))
        state = client.get(f"/sessions/{sid}").json()
        expected = 1
        assert state["revision"] == expected
        for slot in state["free_slots"]:
            expected += 1
            resp = client.put(f"/sessions/{sid}/free/{slot[0]},{slot[1]}", json=[0.0, 0.0, 0.0])
            assert resp.json()["revision"] == expected

    def test_concurrent_edits_serialize(self, client, rng):
        sid = new_session(client)
        body = client.put(
            f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary")
        ).json()
        i, j = body["free_slots"][0]
        per_thread, nthreads = 20, 6
        failures = []

        def hammer(tid):
            for step in range(per_thread):
                resp = client.put(f"/sessions/{sid}/free/{i},{j}", json=[float(tid), float(step), 0.0])
                if resp.status_code != 200:
                    failures.append(resp.status_code)

        threads = [threading.Thread(target=hammer, args=(t,)) for t in range(nthreads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not failures
        assert client.get(f"/sessions/{sid}").json()["revision"] == 1 + per_thread * nthreads


class TestMeshGuarantee:
    def test_drift_turns_into_500(self, client, rng, monkeypatch):
        sid = new_session(client)
        client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary"))
        # force the guard to see every realized net as drifted
        monkeypatch.setattr(service_mod, "DEFAULT_TOL", -1.0)
        resp = client.get(f"/sessions/{sid}/mesh")
        assert resp.status_code == 500
        assert resp.json()["code"] == "diagonal_drift"


class TestSnapshots:
    def test_written_on_shutdown(self, tmp_path, rng):
        app = create_app(snapshot_dir=str(tmp_path))
        with TestClient(app) as client:
            sid = new_session(client)
            client.put(f"/sessions/{sid}/prescription", content=prescription_bytes(rng, 4, "boundary"))
            state = client.get(f"/sessions/{sid}").json()
            i, j = state["free_slots"][0]
            client.put(f"/sessions/{sid}/free/{i},{j}", json=[1.0, 2.0, 3.0])
        snap = json.loads((tmp_path / f"{sid}.json").read_text())
        assert snap["revision"] == 2
        assert snap["prescription"]["kind"] == "prescription"
        assert snap["free_values"][f"{i},{j}"] == [1.0, 2.0, 3.0]

    def test_no_directory_without_snapshot_dir(self, tmp_path):
        app = create_app()
        with TestClient(app) as client:
            new_session(client)
        assert list(tmp_path.iterdir()) == []

"""HTTP session API: lifecycle, determinism, flags, error codes."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from qpermlab.server import create_app
from qpermlab.specs import HopfCache


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(cache=HopfCache()))


def create_kp_session(client, seed=7, state=None):
    body = {"group": {"kind": "kac_paljutkin"}, "seed": seed}
    if state is not None:
        body["state"] = state
    response = client.post("/api/session", json=body)
    assert response.status_code == 200
    return response.json()


def test_create_returns_slice(client):
    data = create_kp_session(client)
    assert data["n"] == 4
    matrix = np.array(data["slice"])
    assert matrix.shape == (4, 4)
    assert np.allclose(matrix.sum(axis=0), 1, atol=1e-9)
    assert np.allclose(matrix.sum(axis=1), 1, atol=1e-9)


def test_measure_updates_and_locks_entry(client):
    data = create_kp_session(client, seed=13)
    sid = data["id"]
    response = client.post(f"/api/session/{sid}/measure", json={"position": 1})
    assert response.status_code == 200
    body = response.json()
    outcome = body["outcome"]
    matrix = np.array(body["slice"])
    assert matrix[outcome - 1, 0] == pytest.approx(1.0, abs=1e-9)
    again = client.post(f"/api/session/{sid}/measure", json={"position": 1}).json()
    assert again["outcome"] == outcome
    assert again["probability"] == pytest.approx(1.0, abs=1e-9)
    assert again["nonClassicalFlag"] is False


def test_character_session_is_static(client):
    data = create_kp_session(client, state={"kind": "character", "perm": [2, 1, 4, 3]})
    sid = data["id"]
    for _ in range(4):
        body = client.post(f"/api/session/{sid}/measure", json={"position": 1}).json()
        assert body["outcome"] == 2
        assert body["nonClassicalFlag"] is False


def test_scripted_replay_is_bit_exact(client):
    def run(seed):
        sid = create_kp_session(client, seed=seed)["id"]
        outcomes = []
        for position in (1, 3, 1, 2, 4, 1):
            body = client.post(f"/api/session/{sid}/measure",
                               json={"position": position}).json()
            outcomes.append((body["outcome"], body["probability"]))
        return outcomes

    assert run(99) == run(99)


def test_non_classical_flag_fires(client):
    # hunt a seed whose trajectory revisits position 1 with a new outcome
    for seed in range(200):
        sid = create_kp_session(client, seed=seed)["id"]
        outcomes = {}
        for position in (1, 3, 1, 3, 1):
            body = client.post(f"/api/session/{sid}/measure",
                               json={"position": position}).json()
            seen = outcomes.setdefault(position, [])
            expected_flag = bool(seen) and any(o != body["outcome"] for o in seen)
            assert body["nonClassicalFlag"] == expected_flag
            seen.append(body["outcome"])
        if any(len(set(v)) > 1 for v in outcomes.values()):
            return
    pytest.fail("no non-classical trajectory found in 200 seeds")


def test_get_session_state(client):
    sid = create_kp_session(client, seed=3)["id"]
    client.post(f"/api/session/{sid}/measure", json={"position": 2})
    data = client.get(f"/api/session/{sid}").json()
    assert len(data["history"]) == 1
    entry = data["history"][0]
    assert entry["position"] == 2 and 1 <= entry["outcome"] <= 4
    assert data["fixedPointDistribution"]
    total = sum(data["fixedPointDistribution"].values())
    assert total == pytest.approx(1.0, abs=1e-6)


def test_reset_restores_initial_slice(client):
    created = create_kp_session(client, seed=21)
    sid = created["id"]
    client.post(f"/api/session/{sid}/measure", json={"position": 1})
    reset = client.post(f"/api/session/{sid}/reset").json()
    assert reset["slice"] == created["slice"]
    assert client.get(f"/api/session/{sid}").json()["history"] == []


def test_delete_session(client):
    sid = create_kp_session(client)["id"]
    assert client.delete(f"/api/session/{sid}").status_code == 200
    assert client.get(f"/api/session/{sid}").status_code == 404
    assert client.delete(f"/api/session/{sid}").status_code == 404


def test_unknown_session_404(client):
    assert client.get("/api/session/nope").status_code == 404
    assert client.post("/api/session/nope/measure", json={"position": 1}).status_code == 404


def test_invalid_specs_400(client):
    assert client.post("/api/session", json={"group": {"kind": "wat"}}).status_code == 400
    assert client.post("/api/session",
                       json={"group": "kac_paljutkin",
                             "state": {"kind": "character", "perm": [2, 3, 4, 1]}},
                       ).status_code == 400     # not in the deterministic group
    sid = create_kp_session(client)["id"]
    assert client.post(f"/api/session/{sid}/measure",
                       json={"position": 9}).status_code == 400


def test_null_event_maps_to_409(client, monkeypatch):
    # sampling never draws a null outcome from a valid state, so the 409
    # path is defensive; verify the wiring by forcing the domain error
    from qpermlab import server as server_module
    from qpermlab.errors import NullEvent

    sid = create_kp_session(client, seed=4)["id"]

    def explode(session, position):
        raise NullEvent("all outcomes are null events")

    monkeypatch.setattr(server_module, "sample_measurement", explode)
    response = client.post(f"/api/session/{sid}/measure", json={"position": 1})
    assert response.status_code == 409


def test_responses_deterministic_across_sessions(client):
    a = create_kp_session(client, seed=77)
    b = create_kp_session(client, seed=77)
    seq_a = [client.post(f"/api/session/{a['id']}/measure", json={"position": p}).json()
             for p in (1, 2, 3, 4, 1)]
    seq_b = [client.post(f"/api/session/{b['id']}/measure", json={"position": p}).json()
             for p in (1, 2, 3, 4, 1)]
    assert seq_a == seq_b


def test_concurrent_sessions_are_independent(client):
    import concurrent.futures

    def run_session(seed):
        sid = create_kp_session(client, seed=seed)["id"]
        outcomes = []
        for position in (1, 3, 1, 2):
            body = client.post(f"/api/session/{sid}/measure",
                               json={"position": position}).json()
            outcomes.append(body["outcome"])
        return seed, tuple(outcomes)

    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        results = dict(pool.map(run_session, [5, 6, 7, 8] * 4))
    # same seed always yields the same trajectory, regardless of interleaving
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        again = dict(pool.map(run_session, [5, 6, 7, 8] * 4))
    assert results == again

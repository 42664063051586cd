"""Tests for the session service: handlers, HTTP API, persistence."""

import json

import pytest
from fastapi.testclient import TestClient

from verba.elicitation import SimulatedResponder, elicit_lexicon
from verba.fuzzy import UnitFuzzyNumber
from verba.service import create_app
from verba.service.store import DataStore
from verba.service import sessions as handlers


def _trap(a, b=None, c=None, d=None):
    if b is None:
        b = c = d = a
    return {"a": a, "b": b, "c": c, "d": d}


def _worked_graph(qualifier=None, quantifier="usually"):
    return {
        "claim": "the batch will pass",
        "qualifier": qualifier,
        "grounds": [{"ref": "g1", "statement": "clean history", "credibility": _trap(0.9)}],
        "warrants": [{"ref": "w1", "grounds": ["g1"], "quantifier": quantifier}],
        "backings": [{"warrant": "w1", "reliability": _trap(1.0)}],
        "rebuttals": [{"target_kind": "claim", "strength": _trap(0.5)}],
    }


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(str(tmp_path)))


class TestSessionLifecycle:
    def test_create_empty_and_with_graph(self, client):
        r = client.post("/sessions", json={})
        assert r.status_code == 201
        assert r.json()["phase"] == "building"
        assert r.json()["version"] == 0
        r = client.post("/sessions", json={"graph": _worked_graph()})
        assert r.status_code == 201
        assert r.json()["graph"]["claim"] == "the batch will pass"

    def test_malformed_graph_rejected(self, client):
        bad = _worked_graph()
        bad["warrants"][0]["grounds"] = ["g9"]
        r = client.post("/sessions", json={"graph": bad})
        assert r.status_code == 422
        assert "g9" in r.json()["detail"]

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef0000").status_code == 404
        assert client.get("/sessions/deadbeef0000/question").status_code == 404

    def test_ambiguity_question_then_resolution_then_evaluation(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        assert q["kind"] == "ambiguity"
        assert q["warrant"] == "w1"
        assert q["term"] == "usually"
        assert len(q["senses"]) == 2

        r = client.post(f"/sessions/{sid}/evaluate")
        assert r.json()["status"] == "pending"
        assert r.json()["session"]["phase"] == "pending-ambiguity"
        version = r.json()["session"]["version"]

        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": q["question_id"],
                "version": version,
                "payload": {"kind": "resolve", "custom": _trap(0.7)},
            },
        )
        assert r.status_code == 200
        assert r.json()["session"]["phase"] == "building"
        assert r.json()["question"] is None
        resolutions = r.json()["session"]["resolutions"]
        assert resolutions[0]["warrant"] == "w1"
        assert resolutions[0]["choice"] == "custom"

        r = client.post(f"/sessions/{sid}/evaluate")
        body = r.json()
        assert body["status"] == "evaluated"
        assert body["evaluation"]["claim_credibility"] == _trap(0.315)

    def test_two_ambiguities_served_in_warrant_order(self, client):
        graph = _worked_graph()
        graph["grounds"].append({"ref": "g2", "credibility": _trap(0.5)})
        graph["warrants"].append({"ref": "w2", "grounds": ["g2"], "quantifier": "usually"})
        sid = client.post("/sessions", json={"graph": graph}).json()["id"]
        version = 0
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        assert q["warrant"] == "w1"
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": q["question_id"],
                "version": version,
                "payload": {"kind": "resolve", "choice": 0},
            },
        )
        assert r.json()["session"]["phase"] == "pending-ambiguity"
        q2 = r.json()["question"]
        assert q2["warrant"] == "w2"

    def test_sense_choice_uses_stored_meaning(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": q["question_id"],
                "version": 0,
                "payload": {"kind": "resolve", "choice": 1},
            },
        )
        stored = r.json()["session"]["resolutions"][0]
        assert stored["choice"] == 1
        assert stored["meaning"] == q["senses"][1]["meaning"]

    def test_out_of_range_sense_rejected(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": q["question_id"],
                "version": 0,
                "payload": {"kind": "resolve", "choice": 9},
            },
        )
        assert r.status_code == 422

    def test_evaluate_without_graph_rejected(self, client):
        sid = client.post("/sessions", json={}).json()["id"]
        assert client.post(f"/sessions/{sid}/evaluate").status_code == 422

    def test_unknown_quantifier_surfaces_on_evaluate(self, client):
        sid = client.post(
            "/sessions", json={"graph": _worked_graph(quantifier="zillions")}
        ).json()["id"]
        r = client.post(f"/sessions/{sid}/evaluate")
        assert r.status_code == 422
        assert "zillions" in r.json()["detail"]


class TestConcurrency:
    def test_stale_version_rejected(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        payload = {"kind": "resolve", "choice": 0}
        ok = client.post(
            f"/sessions/{sid}/answers",
            json={"question_id": q["question_id"], "version": 0, "payload": payload},
        )
        assert ok.status_code == 200
        stale = client.post(
            f"/sessions/{sid}/answers",
            json={"question_id": q["question_id"], "version": 0, "payload": payload},
        )
        assert stale.status_code == 409

    def test_stale_question_id_rejected(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": "amb:w9",
                "version": 0,
                "payload": {"kind": "resolve", "choice": 0},
            },
        )
        assert r.status_code == 409

    def test_version_increments_on_every_mutation(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        v0 = client.get(f"/sessions/{sid}").json()["version"]
        client.post(f"/sessions/{sid}/evaluate")  # pending: still a mutation
        v1 = client.get(f"/sessions/{sid}").json()["version"]
        assert v1 == v0 + 1


class TestReviewLoop:
    def test_disagree_then_revise_then_higher_evaluation(self, client):
        sid = client.post(
            "/sessions", json={"graph": _worked_graph(qualifier="L4", quantifier="often")}
        ).json()["id"]
        body = client.post(f"/sessions/{sid}/evaluate").json()
        assert body["status"] == "evaluated"
        first_median = (
            body["evaluation"]["claim_credibility"]["b"]
            + body["evaluation"]["claim_credibility"]["c"]
        ) / 2.0
        assert body["comparison"] is not None and not body["comparison"]["agree"]
        version = body["session"]["version"]

        q = client.get(f"/sessions/{sid}/question").json()["question"]
        assert q["kind"] == "review"
        assert q["comparison"]["subjective"] == "L4"

        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": "review",
                "version": version,
                "payload": {"kind": "review", "decision": "revise"},
            },
        )
        assert r.json()["session"]["phase"] == "revising"
        version = r.json()["session"]["version"]

        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "version": version,
                "payload": {
                    "kind": "revise-ground",
                    "ground_ref": "g1",
                    "credibility": _trap(1.0),
                },
            },
        )
        assert r.status_code == 200
        assert r.json()["session"]["phase"] == "revising"
        assert r.json()["session"]["evaluation"] is None

        body = client.post(f"/sessions/{sid}/evaluate").json()
        second_median = (
            body["evaluation"]["claim_credibility"]["b"]
            + body["evaluation"]["claim_credibility"]["c"]
        ) / 2.0
        assert second_median > first_median

    def test_review_agree_ends_loop(self, client):
        sid = client.post(
            "/sessions", json={"graph": _worked_graph(qualifier="L4", quantifier="often")}
        ).json()["id"]
        body = client.post(f"/sessions/{sid}/evaluate").json()
        version = body["session"]["version"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": "review",
                "version": version,
                "payload": {"kind": "review", "decision": "agree"},
            },
        )
        assert r.json()["session"]["phase"] == "agreed"
        assert r.json()["question"] is None

    def test_matching_subjective_label_auto_agrees(self, client):
        graph = {
            "claim": "c",
            "qualifier": "L3",
            "grounds": [
                {"ref": "g1", "credibility": _trap(0.4, 0.45, 0.55, 0.6)}
            ],
            "warrants": [{"ref": "w1", "grounds": ["g1"], "quantifier": _trap(1.0)}],
        }
        sid = client.post("/sessions", json={"graph": graph}).json()["id"]
        body = client.post(f"/sessions/{sid}/evaluate").json()
        assert body["comparison"]["agree"]
        assert body["session"]["phase"] == "agreed"
        assert client.get(f"/sessions/{sid}/question").json()["question"] is None

    def test_set_graph_drops_stale_resolutions(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "question_id": q["question_id"],
                "version": 0,
                "payload": {"kind": "resolve", "choice": 0},
            },
        )
        version = r.json()["session"]["version"]
        new_graph = _worked_graph()
        new_graph["warrants"][0]["ref"] = "w-new"
        new_graph["backings"][0]["warrant"] = "w-new"
        r = client.post(
            f"/sessions/{sid}/answers",
            json={"version": version, "payload": {"kind": "set-graph", "graph": new_graph}},
        )
        assert r.status_code == 200
        assert r.json()["session"]["resolutions"] == []
        assert r.json()["question"]["warrant"] == "w-new"

    def test_revise_unknown_ground_rejected(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={
                "version": 0,
                "payload": {
                    "kind": "revise-ground",
                    "ground_ref": "g9",
                    "credibility": _trap(1.0),
                },
            },
        )
        assert r.status_code == 422


class TestElicitationSessions:
    TRUTH = {
        "low": UnitFuzzyNumber(0.2, 0.3, 0.4, 0.5),
        "high": UnitFuzzyNumber(0.6, 0.7, 0.8, 0.9),
    }

    def _drive(self, store, sid, responder, reload_every=None):
        version = handlers.load_session(store, sid)["version"]
        steps = 0
        while True:
            if reload_every and steps % reload_every == 0:
                store = DataStore(store.root)  # simulate restart
            question = handlers.next_question(store, sid)
            if question is None:
                break
            accept = responder.respond(
                question["label"], question["stimulus"], question["key"], question["trial"]
            )
            state = handlers.answer(
                store,
                sid,
                {
                    "question_id": question["question_id"],
                    "version": version,
                    "payload": {"kind": "respond", "accept": accept},
                },
            )
            version = state["version"]
            steps += 1
        return handlers.load_session(store, sid)

    def test_driven_session_matches_batch_elicitation(self, tmp_path):
        store = DataStore(tmp_path)
        responder = SimulatedResponder(self.TRUTH, rng_seed=11)
        state = handlers.create_session(
            store,
            {
                "mode": "elicitation",
                "labels": ["low", "high"],
                "owner": "alice",
                "trials": 40,
                "pilot_reps": 2,
            },
        )
        final = self._drive(store, state["id"], responder, reload_every=17)
        assert final["phase"] == "completed"
        batch = elicit_lexicon(
            responder, ["low", "high"], owner="alice", trials=40, pilot_reps=2
        )
        assert final["lexicon_result"] == batch.to_dict()
        assert store.lexicons.load("alice") == batch.to_dict()

    def test_elicitation_needs_two_labels(self, client):
        r = client.post("/sessions", json={"mode": "elicitation", "labels": ["only"]})
        assert r.status_code == 422

    def test_respond_on_argument_session_rejected(self, client):
        sid = client.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        r = client.post(
            f"/sessions/{sid}/answers",
            json={"version": 0, "payload": {"kind": "respond", "accept": True}},
        )
        assert r.status_code == 422


class TestPersistence:
    def test_restart_between_calls_preserves_state_bit_exactly(self, tmp_path):
        store = DataStore(tmp_path)
        state = handlers.create_session(store, {"graph": _worked_graph(qualifier="L4")})
        sid = state["id"]
        handlers.evaluate_session(store, sid)  # pending-ambiguity mutation
        raw_before = (tmp_path / "sessions" / f"{sid}.json").read_bytes()

        restarted = DataStore(tmp_path)
        reloaded = handlers.load_session(restarted, sid)
        assert reloaded == json.loads(raw_before)
        restarted.sessions.save(sid, reloaded)
        raw_after = (tmp_path / "sessions" / f"{sid}.json").read_bytes()
        assert raw_after == raw_before

    def test_restarted_app_serves_identical_views(self, tmp_path):
        client_a = TestClient(create_app(str(tmp_path)))
        sid = client_a.post("/sessions", json={"graph": _worked_graph()}).json()["id"]
        client_a.post(f"/sessions/{sid}/evaluate")
        client_b = TestClient(create_app(str(tmp_path)))
        assert client_a.get(f"/sessions/{sid}").json() == client_b.get(f"/sessions/{sid}").json()


class TestLexiconEndpoints:
    def test_put_then_get_round_trip(self, client):
        labels = [
            {"name": "lo", "meaning": _trap(0.1, 0.2, 0.3, 0.4)},
            {"name": "hi", "meaning": _trap(0.5, 0.6, 0.7, 0.8)},
        ]
        r = client.put("/lexicons/bob", json={"labels": labels})
        assert r.status_code == 200
        assert r.json()["owner"] == "bob"
        assert client.get("/lexicons/bob").json() == r.json()

    def test_get_missing_404(self, client):
        assert client.get("/lexicons/nobody").status_code == 404

    def test_put_invalid_lexicon_rejected(self, client):
        r = client.put(
            "/lexicons/bob", json={"labels": [{"name": "only", "meaning": _trap(0.5)}]}
        )
        assert r.status_code == 422


class TestPooling:
    def test_overlap_and_admissibility(self, client):
        body = {
            "kb1": {"expert": "e1", "grounds": {g: _trap(0.5) for g in ("g1", "g2", "g3")}},
            "kb2": {
                "expert": "e2",
                "grounds": {g: _trap(0.5) for g in ("g2", "g3", "g4", "g5")},
            },
        }
        r = client.post("/pooling/check", json=body)
        assert r.status_code == 200
        assert r.json()["admissible"] is True
        assert r.json()["overlap"] == pytest.approx(2.0 / 3.0)

    def test_disjoint_not_admissible(self, client):
        body = {
            "kb1": {"grounds": {"g1": _trap(0.5)}},
            "kb2": {"grounds": {"g2": _trap(0.5)}},
            "theta": 0.1,
        }
        r = client.post("/pooling/check", json=body)
        assert r.json()["admissible"] is False
        assert r.json()["overlap"] == 0.0

    def test_empty_base_rejected(self, client):
        r = client.post(
            "/pooling/check",
            json={"kb1": {"grounds": {}}, "kb2": {"grounds": {"g1": _trap(0.5)}}},
        )
        assert r.status_code == 422

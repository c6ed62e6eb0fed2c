import json

import httpx
import pytest
from fastapi.testclient import TestClient
from jsonschema import validate

from afc_adapter.serving import create_app

from conftest import SCHEMA_PATH


@pytest.fixture(scope="module")
def schema():
    return json.loads(SCHEMA_PATH.read_text())


@pytest.fixture(scope="module")
def client(checkpoint):
    return TestClient(create_app(checkpoint))


def score(client, claim, evidence=(), condition="claim_only"):
    return client.post(
        "/v1/score",
        json={"claim": claim, "evidence": list(evidence), "condition": condition},
    )


class TestScoreConformance:
    def test_response_validates_against_protocol_schema(self, client, schema):
        resp = score(client, "The plant delivers forty megawatts.")
        assert resp.status_code == 200
        validate(resp.json(), schema["$defs"]["score_response"])

    def test_p_true_in_range(self, client):
        for claim in ("alpha", "beta beta", "gamma gamma gamma"):
            body = score(client, claim).json()
            assert 0.0 <= body["p_true"] <= 1.0

    def test_repeated_requests_agree(self, client):
        payload = {
            "claim": "The tr plant 3 delivers forty megawatts.",
            "evidence": ["The tr plant 3 delivers forty megawatts of power."],
            "condition": "gold_evidence",
        }
        first = client.post("/v1/score", json=payload).json()["p_true"]
        for _ in range(5):
            again = client.post("/v1/score", json=payload).json()["p_true"]
            assert abs(again - first) <= 1e-6

    def test_claim_only_ignores_evidence_field(self, client):
        with_evidence = score(client, "same claim", evidence=["unused"], condition="claim_only")
        without = score(client, "same claim", condition="claim_only")
        assert with_evidence.json()["p_true"] == without.json()["p_true"]

    def test_gold_evidence_changes_input(self, client):
        claim_only = score(client, "same claim", condition="claim_only").json()["p_true"]
        gold = score(
            client, "same claim", evidence=["extra context"], condition="gold_evidence"
        ).json()["p_true"]
        assert claim_only != gold

    def test_unknown_condition_rejected(self, client):
        assert score(client, "x", condition="sideways").status_code == 400

    def test_truncation_flagged(self, client):
        long_evidence = ["word " * 500]
        body = score(client, "short claim", long_evidence, "gold_evidence").json()
        assert body["truncated"] is True


class TestBatch:
    def test_order_aligned_and_valid(self, client, schema):
        claims = [f"claim number {i}" for i in range(6)]
        resp = client.post(
            "/v1/score_batch",
            json={
                "claims": claims,
                "evidence": [[] for _ in claims],
                "conditions": ["claim_only"] * len(claims),
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        validate(body, schema["$defs"]["score_batch_response"])
        assert len(body["p_true"]) == len(claims)
        singles = [score(client, c).json()["p_true"] for c in claims]
        assert body["p_true"] == singles

    def test_length_mismatch_rejected(self, client):
        resp = client.post(
            "/v1/score_batch",
            json={"claims": ["a"], "evidence": [], "conditions": ["claim_only"]},
        )
        assert resp.status_code == 400


class TestChatProxy:
    def test_canned_mode_answers_rewrite_prompts(self, client):
        prompt = 'Rewrite the claim.\nCLAIM: "The dam rises 85 meters."\nOutput ONLY the text.'
        resp = client.post(
            "/v1/chat/completions",
            json={"model": "m", "messages": [{"role": "user", "content": prompt}]},
        )
        assert resp.status_code == 200
        content = resp.json()["choices"][0]["message"]["content"]
        assert "The dam rises 85 meters." in content

    def test_forward_mode_proxies(self, checkpoint, monkeypatch):
        captured = {}

        def fake_post(url, json=None, timeout=None):
            captured["url"] = url
            captured["body"] = json
            return httpx.Response(
                200,
                json={"choices": [{"message": {"role": "assistant", "content": "backend says"}}]},
                request=httpx.Request("POST", url),
            )

        monkeypatch.setattr(httpx, "post", fake_post)
        app = create_app(checkpoint, generator_backend={"mode": "forward", "url": "http://llm"})
        proxy = TestClient(app)
        resp = proxy.post(
            "/v1/chat/completions",
            json={"model": "m", "messages": [{"role": "user", "content": "hi"}]},
        )
        assert resp.json()["choices"][0]["message"]["content"] == "backend says"
        assert captured["url"] == "http://llm/v1/chat/completions"
        assert captured["body"]["messages"][0]["content"] == "hi"

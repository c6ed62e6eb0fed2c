import json

import httpx
import pytest

from claimattack.scoring import (
    CachingScorer,
    EndpointError,
    HttpScoreClient,
    ProtocolViolation,
    ScoreCache,
    ScoringError,
    StubScorer,
    StubScorerSpec,
    VerdictRequest,
    VerdictResponse,
    assemble_request,
    cache_key,
    score_many,
    stub_score,
)

from conftest import make_claim, snippet


class TestAssemble:
    def test_claim_only_has_no_evidence(self):
        claim = make_claim(evidence=[snippet()])
        req = assemble_request(claim, "claim_only")
        assert req.evidence == ()
        assert req.claim == claim.text

    def test_gold_evidence_order(self):
        claim = make_claim(
            evidence=[snippet(content="First."), snippet(element="s1", content="Second.")]
        )
        req = assemble_request(claim, "gold_evidence")
        assert req.evidence == ("First.", "Second.")

    def test_structured_composition(self):
        claim = make_claim(
            evidence=[
                snippet(content="Mira Solen is a singer."),
                snippet(
                    page="Glass Harbor",
                    element="Glass Harbor_cell_0_1_1",
                    content="Glass Harbor : Oriel Albums Chart : Peak : 4",
                    kind="table_cell",
                ),
            ]
        )
        req = assemble_request(claim, "gold_evidence")
        assert req.evidence[1] == "Glass Harbor : Oriel Albums Chart : Peak : 4"

    def test_variant_text_override(self):
        claim = make_claim(evidence=[snippet()])
        req = assemble_request(claim, "gold_evidence", text="Rewritten claim.")
        assert req.claim == "Rewritten claim."
        assert req.evidence == (snippet().content,)

    def test_unresolved_skipped_and_empty_errors(self):
        claim = make_claim(evidence=[snippet(unresolved=True, content="")])
        with pytest.raises(ScoringError):
            assemble_request(claim, "gold_evidence")

    def test_condition_invariant(self):
        with pytest.raises(ScoringError):
            VerdictRequest(claim="x", evidence=("e",), condition="claim_only")


class TestStubs:
    def test_overlap_full_cover(self):
        req = VerdictRequest(claim="a b", evidence=("a b c",), condition="gold_evidence")
        assert stub_score(req, StubScorerSpec(mode="overlap")).p_true == 1.0

    def test_overlap_claim_only_default(self):
        req = VerdictRequest(claim="a b", evidence=(), condition="claim_only")
        assert stub_score(req, StubScorerSpec(mode="overlap")).p_true == 0.5

    def test_overlap_half(self):
        req = VerdictRequest(claim="a b c d", evidence=("a b x",), condition="gold_evidence")
        assert stub_score(req, StubScorerSpec(mode="overlap")).p_true == 0.5

    def test_constant_and_keyed(self):
        req = VerdictRequest(claim="k", evidence=(), condition="claim_only")
        assert stub_score(req, StubScorerSpec(mode="constant", constant_p=0.7)).p_true == 0.7
        keyed = StubScorerSpec(mode="keyed", keyed={"k": 0.9})
        assert stub_score(req, keyed).p_true == 0.9
        other = VerdictRequest(claim="other", evidence=(), condition="claim_only")
        assert stub_score(other, keyed).p_true == 0.5

    def test_spec_parse(self, tmp_path):
        assert StubScorerSpec.parse("overlap").mode == "overlap"
        assert StubScorerSpec.parse("constant:0.25").constant_p == 0.25
        keyed_file = tmp_path / "k.json"
        keyed_file.write_text(json.dumps({"a": 0.1}))
        assert StubScorerSpec.parse(f"keyed:{keyed_file}").keyed == {"a": 0.1}
        with pytest.raises(ScoringError):
            StubScorerSpec.parse("bogus")

    def test_out_of_range_rejected(self):
        with pytest.raises(ScoringError):
            StubScorerSpec(mode="constant", constant_p=1.5)


def transport_returning(handler):
    return httpx.MockTransport(handler)


class TestHttpClient:
    def test_passthrough(self):
        def handler(request):
            assert request.url.path == "/v1/score"
            body = json.loads(request.content)
            assert set(body) == {"claim", "evidence", "condition"}
            return httpx.Response(200, json={"p_true": 0.73, "model_id": "m"})

        client = HttpScoreClient("http://test", transport=transport_returning(handler))
        resp = client.score(VerdictRequest(claim="c", evidence=(), condition="claim_only"))
        assert resp.p_true == 0.73

    def test_out_of_range_is_protocol_violation(self):
        def handler(request):
            return httpx.Response(200, json={"p_true": 1.7, "model_id": "m"})

        client = HttpScoreClient("http://test", transport=transport_returning(handler))
        with pytest.raises(ProtocolViolation):
            client.score(VerdictRequest(claim="c", evidence=(), condition="claim_only"))

    def test_batch_order_preserved(self):
        def handler(request):
            body = json.loads(request.content)
            n = len(body["claims"])
            return httpx.Response(
                200,
                json={"p_true": [i / 100 for i in range(n)], "model_id": ["m"] * n},
            )

        client = HttpScoreClient("http://test", transport=transport_returning(handler))
        reqs = [
            VerdictRequest(claim=f"claim {i}", evidence=(), condition="claim_only")
            for i in range(100)
        ]
        out = client.score_batch(reqs)
        assert len(out) == 100
        assert [r.p_true for r in out] == [i / 100 for i in range(100)]

    def test_retry_then_success(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] <= 2:
                return httpx.Response(503)
            return httpx.Response(200, json={"p_true": 0.4, "model_id": "m"})

        client = HttpScoreClient(
            "http://test", max_retries=3, backoff_base=0.0, transport=transport_returning(handler)
        )
        resp = client.score(VerdictRequest(claim="c", evidence=(), condition="claim_only"))
        assert resp.p_true == 0.4
        assert calls["n"] == 3

    def test_exhausted_retries_surface(self):
        def handler(request):
            return httpx.Response(500)

        client = HttpScoreClient(
            "http://test", max_retries=2, backoff_base=0.0, transport=transport_returning(handler)
        )
        with pytest.raises(EndpointError):
            client.score(VerdictRequest(claim="c", evidence=(), condition="claim_only"))


class TestCache:
    def test_hit_never_recontacts(self, tmp_path):
        calls = {"n": 0}

        class Counting:
            def score(self, request):
                calls["n"] += 1
                return VerdictResponse(p_true=0.6, model_id="m")

        cache = ScoreCache(tmp_path / "cache.jsonl")
        scorer = CachingScorer(Counting(), cache, "m")
        req = VerdictRequest(claim="c", evidence=("e",), condition="gold_evidence")
        first = scorer.score(req)
        second = scorer.score(req)
        assert calls["n"] == 1
        assert first == second

    def test_warm_cache_reload(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = ScoreCache(path)
        req = VerdictRequest(claim="c", evidence=(), condition="claim_only")
        key = cache_key(req, "m")
        cache.put(key, 0.31)
        warm = ScoreCache(path)
        assert warm.get(key) == 0.31

        class Boom:
            def score(self, request):
                raise AssertionError("cache should have answered")

        scorer = CachingScorer(Boom(), warm, "m")
        assert scorer.score(req).p_true == 0.31

    def test_label_pins_model_identity_cold_and_warm(self, tmp_path):
        class EchoesOwnName:
            def score(self, request):
                return VerdictResponse(p_true=0.2, model_id="server-v7")

        cache = ScoreCache(tmp_path / "cache.jsonl")
        scorer = CachingScorer(EchoesOwnName(), cache, "configured-label")
        req = VerdictRequest(claim="c", evidence=(), condition="claim_only")
        cold = scorer.score(req)
        warm = scorer.score(req)
        assert cold.model_id == warm.model_id == "configured-label"

    def test_key_distinguishes_condition_and_model(self):
        req_a = VerdictRequest(claim="c", evidence=(), condition="claim_only")
        req_b = VerdictRequest(claim="c", evidence=("e",), condition="gold_evidence")
        assert cache_key(req_a, "m") != cache_key(req_b, "m")
        assert cache_key(req_a, "m") != cache_key(req_a, "other")


class TestScoreMany:
    def test_parallel_preserves_order(self):
        scorer = StubScorer(StubScorerSpec(mode="keyed", keyed={f"c{i}": i / 10 for i in range(8)}))
        reqs = [VerdictRequest(claim=f"c{i}", evidence=(), condition="claim_only") for i in range(8)]
        out = score_many(scorer, reqs, parallelism=4)
        assert [r.p_true for r in out] == [i / 10 for i in range(8)]

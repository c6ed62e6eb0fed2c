import json

import httpx
import pytest

from claimattack.generation import (
    Completion,
    GeneratorConfig,
    GenerationError,
    HttpChatClient,
    MockChatClient,
    SanitationError,
    VariantRecord,
    generate_paraphrases,
    generate_variants,
    sanitize_output,
    validate_constraints,
)
from claimattack.taxonomy import by_key, included_techniques

from conftest import make_claim


class TestSanitize:
    def test_deny_list_prefix(self):
        text, fired = sanitize_output('Here is the rewritten claim: "X is Y."')
        assert text == "X is Y."
        assert fired

    def test_identity(self):
        text, fired = sanitize_output("X is Y.")
        assert text == "X is Y."
        assert not fired

    def test_newlines_collapse(self):
        text, _ = sanitize_output('"A\nB"')
        assert text == "A B"

    def test_curly_quotes(self):
        text, _ = sanitize_output("“Quoted claim.”")
        assert text == "Quoted claim."

    def test_idempotent_on_nested_wrappers(self):
        samples = [
            'Output: "Rewritten claim: \'X.\'"',
            "  ''double''  ",
            "Here is the rewritten claim:\n\"A\nB\"",
            "plain text",
        ]
        for raw in samples:
            once, _ = sanitize_output(raw)
            twice, fired = sanitize_output(once)
            assert twice == once
            assert not fired

    def test_internal_quotes_untouched(self):
        text, fired = sanitize_output('The mayor said "no" yesterday.')
        assert text == 'The mayor said "no" yesterday.'
        assert not fired

    def test_empty_after_stripping_signals(self):
        with pytest.raises(SanitationError):
            sanitize_output('""')


class TestConstraints:
    def test_center_of_band(self):
        flags, ratio = validate_constraints("12345678", "87654321")
        assert ratio == 1.0
        assert flags == ()

    def test_out_of_band(self):
        flags, ratio = validate_constraints("1234", "123456")
        assert ratio == 1.5
        assert "length_violation" in flags

    def test_multi_sentence(self):
        flags, _ = validate_constraints("A. B.", "A. B.")
        assert "multi_sentence" in flags

    def test_single_sentence_with_bang_run(self):
        flags, _ = validate_constraints("What a claim?!", "What a claim?!")
        assert "multi_sentence" not in flags

    def test_band_edges_inclusive(self):
        flags, _ = validate_constraints("12345", "1234")  # ratio 0.8
        assert "length_violation" not in flags
        flags, _ = validate_constraints("12345", "123456")  # ratio 1.2
        assert "length_violation" not in flags


class FixedClient:
    def __init__(self, text="Fixed rewrite."):
        self.text = text

    def complete(self, prompt):
        return Completion(text=self.text)


class FailingClient:
    def complete(self, prompt):
        raise GenerationError("down", retries=3)


class TestGenerateVariants:
    def test_full_cardinality(self, taxonomy, templates):
        claim = make_claim()
        included = included_techniques(taxonomy)
        result = generate_variants(claim, included, MockChatClient(), templates)
        assert len(result.variants) == 15
        assert all(not r.failed for r in result.variants.values())

    def test_fixed_mock_passthrough(self, taxonomy, templates):
        claim = make_claim()
        result = generate_variants(claim, taxonomy[:3], FixedClient("Canned text."), templates)
        assert all(r.text == "Canned text." for r in result.variants.values())

    def test_failures_recorded_not_dropped(self, taxonomy, templates):
        claim = make_claim()
        result = generate_variants(claim, taxonomy[:4], FailingClient(), templates)
        assert len(result.variants) == 4
        assert all(r.failed and r.retries == 3 for r in result.variants.values())

    def test_parallel_merge_deterministic(self, taxonomy, templates):
        claim = make_claim()
        serial = generate_variants(claim, taxonomy, MockChatClient(), templates, parallelism=1)
        parallel = generate_variants(claim, taxonomy, MockChatClient(), templates, parallelism=8)
        assert serial.variants == parallel.variants

    def test_mock_is_pure(self, taxonomy, templates):
        claim = make_claim(text="The Tessio River flows 120 kilometers.")
        one = generate_variants(claim, taxonomy, MockChatClient(), templates)
        two = generate_variants(claim, taxonomy, MockChatClient(), templates)
        assert one.variants == two.variants

    def test_variant_record_invariants(self):
        with pytest.raises(ValueError):
            VariantRecord(claim_id="c", attack_kind="persuasion", text="", length_ratio=1.0)
        with pytest.raises(ValueError):
            VariantRecord(claim_id="c", attack_kind="persuasion", text="x", length_ratio=0.0)


class TestParaphrase:
    def test_three_claims_three_records(self, templates):
        claims = [make_claim(claim_id=f"c{i}", text=f"Claim number {i} stands.") for i in range(3)]
        records = generate_paraphrases(claims, MockChatClient(), templates)
        assert len(records) == 3
        assert all(r.attack_kind == "paraphrase" and not r.failed for r in records)

    def test_failing_client_marks_all(self, templates):
        claims = [make_claim(claim_id=f"c{i}") for i in range(3)]
        records = generate_paraphrases(claims, FailingClient(), templates)
        assert len(records) == 3
        assert all(r.failed for r in records)


class TestHttpChatClient:
    def make_client(self, handler, max_retries=3):
        cfg = GeneratorConfig(
            endpoint_url="http://gen", mode="http", max_retries=max_retries, backoff_base=0.0
        )
        return HttpChatClient(cfg, transport=httpx.MockTransport(handler))

    def test_wire_shape_and_response(self):
        def handler(request):
            assert request.url.path == "/v1/chat/completions"
            body = json.loads(request.content)
            assert body["messages"][0]["role"] == "user"
            assert {"model", "messages", "temperature", "max_tokens"} <= set(body)
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "Rewritten."}}]}
            )

        completion = self.make_client(handler).complete("prompt")
        assert completion.text == "Rewritten."
        assert completion.retries == 0

    def test_fail_twice_then_succeed_records_retries(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] <= 2:
                return httpx.Response(500)
            return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

        completion = self.make_client(handler, max_retries=3).complete("prompt")
        assert completion.text == "ok"
        assert completion.retries == 2

    def test_exhaustion_raises_with_retry_count(self):
        def handler(request):
            return httpx.Response(503)

        with pytest.raises(GenerationError) as err:
            self.make_client(handler, max_retries=2).complete("prompt")
        assert err.value.retries == 2

    def test_generator_config_validation(self):
        with pytest.raises(ValueError):
            GeneratorConfig(parallelism=0)
        with pytest.raises(ValueError):
            GeneratorConfig(max_retries=-1)

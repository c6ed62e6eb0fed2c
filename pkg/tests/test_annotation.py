import pytest
from fastapi.testclient import TestClient

from claimattack.annotation import (
    TechniqueValidationStats,
    ValidationItem,
    VerdictAnnotation,
    aggregate_rates,
    apply_exclusion,
    create_app,
    sample_validation_set,
    save_validation_items,
    stats_csv,
)

from conftest import make_claim, snippet


def build_store(technique_keys, claims_per_stratum=12):
    """Synthetic variant store + claims covering 2 datasets x 2 labels."""
    claims = {}
    variants = []
    counter = 0
    for dataset in ("fever", "feverous"):
        for label in (True, False):
            for i in range(claims_per_stratum):
                cid = f"{dataset[:2]}{'t' if label else 'f'}{i}"
                claims[(dataset, cid)] = make_claim(
                    claim_id=cid,
                    text=f"Original claim {counter}.",
                    label=label,
                    dataset=dataset,
                    evidence=[snippet(content=f"Evidence for {cid}.")],
                )
                counter += 1
                for tech in technique_keys:
                    variants.append(
                        {
                            "claim_id": cid,
                            "dataset": dataset,
                            "attack_kind": "persuasion",
                            "technique_key": tech,
                            "text": f"Rewrite {tech} {cid}.",
                        }
                    )
    return variants, claims


class TestSampling:
    def test_default_sample_size_690(self, taxonomy):
        keys = [t.key for t in taxonomy]
        variants, claims = build_store(keys, claims_per_stratum=12)
        items, shortfalls = sample_validation_set(
            variants, claims, n_per_technique=30, seed=7, technique_keys=keys
        )
        assert len(items) == 23 * 30 == 690
        assert shortfalls == []
        assert {i.item_id for i in items} == set(range(1, 691))

    def test_stratum_quotas_split_evenly(self, taxonomy):
        keys = [t.key for t in taxonomy][:1]
        variants, claims = build_store(keys)
        items, _ = sample_validation_set(
            variants, claims, n_per_technique=30, seed=7, technique_keys=keys
        )
        by_stratum = {}
        for item in items:
            by_stratum[(item.dataset, item.hidden_gold_label)] = (
                by_stratum.get((item.dataset, item.hidden_gold_label), 0) + 1
            )
        # 30 over 4 strata: 7 base, remainder 2 -> counts in {7, 8}, sum 30
        assert sum(by_stratum.values()) == 30
        assert set(by_stratum.values()) <= {7, 8}
        assert sorted(by_stratum.values()).count(8) == 2

    def test_n2_quota_example(self):
        keys = ["obfuscation"]
        variants, claims = build_store(keys)
        items, _ = sample_validation_set(
            variants, claims, n_per_technique=2, seed=5, technique_keys=keys
        )
        # quotas {1,1,0,0} resolved by seeded draw: two distinct strata
        strata = {(i.dataset, i.hidden_gold_label) for i in items}
        assert len(items) == 2
        assert len(strata) == 2

    def test_seed_reproducible(self, taxonomy):
        keys = [t.key for t in taxonomy]
        variants, claims = build_store(keys)
        a, _ = sample_validation_set(variants, claims, 30, seed=9, technique_keys=keys)
        b, _ = sample_validation_set(variants, claims, 30, seed=9, technique_keys=keys)
        assert [(i.item_id, i.claim_id, i.technique_key) for i in a] == [
            (i.item_id, i.claim_id, i.technique_key) for i in b
        ]

    def test_shortfall_reported_and_continues(self):
        keys = ["obfuscation", "slogan"]
        variants, claims = build_store(["obfuscation"], claims_per_stratum=2)
        items, shortfalls = sample_validation_set(
            variants, claims, n_per_technique=30, seed=1, technique_keys=keys
        )
        assert any("slogan" in s for s in shortfalls)
        assert any("obfuscation" in s for s in shortfalls)  # strata smaller than quota
        assert items  # sampling still produced what exists


class TestAggregation:
    def make_items(self, n, technique="repetition", gold=True):
        return {
            i: ValidationItem(
                item_id=i,
                text=f"v{i}",
                evidence=("e",),
                technique_key=technique,
                dataset="fever",
                hidden_gold_label=gold,
                claim_id=f"c{i}",
            )
            for i in range(1, n + 1)
        }

    def annotate(self, items, verdicts):
        return [
            VerdictAnnotation(item_id=i, verdict=v, annotator_id="a", timestamp=float(i))
            for i, v in zip(sorted(items), verdicts)
        ]

    def test_29_of_30_preservation(self):
        items = self.make_items(30)
        verdicts = ["True"] * 29 + ["False"]
        (stats,) = aggregate_rates(self.annotate(items, verdicts), items)
        assert round(100 * stats.preservation, 2) == 96.67
        assert round(100 * stats.flip, 2) == 3.33
        assert stats.ambiguity == 0.0

    def test_24_2_4_split(self):
        items = self.make_items(30)
        verdicts = ["True"] * 24 + ["False"] * 2 + ["NEI"] * 4
        (stats,) = aggregate_rates(self.annotate(items, verdicts), items)
        assert round(100 * stats.preservation, 2) == 80.00
        assert round(100 * stats.flip, 2) == 6.67
        assert round(100 * stats.ambiguity, 2) == 13.33

    def test_all_nei(self):
        items = self.make_items(10)
        (stats,) = aggregate_rates(self.annotate(items, ["NEI"] * 10), items)
        assert stats.ambiguity == 1.0
        assert stats.preservation == 0.0

    def test_rates_sum_to_one(self):
        import random

        rng = random.Random(3)
        items = self.make_items(30)
        verdicts = [rng.choice(["True", "False", "NEI"]) for _ in items]
        (stats,) = aggregate_rates(self.annotate(items, verdicts), items)
        assert stats.preservation + stats.flip + stats.ambiguity == pytest.approx(1.0, abs=1e-9)

    def test_nei_never_counts_as_flip(self):
        items = self.make_items(2, gold=False)
        annotations = self.annotate(items, ["NEI", "True"])
        (stats,) = aggregate_rates(annotations, items)
        assert stats.n_flip == 1  # only the binary opposite counts
        assert stats.n_ambiguous == 1

    def test_last_write_wins(self):
        items = self.make_items(1)
        annotations = [
            VerdictAnnotation(item_id=1, verdict="False", annotator_id="a", timestamp=1.0),
            VerdictAnnotation(item_id=1, verdict="True", annotator_id="a", timestamp=2.0),
        ]
        (stats,) = aggregate_rates(annotations, items)
        assert stats.n_preserve == 1 and stats.n == 1


class TestExclusion:
    def make_stats(self, preserve, n):
        return TechniqueValidationStats(
            technique_key="x", n=n, n_preserve=preserve, n_flip=0, n_ambiguous=n - preserve
        )

    def test_exactly_80_percent_excluded(self):
        assert apply_exclusion([self.make_stats(24, 30)])["x"] == "excluded"

    def test_just_above_included(self):
        # 80.01% as an exact count ratio
        assert apply_exclusion([self.make_stats(8001, 10000)])["x"] == "included"

    def test_9667_included(self):
        assert apply_exclusion([self.make_stats(29, 30)])["x"] == "included"

    def test_stats_invariant_enforced(self):
        with pytest.raises(Exception):
            TechniqueValidationStats(
                technique_key="x", n=30, n_preserve=10, n_flip=10, n_ambiguous=5
            )


@pytest.fixture()
def service(tmp_path, taxonomy):
    keys = [t.key for t in taxonomy][:2]
    variants, claims = build_store(keys, claims_per_stratum=2)
    items, _ = sample_validation_set(variants, claims, n_per_technique=4,
                                     seed=3, technique_keys=keys)
    items_path = tmp_path / "items.jsonl"
    save_validation_items(items, items_path)
    annotations_path = tmp_path / "annotations.jsonl"
    app = create_app(items_path, annotations_path)
    originals = [c.text for c in claims.values()]
    return TestClient(app), items, originals, annotations_path


class TestService:
    def test_next_is_lowest_pending_and_blind(self, service):
        client, items, originals, _ = service
        payload = client.get("/api/next?annotator=a").json()
        assert payload["item_id"] == 1
        assert set(payload) == {"item_id", "text", "evidence"}

    def test_verdict_flow_and_progress(self, service):
        client, items, _, _ = service
        total = len(items)
        first = client.get("/api/next").json()
        resp = client.post(
            "/api/verdict", json={"item_id": first["item_id"], "verdict": "NEI"}
        )
        assert resp.status_code == 200
        progress = client.get("/api/progress").json()
        assert progress["done"] == 1
        assert progress["pending"] == total - 1

    def test_double_submit_conflict(self, service):
        client, *_ = service
        item = client.get("/api/next").json()
        body = {"item_id": item["item_id"], "verdict": "True"}
        assert client.post("/api/verdict", json=body).status_code == 200
        assert client.post("/api/verdict", json=body).status_code == 409

    def test_revise_allowed_until_frozen(self, service):
        client, *_ = service
        item = client.get("/api/next").json()
        client.post("/api/verdict", json={"item_id": item["item_id"], "verdict": "True"})
        revise = {"item_id": item["item_id"], "verdict": "False", "revise": True}
        assert client.post("/api/verdict", json=revise).status_code == 200
        assert client.post("/api/freeze").json() == {"frozen": True}
        assert client.post("/api/verdict", json=revise).status_code == 409

    def test_unknown_item_and_bad_verdict(self, service):
        client, *_ = service
        assert client.post("/api/verdict", json={"item_id": 999, "verdict": "True"}).status_code == 404
        item = client.get("/api/next").json()
        bad = client.post("/api/verdict", json={"item_id": item["item_id"], "verdict": "Maybe"})
        assert bad.status_code == 400

    def test_blindness_byte_scan(self, service):
        client, items, originals, _ = service
        bodies = []
        while True:
            payload = client.get("/api/next").json()
            if payload["item_id"] is None:
                break
            bodies.append(client.get("/api/next").text)
            client.post("/api/verdict", json={"item_id": payload["item_id"], "verdict": "NEI"})
        bodies.append(client.get("/api/progress").text)
        blob = "\n".join(bodies)
        for original in originals:
            assert original not in blob
        assert "hidden_gold_label" not in blob

    def test_two_annotators_never_share_a_lease(self, service):
        client, *_ = service
        a = client.get("/api/next?annotator=a").json()
        b = client.get("/api/next?annotator=b").json()
        assert a["item_id"] != b["item_id"]
        # same annotator asking again gets their leased item back
        again = client.get("/api/next?annotator=a").json()
        assert again["item_id"] == a["item_id"]

    def test_resume_from_annotations_log(self, service, tmp_path):
        client, items, _, annotations_path = service
        item = client.get("/api/next").json()
        client.post("/api/verdict", json={"item_id": item["item_id"], "verdict": "True"})
        items_path = annotations_path.parent / "items.jsonl"
        reopened = TestClient(create_app(items_path, annotations_path))
        progress = reopened.get("/api/progress").json()
        assert progress["done"] == 1

    def test_export_csv(self, service):
        client, items, *_ = service
        while True:
            payload = client.get("/api/next").json()
            if payload["item_id"] is None:
                break
            client.post("/api/verdict", json={"item_id": payload["item_id"], "verdict": "True"})
        text = client.get("/api/export.csv").text
        assert text.splitlines()[0] == "technique,preservation,flip,ambiguity,n"
        assert len(text.splitlines()) >= 2


class TestStatsCsv:
    def test_two_decimal_percentages(self):
        stats = [
            TechniqueValidationStats(
                technique_key="repetition", n=30, n_preserve=29, n_flip=1, n_ambiguous=0
            )
        ]
        lines = stats_csv(stats).splitlines()
        assert lines[1] == "repetition,96.67,3.33,0.00,30"

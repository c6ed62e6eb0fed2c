import pytest

from claimattack.reports import (
    TIER_EFFECTIVE,
    TIER_NEUTRALISED,
    TIER_PARTIAL,
    assign_tier,
    build_reports,
)


class TestTier:
    def test_effective_in_both(self):
        assert assign_tier({"fever": 0.07, "feverous": 0.18}) == TIER_EFFECTIVE

    def test_partial_in_one(self):
        assert assign_tier({"fever": 0.11, "feverous": 0.04}) == TIER_PARTIAL

    def test_neutralised_in_none(self):
        assert assign_tier({"fever": 0.04, "feverous": 0.01}) == TIER_NEUTRALISED

    def test_threshold_inclusive(self):
        assert assign_tier({"a": 0.05, "b": 0.05}) == TIER_EFFECTIVE

    def test_missing_value_undeterminable(self):
        assert assign_tier({"fever": 0.2, "feverous": None}) is None
        assert assign_tier({}) is None


@pytest.fixture()
def evaluation(taxonomy):
    return {
        "datasets": ["fever"],
        "conditions": ["gold_evidence"],
        "classification": {
            "fever|gold_evidence|none": {
                "f1": 1.0, "auc": 1.0, "acc": 1.0, "delta_acc": None, "n": 4
            },
            "fever|gold_evidence|persuasion_blind": {
                "f1": 0.5, "auc": 0.8, "acc": 0.75, "delta_acc": -0.25, "n": 60
            },
        },
        "asr": {
            "fever|gold_evidence|blind_pooled": {"evasion": 0.25, "sabotage": None},
        },
        "technique_easr": {
            "fever|gold_evidence|obfuscation": 0.5,
            "fever|gold_evidence|slogan": 0.0,
        },
        "retrieval": {
            "fever|none": {"recall": {"3": 1.0, "5": 1.0}, "all_found": {"3": 1.0, "5": 1.0}, "n": 4},
            "fever|technique:obfuscation": {
                "recall": {"3": 0.5, "5": 0.75}, "all_found": {"3": 0.5, "5": 0.75}, "n": 4
            },
        },
        "provenance": {"experiment_id": "abc", "config_digest": "def"},
        "coverage": {"attack.failed_generations": 0},
    }


class TestBundle:
    def test_shapes_present(self, evaluation, taxonomy):
        bundle = build_reports(evaluation, taxonomy)
        files = bundle.files()
        assert set(files) == {
            "table1.csv",
            "table3_asr.csv",
            "table4_techniques.csv",
            "fig2_recall_at_k.csv",
            "fig3_retrieval_vs_classification.csv",
            "summary.txt",
        }

    def test_table1_baseline_delta_absent(self, evaluation, taxonomy):
        bundle = build_reports(evaluation, taxonomy)
        lines = bundle.files()["table1.csv"].splitlines()
        none_row = next(line for line in lines if ",none," in line)
        # delta column empty for the no-attack baseline
        assert none_row.split(",")[6] == ""

    def test_undefined_cells_stay_empty_never_fabricated(self, evaluation, taxonomy):
        bundle = build_reports(evaluation, taxonomy)
        asr_csv = bundle.files()["table3_asr.csv"].splitlines()
        row = next(line for line in asr_csv if "blind_pooled" in line)
        assert row.endswith(",")  # sabotage cell empty
        # attacks that never ran do not appear at all
        table1 = bundle.files()["table1.csv"]
        assert "word_swap" not in table1

    def test_technique_grid_and_tiers(self, evaluation, taxonomy):
        bundle = build_reports(evaluation, taxonomy)
        table4 = {row["technique"]: row for row in bundle.table4}
        # single-dataset evaluation: tier computed over the datasets present
        assert table4["Obfuscation"]["tier"] == TIER_EFFECTIVE
        assert table4["Slogan"]["tier"] == TIER_NEUTRALISED
        assert "Strawman" not in table4  # excluded techniques stay out

    def test_fig3_pairs(self, evaluation, taxonomy):
        bundle = build_reports(evaluation, taxonomy)
        rows = {r["technique"]: r for r in bundle.fig3}
        assert rows["Obfuscation"]["delta_recall_at_5_abs"] == pytest.approx(0.25)
        assert rows["Obfuscation"]["evasion_asr_gold"] == pytest.approx(0.5)

    def test_byte_deterministic(self, evaluation, taxonomy):
        a = build_reports(evaluation, taxonomy).files()
        b = build_reports(evaluation, taxonomy).files()
        assert a == b

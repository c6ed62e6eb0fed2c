import hashlib
import json
from pathlib import Path

import pytest

from claimattack.cli import main
from claimattack.config import load_config
from claimattack.pipeline import Experiment, bundle_digest

CONFIG_ARGS = ["--config", str(Path(__file__).resolve().parents[1] / "fixtures" / "experiment.yaml")]


def run(args, out):
    return main([*args, *CONFIG_ARGS, "--out", str(out), "--seed", "1234"])


def digest_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestStages:
    def test_stats_requires_ingest(self, tmp_path):
        assert run(["stats"], tmp_path / "o") == 2

    def test_ingest_then_stats(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run(["ingest"], out) == 0
        assert run(["stats"], out) == 0
        text = (out / "corpus" / "stats.txt").read_text()
        assert "fever.test.true_count 13" in text
        assert "feverous.test.true_count 14" in text

    def test_ingest_idempotent_bytes(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        first = digest_file(out / "corpus" / "claims.jsonl")
        run(["ingest"], out)
        assert digest_file(out / "corpus" / "claims.jsonl") == first

    def test_attack_twice_identical_store(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        assert run(["attack"], out) == 0
        first = digest_file(out / "variants.jsonl")
        assert run(["attack"], out) == 0
        assert digest_file(out / "variants.jsonl") == first

    def test_score_cold_vs_warm_identical_tables(self, tmp_path):
        out = tmp_path / "o"
        for stage in ("ingest", "index", "attack", "paraphrase"):
            assert run([stage], out) == 0
        assert run(["score"], out) == 0
        cold = digest_file(out / "scores.jsonl")
        assert (out / "score_cache.jsonl").exists()
        # warm: rerun score with the populated cache in place after
        # dropping the output store
        (out / "scores.jsonl").unlink()
        assert run(["score"], out) == 0
        assert digest_file(out / "scores.jsonl") == cold

    def test_stage_flag_dispatch(self, tmp_path):
        out = tmp_path / "o"
        assert main(["--stage", "ingest", *CONFIG_ARGS, "--out", str(out), "--seed", "1234"]) == 0
        assert (out / "corpus" / "claims.jsonl").exists()

    def test_dry_run_writes_nothing(self, tmp_path):
        out = tmp_path / "o"
        assert run(["ingest", "--dry-run"], out) == 0
        assert not out.exists()

    def test_validate_sample(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        run(["attack"], out)
        assert run(["validate-sample"], out) == 0
        items = [json.loads(line) for line in
                 (out / "validation" / "items.jsonl").read_text().splitlines()]
        # 23 techniques x 4 per technique on the fixture config
        assert len(items) == 92
        assert all("hidden_gold_label" in rec for rec in items)

    def test_annotate_export(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        run(["attack"], out)
        run(["validate-sample"], out)
        ann = out / "validation" / "annotations.jsonl"
        items = [json.loads(line) for line in
                 (out / "validation" / "items.jsonl").read_text().splitlines()]
        with open(ann, "w") as fh:
            for rec in items:
                fh.write(json.dumps({
                    "item_id": rec["item_id"],
                    "verdict": "True" if rec["hidden_gold_label"] else "False",
                    "annotator_id": "t",
                    "timestamp": 1.0,
                }) + "\n")
        assert run(["annotate-serve", "--export"], out) == 0
        stats = (out / "validation" / "stats.csv").read_text().splitlines()
        assert stats[0] == "technique,preservation,flip,ambiguity,n"
        assert all(line.split(",")[1] == "100.00" for line in stats[1:])
        status = json.loads((out / "validation" / "status.json").read_text())
        assert set(status.values()) == {"included"}


class TestUsageErrors:
    def test_missing_config_flag(self):
        assert main(["ingest"]) == 1

    def test_unknown_stage_flag(self):
        assert main(["--stage", "bogus", *CONFIG_ARGS]) == 1

    def test_wrong_experiment_store_rejected(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        run(["attack"], out)
        # different seed -> different experiment id -> stage must refuse
        assert main(["attack", *CONFIG_ARGS, "--out", str(out), "--seed", "999"]) == 2


class TestEndToEnd:
    def test_all_deterministic_across_runs(self, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run(["all"], out1) == 0
        assert run(["all"], out2) == 0
        assert bundle_digest(out1 / "reports") == bundle_digest(out2 / "reports")
        # reports exist with every shape
        names = {p.name for p in (out1 / "reports").iterdir()}
        assert {
            "table1.csv",
            "table3_asr.csv",
            "table4_techniques.csv",
            "fig2_recall_at_k.csv",
            "fig3_retrieval_vs_classification.csv",
            "summary.txt",
        } <= names

    def test_provenance_stamped(self, tmp_path):
        out = tmp_path / "o"
        run(["ingest"], out)
        cfg = load_config(CONFIG_ARGS[1], seed=1234, out=str(out))
        exp = Experiment(cfg)
        rec = json.loads((out / "corpus" / "claims.jsonl").read_text().splitlines()[0])
        assert rec["experiment_id"] == exp.experiment_id
        assert rec["config_digest"] == exp.config_digest

import json

import pytest

from afc_adapter.config import load_adapter_config
from afc_adapter.data import load_examples
from afc_adapter.training import evaluate, train_classifier
from afc_adapter.model import load_checkpoint

from conftest import smoke_config, synthetic_examples


class TestData:
    def test_store_loading(self, store_path):
        train = load_examples(store_path, "train")
        assert len(train) == 24
        assert {e.label for e in train} == {0, 1}
        assert all(e.evidence for e in train)

    def test_unresolved_evidence_dropped(self, tmp_path):
        path = tmp_path / "claims.jsonl"
        path.write_text(
            json.dumps(
                {
                    "id": "x",
                    "text": "t",
                    "label": True,
                    "dataset": "d",
                    "split": "train",
                    "evidence": [
                        {"page_id": "P", "element_id": "e", "content": "",
                         "kind": "sentence", "unresolved": True},
                        {"page_id": "P", "element_id": "f", "content": "ok",
                         "kind": "sentence", "unresolved": False},
                    ],
                }
            )
            + "\n"
        )
        (ex,) = load_examples(path, "train")
        assert ex.evidence == ("ok",)


class TestSmokeTraining:
    def test_checkpoint_produced_and_loadable(self, checkpoint):
        model, tokenizer, metadata = load_checkpoint(checkpoint)
        assert metadata["condition"] == "gold_evidence"
        assert metadata["config_digest"]
        assert "dev_metrics" in metadata and "roc_auc" in metadata["dev_metrics"]

    def test_same_seed_same_dev_metrics(self, store_path, tmp_path):
        cfg = smoke_config()
        train = load_examples(store_path, "train")
        dev = load_examples(store_path, "dev")
        first = train_classifier(train, dev, cfg, tmp_path / "a")
        second = train_classifier(train, dev, cfg, tmp_path / "b")
        meta_a = json.loads((first / "adapter_checkpoint.json").read_text())
        meta_b = json.loads((second / "adapter_checkpoint.json").read_text())
        assert meta_a["dev_metrics"] == meta_b["dev_metrics"]

    def test_evaluation_shape(self, checkpoint, store_path):
        model, tokenizer, metadata = load_checkpoint(checkpoint)
        cfg = smoke_config()
        metrics = evaluate(model, tokenizer, load_examples(store_path, "dev"), cfg)
        assert set(metrics) == {"accuracy", "macro_f1", "roc_auc"}
        assert 0.0 <= metrics["accuracy"] <= 1.0

    def test_empty_split_rejected(self, store_path):
        cfg = smoke_config()
        with pytest.raises(ValueError):
            train_classifier([], synthetic_examples(4), cfg, "nowhere")


class TestConfig:
    def test_defaults_from_yaml(self):
        cfg = load_adapter_config()
        assert cfg.training.learning_rates == (2e-5, 3e-5, 5e-5)
        assert cfg.training.effective_batch_size == 256
        assert cfg.training.grad_accumulation == 2
        assert cfg.max_length == 512
        assert cfg.training.early_stopping_patience == 1
        assert cfg.training.class_weighting == "inverse_frequency"

    def test_digest_stable(self):
        assert smoke_config().digest() == smoke_config().digest()
        assert smoke_config().digest() != smoke_config(condition="claim_only").digest()

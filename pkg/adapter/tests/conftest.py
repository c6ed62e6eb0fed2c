import json
from pathlib import Path

import pytest

from afc_adapter.config import AdapterConfig, TrainingConfig
from afc_adapter.data import Example, load_examples
from afc_adapter.training import train_classifier

REPO = Path(__file__).resolve().parents[2]
FIXTURE_CONFIG = REPO / "fixtures" / "experiment.yaml"
SCHEMA_PATH = REPO / "docs" / "score_protocol.schema.json"


def smoke_config(condition="gold_evidence") -> AdapterConfig:
    return AdapterConfig(
        model_name="tiny",
        condition=condition,
        max_length=64,
        training=TrainingConfig(
            learning_rates=(1e-3,),
            effective_batch_size=8,
            per_device_batch_size=8,
            epochs=2,
            warmup_fraction=0.1,
            early_stopping_patience=1,
            seed=11,
        ),
    )


def synthetic_examples(n=24, prefix="c"):
    """Separable toy data: True claims share vocabulary with their evidence."""
    examples = []
    for i in range(n):
        label = i % 2
        if label:
            text = f"The {prefix} plant {i} delivers forty megawatts."
            evidence = (f"The {prefix} plant {i} delivers forty megawatts of power.",)
        else:
            text = f"The {prefix} plant {i} breeds ornamental pigeons."
            evidence = (f"The {prefix} plant {i} delivers forty megawatts of power.",)
        examples.append(
            Example(claim_id=f"{prefix}{i}", text=text, label=label, evidence=evidence)
        )
    return examples


@pytest.fixture(scope="session")
def store_path(tmp_path_factory) -> Path:
    """A tiny normalized claim store in the harness's external schema."""
    path = tmp_path_factory.mktemp("store") / "claims.jsonl"
    records = []
    for split, n in (("train", 24), ("dev", 12), ("test", 6)):
        for i, ex in enumerate(synthetic_examples(n, prefix=split[:2])):
            records.append(
                {
                    "id": f"{split}-{i}",
                    "text": ex.text,
                    "label": bool(ex.label),
                    "dataset": "fixture",
                    "split": split,
                    "evidence": [
                        {
                            "page_id": "P",
                            "element_id": f"sentence_{j}",
                            "content": content,
                            "kind": "sentence",
                            "unresolved": False,
                        }
                        for j, content in enumerate(ex.evidence)
                    ],
                }
            )
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory, store_path) -> Path:
    out = tmp_path_factory.mktemp("ckpt") / "model"
    cfg = smoke_config()
    train = load_examples(store_path, "train")
    dev = load_examples(store_path, "dev")
    return train_classifier(train, dev, cfg, out)

"""Adapter configuration.

Training hyperparameters ship as data (``configs/default.yaml``) rather
than constants: learning-rate grid, effective batch size split into
per-device batch and gradient accumulation, epochs, weight decay, warmup
fraction, gradient clipping, and early-stopping patience on dev ROC AUC.
``model_name: tiny`` builds a small randomly initialized encoder with a
corpus-fitted tokenizer, which keeps smoke training and CI fully offline;
any Hugging Face encoder name works when weights are available locally.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

CLAIM_ONLY = "claim_only"
GOLD_EVIDENCE = "gold_evidence"


@dataclass
class TrainingConfig:
    learning_rates: tuple[float, ...] = (2e-5, 3e-5, 5e-5)
    effective_batch_size: int = 256
    per_device_batch_size: int = 128
    epochs: int = 5
    weight_decay: float = 0.01
    warmup_fraction: float = 0.10
    max_grad_norm: float = 1.0
    early_stopping_patience: int = 1
    class_weighting: str = "inverse_frequency"  # or "none"
    seed: int = 7

    @property
    def grad_accumulation(self) -> int:
        return max(1, self.effective_batch_size // self.per_device_batch_size)


@dataclass
class AdapterConfig:
    model_name: str = "roberta-base"  # "tiny" builds an offline random encoder
    condition: str = GOLD_EVIDENCE
    max_length: int = 512
    training: TrainingConfig = field(default_factory=TrainingConfig)
    generator_backend: dict = field(default_factory=lambda: {"mode": "canned"})

    def digest(self) -> str:
        data = {
            "model_name": self.model_name,
            "condition": self.condition,
            "max_length": self.max_length,
            "training": vars(self.training) | {"learning_rates": list(self.training.learning_rates)},
        }
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def load_adapter_config(path: str | Path | None = None) -> AdapterConfig:
    if path is None:
        path = Path(__file__).resolve().parents[2] / "configs" / "default.yaml"
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    training_raw = raw.get("training") or {}
    training = TrainingConfig(
        learning_rates=tuple(float(x) for x in training_raw.get("learning_rates", (2e-5, 3e-5, 5e-5))),
        effective_batch_size=int(training_raw.get("effective_batch_size", 256)),
        per_device_batch_size=int(training_raw.get("per_device_batch_size", 128)),
        epochs=int(training_raw.get("epochs", 5)),
        weight_decay=float(training_raw.get("weight_decay", 0.01)),
        warmup_fraction=float(training_raw.get("warmup_fraction", 0.10)),
        max_grad_norm=float(training_raw.get("max_grad_norm", 1.0)),
        early_stopping_patience=int(training_raw.get("early_stopping_patience", 1)),
        class_weighting=training_raw.get("class_weighting", "inverse_frequency"),
        seed=int(training_raw.get("seed", 7)),
    )
    return AdapterConfig(
        model_name=raw.get("model_name", "roberta-base"),
        condition=raw.get("condition", GOLD_EVIDENCE),
        max_length=int(raw.get("max_length", 512)),
        training=training,
        generator_backend=raw.get("generator_backend") or {"mode": "canned"},
    )

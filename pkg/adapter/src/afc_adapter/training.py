"""Classifier fine-tuning.

A plain torch loop: AdamW with weight decay, linear warmup, gradient
accumulation to the effective batch size, gradient-norm clipping,
inverse-frequency class weights, early stopping with configurable
patience on dev ROC AUC, and a learning-rate grid searched by dev AUC.
The best checkpoint is saved with the config digest and its dev metrics.
Divergence (non-finite loss) aborts with diagnostics rather than saving
a broken checkpoint.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import torch
from sklearn.metrics import f1_score, roc_auc_score
from torch.utils.data import DataLoader

from .config import AdapterConfig, CLAIM_ONLY
from .data import Example
from .model import TRUE_INDEX, build_model_and_tokenizer, encode_batch, save_checkpoint


class TrainingDiverged(RuntimeError):
    pass


def _inputs_for(example: Example, condition: str) -> tuple[str, list[str]]:
    if condition == CLAIM_ONLY:
        return example.text, []
    return example.text, list(example.evidence)


def _class_weights(examples: list[Example]) -> torch.Tensor:
    counts = np.bincount([e.label for e in examples], minlength=2).astype(float)
    counts[counts == 0] = 1.0
    weights = counts.sum() / (2.0 * counts)
    return torch.tensor(weights, dtype=torch.float32)


def evaluate(model, tokenizer, examples: list[Example], cfg: AdapterConfig) -> dict:
    model.eval()
    probs: list[float] = []
    with torch.no_grad():
        for start in range(0, len(examples), 32):
            chunk = examples[start : start + 32]
            claims, evidence = zip(*(_inputs_for(e, cfg.condition) for e in chunk))
            batch, _ = encode_batch(tokenizer, list(claims), list(evidence), cfg.max_length)
            logits = model(**batch).logits
            probs.extend(torch.softmax(logits, dim=-1)[:, TRUE_INDEX].tolist())
    labels = [e.label for e in examples]
    preds = [1 if p >= 0.5 else 0 for p in probs]
    metrics = {
        "accuracy": float(np.mean([p == l for p, l in zip(preds, labels)])),
        "macro_f1": float(f1_score(labels, preds, average="macro", zero_division=0)),
    }
    if len(set(labels)) == 2:
        metrics["roc_auc"] = float(roc_auc_score(labels, probs))
    else:
        metrics["roc_auc"] = float("nan")
    return metrics


def _selection_score(metrics: dict) -> float:
    auc = metrics.get("roc_auc", float("nan"))
    return metrics["accuracy"] if math.isnan(auc) else auc


def _train_single(
    train: list[Example],
    dev: list[Example],
    cfg: AdapterConfig,
    lr: float,
    corpus_texts: list[str],
) -> tuple[object, object, dict]:
    tcfg = cfg.training
    torch.manual_seed(tcfg.seed)
    model, tokenizer = build_model_and_tokenizer(cfg.model_name, corpus_texts)
    weights = (
        _class_weights(train)
        if tcfg.class_weighting == "inverse_frequency"
        else torch.ones(2)
    )
    loss_fn = torch.nn.CrossEntropyLoss(weight=weights)
    optimizer = torch.optim.AdamW(model.parameters(), lr=lr, weight_decay=tcfg.weight_decay)

    loader = DataLoader(
        list(range(len(train))),
        batch_size=min(tcfg.per_device_batch_size, max(1, len(train))),
        shuffle=True,
        generator=torch.Generator().manual_seed(tcfg.seed),
    )
    steps_per_epoch = max(1, math.ceil(len(loader) / tcfg.grad_accumulation))
    total_steps = steps_per_epoch * tcfg.epochs
    warmup = int(tcfg.warmup_fraction * total_steps)

    def lr_lambda(step):
        if warmup and step < warmup:
            return step / warmup
        remaining = max(1, total_steps - warmup)
        return max(0.0, (total_steps - step) / remaining)

    scheduler = torch.optim.lr_scheduler.LambdaLR(optimizer, lr_lambda)

    best_state = None
    best_metrics: dict = {}
    best_score = -float("inf")
    patience_left = tcfg.early_stopping_patience

    step = 0
    for epoch in range(tcfg.epochs):
        model.train()
        optimizer.zero_grad()
        for micro_step, indices in enumerate(loader):
            chunk = [train[i] for i in indices.tolist()]
            claims, evidence = zip(*(_inputs_for(e, cfg.condition) for e in chunk))
            batch, _ = encode_batch(tokenizer, list(claims), list(evidence), cfg.max_length)
            labels = torch.tensor([e.label for e in chunk])
            logits = model(**batch).logits
            loss = loss_fn(logits, labels) / tcfg.grad_accumulation
            if not torch.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch} micro-step {micro_step} (lr={lr})"
                )
            loss.backward()
            if (micro_step + 1) % tcfg.grad_accumulation == 0 or micro_step + 1 == len(loader):
                torch.nn.utils.clip_grad_norm_(model.parameters(), tcfg.max_grad_norm)
                optimizer.step()
                scheduler.step()
                optimizer.zero_grad()
                step += 1

        metrics = evaluate(model, tokenizer, dev, cfg)
        score = _selection_score(metrics)
        if score > best_score:
            best_score = score
            best_metrics = {**metrics, "epoch": epoch}
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            patience_left = tcfg.early_stopping_patience
        else:
            patience_left -= 1
            if patience_left < 0:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return model, tokenizer, best_metrics


def train_classifier(
    train: list[Example],
    dev: list[Example],
    cfg: AdapterConfig,
    out_dir: str | Path,
) -> Path:
    """Grid over learning rates, keep the checkpoint best by dev ROC AUC."""
    if not train or not dev:
        raise ValueError("training needs non-empty train and dev example lists")
    corpus_texts = [e.text for e in train] + [s for e in train for s in e.evidence]
    best = None
    for lr in cfg.training.learning_rates:
        model, tokenizer, metrics = _train_single(train, dev, cfg, lr, corpus_texts)
        candidate = (_selection_score(metrics), lr, model, tokenizer, metrics)
        if best is None or candidate[0] > best[0]:
            best = candidate
    _, lr, model, tokenizer, metrics = best
    metadata = {
        "condition": cfg.condition,
        "max_length": cfg.max_length,
        "model_name": cfg.model_name,
        "learning_rate": lr,
        "config_digest": cfg.digest(),
        "dev_metrics": metrics,
    }
    return save_checkpoint(model, tokenizer, out_dir, metadata)

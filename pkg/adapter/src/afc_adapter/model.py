"""Model construction and input assembly.

A scored input is the claim alone, or the claim concatenated with each
evidence snippet delimited by the encoder's separator token:

    [CLS] claim [SEP] e1 [SEP] e2 [SEP] ... [SEP]

Assembly happens here, on the serving side; the wire protocol only
carries structured fields. Inputs longer than ``max_length`` tokens are
truncated and the response flags it.

``model_name: tiny`` builds a 2-layer randomly initialized encoder with a
word-level tokenizer fitted on the training corpus, so smoke training and
tests never touch the network.
"""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import (
    AutoModelForSequenceClassification,
    AutoTokenizer,
    BertConfig,
    BertForSequenceClassification,
    PreTrainedTokenizerFast,
)

LABELS = {0: "False", 1: "True"}
TRUE_INDEX = 1

TINY = "tiny"


def build_tiny_tokenizer(texts: list[str], vocab_size: int = 2000) -> PreTrainedTokenizerFast:
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.pre_tokenizers import Whitespace
    from tokenizers.trainers import WordLevelTrainer

    tokenizer = Tokenizer(WordLevel(unk_token="[UNK]"))
    tokenizer.pre_tokenizer = Whitespace()
    trainer = WordLevelTrainer(
        vocab_size=vocab_size, special_tokens=["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
    )
    tokenizer.train_from_iterator(texts, trainer)
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
    )


def build_tiny_model(vocab_size: int) -> BertForSequenceClassification:
    config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=512,
        num_labels=2,
    )
    return BertForSequenceClassification(config)


def build_model_and_tokenizer(model_name: str, corpus_texts: list[str] | None = None):
    if model_name == TINY:
        if not corpus_texts:
            raise ValueError("tiny model needs corpus texts to fit its tokenizer")
        tokenizer = build_tiny_tokenizer(corpus_texts)
        model = build_tiny_model(tokenizer.vocab_size)
        return model, tokenizer
    tokenizer = AutoTokenizer.from_pretrained(model_name)
    model = AutoModelForSequenceClassification.from_pretrained(model_name, num_labels=2)
    return model, tokenizer


def assemble_text(tokenizer, claim: str, evidence: list[str]) -> str:
    """Join claim and evidence with the encoder's separator token."""
    sep = tokenizer.sep_token or "[SEP]"
    if not evidence:
        return claim
    return f" {sep} ".join([claim, *evidence])


def encode_batch(tokenizer, claims: list[str], evidence: list[list[str]], max_length: int):
    """Tokenize assembled inputs; returns (tensors, truncation flags)."""
    texts = [assemble_text(tokenizer, c, e) for c, e in zip(claims, evidence)]
    untruncated = tokenizer(texts)["input_ids"]
    truncated_flags = [len(ids) > max_length for ids in untruncated]
    batch = tokenizer(
        texts,
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    return batch, truncated_flags


@torch.no_grad()
def score_batch(model, tokenizer, claims, evidence, max_length: int):
    """p(True) per input in evaluation mode; deterministic per process."""
    model.eval()
    batch, truncated = encode_batch(tokenizer, claims, evidence, max_length)
    logits = model(**batch).logits
    probs = torch.softmax(logits, dim=-1)[:, TRUE_INDEX]
    return [float(p) for p in probs], truncated


def save_checkpoint(model, tokenizer, out_dir: str | Path, metadata: dict) -> Path:
    import json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    (out_dir / "adapter_checkpoint.json").write_text(
        json.dumps(metadata, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    return out_dir


def load_checkpoint(checkpoint_dir: str | Path):
    import json

    checkpoint_dir = Path(checkpoint_dir)
    model = AutoModelForSequenceClassification.from_pretrained(checkpoint_dir)
    tokenizer = AutoTokenizer.from_pretrained(checkpoint_dir)
    metadata = json.loads((checkpoint_dir / "adapter_checkpoint.json").read_text())
    model.eval()
    return model, tokenizer, metadata

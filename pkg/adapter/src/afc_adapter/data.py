"""Reading the normalized claim store produced by the harness."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Example:
    claim_id: str
    text: str
    label: int  # 1 = True, 0 = False
    evidence: tuple[str, ...]


def load_examples(store_path: str | Path, split: str, dataset: str | None = None) -> list[Example]:
    """Load one split from the line-delimited claim store.

    Evidence keeps only resolved snippets, in source order, as linearized
    text; the store schema is the harness's external interface.
    """
    examples = []
    with open(store_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("split") != split:
                continue
            if dataset is not None and rec.get("dataset") != dataset:
                continue
            evidence = tuple(
                e["content"] for e in rec.get("evidence", []) if not e.get("unresolved")
            )
            examples.append(
                Example(
                    claim_id=str(rec["id"]),
                    text=rec["text"],
                    label=1 if rec["label"] else 0,
                    evidence=evidence,
                )
            )
    return examples

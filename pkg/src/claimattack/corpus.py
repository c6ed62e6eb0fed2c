"""Dataset ingestion and the normalized claim model.

Source files are line-delimited records in their native benchmark layout;
ingestion maps verdict vocabularies onto a binary label, drops
not-enough-info records, resolves gold evidence against a page store, and
emits ClaimRecords that serialize to the normalized store schema
(see ``claim_to_record``). Ingestion never mutates inputs and is
deterministic: the same files and seed produce byte-identical stores.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .rng import SplitMix64, hash64

Verdict = bool  # True / False claim label; NEI never enters the store

EVIDENCE_KINDS = ("sentence", "table_cell", "list_item", "other")

# Verdict vocabularies differ across benchmarks; keys are lowercased.
# None marks a verdict that is dropped rather than rejected.
DEFAULT_LABEL_MAP: dict[str, Verdict | None] = {
    "supports": True,
    "refutes": False,
    "true": True,
    "false": False,
    "not enough info": None,
    "not enough evidence": None,
    "nei": None,
}

# Published dev-split sizes (true, false) used when carving a dev set
# out of the structured dataset's training split.
DEFAULT_STRUCTURED_DEV_COUNTS = (6268, 4099)


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class EvidenceSnippet:
    page_id: str
    element_id: str
    content: str
    kind: str = "sentence"
    unresolved: bool = False

    def __post_init__(self):
        if self.kind not in EVIDENCE_KINDS:
            raise CorpusError(f"unknown evidence kind {self.kind!r}")
        if not self.page_id:
            raise CorpusError("evidence snippet requires a page_id")


@dataclass(frozen=True)
class ClaimRecord:
    id: str
    text: str
    label: Verdict
    evidence: tuple[EvidenceSnippet, ...]
    dataset: str
    split: str

    @property
    def gold_pages(self) -> tuple[str, ...]:
        """Distinct evidence page ids, first-occurrence order."""
        seen: list[str] = []
        for snip in self.evidence:
            if snip.page_id not in seen:
                seen.append(snip.page_id)
        return tuple(seen)

    def resolved_evidence(self) -> tuple[EvidenceSnippet, ...]:
        return tuple(s for s in self.evidence if not s.unresolved)


@dataclass
class IngestIssue:
    """Record-level ingestion problem; the stream continues past it."""

    file: str
    line: int
    reason: str


@dataclass(frozen=True)
class RawElement:
    """A structured evidence element before linearization."""

    page_id: str
    element_id: str
    kind: str
    text: str = ""
    value: str = ""
    header_path: tuple[str, ...] = ()


_WS = re.compile(r"\s+")


def _collapse(text: str) -> str:
    return _WS.sub(" ", text).strip()


def linearize_evidence(raw: RawElement) -> EvidenceSnippet:
    """Flatten a structured evidence element to plain text.

    Sentences and list items pass through verbatim; a table cell becomes
    ``"<page title> : <header path...> : <cell value>"``. All whitespace is
    collapsed to single spaces. An empty payload yields an unresolved
    snippet rather than dropping the element.
    """
    if raw.kind == "table_cell":
        parts = [raw.page_id, *raw.header_path, raw.value]
        value = _collapse(raw.value)
        content = _collapse(" : ".join(parts)) if value else ""
        return EvidenceSnippet(
            page_id=raw.page_id,
            element_id=raw.element_id,
            content=content,
            kind="table_cell",
            unresolved=not value,
        )
    content = _collapse(raw.text)
    return EvidenceSnippet(
        page_id=raw.page_id,
        element_id=raw.element_id,
        content=content,
        kind=raw.kind,
        unresolved=not content,
    )


class PageStore:
    """Read-only lookup of page elements used to resolve gold evidence.

    The store is one or more ``.jsonl`` files of
    ``{"page_id": ..., "text": ..., "elements": {element_id: {...}}}``
    records. Element payloads carry ``kind`` plus either ``text`` or
    ``value``/``header_path`` for table cells.
    """

    def __init__(self, pages: dict[str, dict]):
        self._pages = pages

    @classmethod
    def load(cls, path: str | Path) -> "PageStore":
        path = Path(path)
        files = sorted(path.glob("*.jsonl")) if path.is_dir() else [path]
        pages: dict[str, dict] = {}
        for file in files:
            with open(file, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    pages[rec["page_id"]] = rec
        return cls(pages)

    def __contains__(self, page_id: str) -> bool:
        return page_id in self._pages

    def page_text(self, page_id: str) -> str | None:
        rec = self._pages.get(page_id)
        return rec.get("text") if rec else None

    def get_element(self, page_id: str, element_id: str) -> RawElement | None:
        rec = self._pages.get(page_id)
        if rec is None:
            return None
        payload = (rec.get("elements") or {}).get(element_id)
        if payload is None:
            return None
        return RawElement(
            page_id=page_id,
            element_id=element_id,
            kind=payload.get("kind", "sentence"),
            text=payload.get("text", ""),
            value=payload.get("value", ""),
            header_path=tuple(payload.get("header_path", ())),
        )


# Structured element ids look like "<page title>_<marker>_<coords>"; the
# marker decides the evidence kind. header_cell must precede cell.
_ELEMENT_MARKER = re.compile(
    r"_(header_cell|table_caption|sentence|cell|item|caption|title)(?=_|$)"
)
_MARKER_KIND = {
    "sentence": "sentence",
    "cell": "table_cell",
    "header_cell": "table_cell",
    "item": "list_item",
    "caption": "other",
    "table_caption": "other",
    "title": "other",
}


def split_element_id(element_id: str) -> tuple[str, str]:
    """Return (page_id, kind) parsed from a structured element id."""
    m = _ELEMENT_MARKER.search(element_id)
    if not m:
        return element_id, "other"
    return element_id[: m.start()], _MARKER_KIND[m.group(1)]


def _normalize_label(
    raw_label: object, label_map: dict[str, Verdict | None]
) -> tuple[Verdict | None, str | None]:
    """Map a source verdict string; returns (label, rejection reason)."""
    if not isinstance(raw_label, str):
        return None, f"label is not a string: {raw_label!r}"
    key = raw_label.strip().lower()
    if key not in label_map:
        return None, f"unresolvable label string {raw_label!r}"
    return label_map[key], None


def _resolve(page_id: str, element_id: str, kind: str, page_store: PageStore | None) -> EvidenceSnippet:
    if page_store is not None:
        raw = page_store.get_element(page_id, element_id)
        if raw is not None:
            return linearize_evidence(raw)
    return EvidenceSnippet(
        page_id=page_id, element_id=element_id, content="", kind=kind, unresolved=True
    )


def _iter_lines(path: str | Path, issues: list[IngestIssue] | None) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                if issues is not None:
                    issues.append(IngestIssue(str(path), line_no, f"malformed line: {exc}"))
                continue
            if not isinstance(rec, dict):
                if issues is not None:
                    issues.append(IngestIssue(str(path), line_no, "record is not an object"))
                continue
            yield line_no, rec


def ingest_fever(
    claims_file: str | Path,
    *,
    split: str,
    dataset: str = "fever",
    label_map: dict[str, Verdict | None] | None = None,
    page_store: PageStore | None = None,
    issues: list[IngestIssue] | None = None,
) -> Iterator[ClaimRecord]:
    """Ingest a sentence-evidence benchmark split.

    Evidence quads are flattened across annotation sets into distinct
    (page, sentence) references in first-occurrence order and resolved
    against the page store when available; unresolvable references are
    kept with the unresolved flag so split sizes never silently change.
    """
    label_map = label_map or DEFAULT_LABEL_MAP
    seen_ids: set[str] = set()
    for line_no, rec in _iter_lines(claims_file, issues):
        try:
            claim_id = str(rec["id"])
            text = rec["claim"]
            raw_label = rec.get("label")
        except KeyError as exc:
            if issues is not None:
                issues.append(IngestIssue(str(claims_file), line_no, f"missing field {exc}"))
            continue
        label, reason = _normalize_label(raw_label, label_map)
        if reason is not None:
            if issues is not None:
                issues.append(IngestIssue(str(claims_file), line_no, reason))
            continue
        if label is None:
            continue  # not-enough-info: dropped by design
        if claim_id in seen_ids:
            if issues is not None:
                issues.append(
                    IngestIssue(str(claims_file), line_no, f"duplicate id {claim_id} in split")
                )
            continue
        seen_ids.add(claim_id)

        refs: list[tuple[str, str]] = []
        for group in rec.get("evidence") or []:
            for quad in group:
                # [annotation_id, evidence_id, page, sentence_index]
                if len(quad) < 4 or quad[2] is None:
                    continue
                ref = (str(quad[2]), f"sentence_{quad[3]}")
                if ref not in refs:
                    refs.append(ref)
        evidence = tuple(_resolve(p, e, "sentence", page_store) for p, e in refs)
        yield ClaimRecord(
            id=claim_id, text=text, label=label, evidence=evidence, dataset=dataset, split=split
        )


def _ingest_structured_file(
    claims_file: str | Path,
    *,
    split: str,
    dataset: str,
    label_map: dict[str, Verdict | None],
    page_store: PageStore | None,
    issues: list[IngestIssue] | None,
) -> Iterator[ClaimRecord]:
    seen_ids: set[str] = set()
    for line_no, rec in _iter_lines(claims_file, issues):
        if "claim" not in rec:
            if issues is not None:
                issues.append(IngestIssue(str(claims_file), line_no, "missing field 'claim'"))
            continue
        claim_id = str(rec.get("id", line_no))
        label, reason = _normalize_label(rec.get("label"), label_map)
        if reason is not None:
            if issues is not None:
                issues.append(IngestIssue(str(claims_file), line_no, reason))
            continue
        if label is None:
            continue
        if claim_id in seen_ids:
            if issues is not None:
                issues.append(
                    IngestIssue(str(claims_file), line_no, f"duplicate id {claim_id} in split")
                )
            continue
        seen_ids.add(claim_id)

        element_ids: list[str] = []
        for group in rec.get("evidence") or []:
            for element_id in group.get("content", []):
                if element_id not in element_ids:
                    element_ids.append(element_id)
        evidence = []
        for element_id in element_ids:
            page_id, kind = split_element_id(element_id)
            evidence.append(_resolve(page_id, element_id, kind, page_store))
        yield ClaimRecord(
            id=claim_id,
            text=rec["claim"],
            label=label,
            evidence=tuple(evidence),
            dataset=dataset,
            split=split,
        )


def ingest_feverous(
    train_file: str | Path,
    dev_file: str | Path,
    *,
    dataset: str = "feverous",
    label_map: dict[str, Verdict | None] | None = None,
    page_store: PageStore | None = None,
    seed: int = 0,
    dev_counts: tuple[int, int] | None = None,
    dev_fraction: float | None = None,
    issues: list[IngestIssue] | None = None,
) -> Iterator[ClaimRecord]:
    """Ingest the structured-evidence benchmark.

    The official dev split becomes the held-out test split; a dev split is
    carved out of train by seeded stratified sampling on the label. The
    carve size defaults to the published dev counts, or to ``dev_fraction``
    of each label stratum when given.
    """
    label_map = label_map or DEFAULT_LABEL_MAP
    train = list(
        _ingest_structured_file(
            train_file,
            split="train",
            dataset=dataset,
            label_map=label_map,
            page_store=page_store,
            issues=issues,
        )
    )
    dev_ids = _carve_dev_ids(train, seed=seed, dev_counts=dev_counts, dev_fraction=dev_fraction)
    for rec in train:
        yield replace(rec, split="dev") if rec.id in dev_ids else rec
    yield from _ingest_structured_file(
        dev_file,
        split="test",
        dataset=dataset,
        label_map=label_map,
        page_store=page_store,
        issues=issues,
    )


def _carve_dev_ids(
    train: list[ClaimRecord],
    *,
    seed: int,
    dev_counts: tuple[int, int] | None,
    dev_fraction: float | None,
) -> set[str]:
    by_label: dict[Verdict, list[str]] = {True: [], False: []}
    for rec in train:
        by_label[rec.label].append(rec.id)
    if dev_fraction is not None:
        targets = {lab: round(dev_fraction * len(ids)) for lab, ids in by_label.items()}
    else:
        true_n, false_n = dev_counts or DEFAULT_STRUCTURED_DEV_COUNTS
        targets = {True: true_n, False: false_n}
    chosen: set[str] = set()
    rng = SplitMix64(hash64(seed, "structured-dev-carve"))
    for label in (True, False):
        ids = by_label[label]
        n = targets[label]
        if n >= len(ids):
            # Cap so a desk-scale train split is never emptied into dev.
            n = len(ids) // 2
        if n > 0:
            chosen.update(rng.sample(ids, n))
    return chosen


@dataclass
class DatasetStats:
    true_count: int = 0
    false_count: int = 0
    avg_claim_tokens: float = 0.0
    avg_gold_evidence: float = 0.0

    @property
    def total(self) -> int:
        return self.true_count + self.false_count


def compute_stats(
    records: Iterable[ClaimRecord],
    token_counter: Callable[[str], int] | None = None,
) -> dict[tuple[str, str], DatasetStats]:
    """Per-(dataset, split) label counts and averages.

    Claim length is measured with the harness tokenizer, counting word
    tokens (tokens containing an alphanumeric character); evidence length
    is the gold evidence list length.
    """
    if token_counter is None:
        from .lexical import count_words

        token_counter = count_words
    grouped: dict[tuple[str, str], list[ClaimRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.dataset, rec.split), []).append(rec)
    out: dict[tuple[str, str], DatasetStats] = {}
    for key, recs in grouped.items():
        stats = DatasetStats()
        tokens = 0
        evidence = 0
        for rec in recs:
            if rec.label:
                stats.true_count += 1
            else:
                stats.false_count += 1
            tokens += token_counter(rec.text)
            evidence += len(rec.evidence)
        if recs:
            stats.avg_claim_tokens = tokens / len(recs)
            stats.avg_gold_evidence = evidence / len(recs)
        out[key] = stats
    return out


def claim_to_record(claim: ClaimRecord) -> dict:
    return {
        "id": claim.id,
        "text": claim.text,
        "label": claim.label,
        "dataset": claim.dataset,
        "split": claim.split,
        "evidence": [
            {
                "page_id": s.page_id,
                "element_id": s.element_id,
                "content": s.content,
                "kind": s.kind,
                "unresolved": s.unresolved,
            }
            for s in claim.evidence
        ],
    }


def record_to_claim(rec: dict) -> ClaimRecord:
    return ClaimRecord(
        id=rec["id"],
        text=rec["text"],
        label=bool(rec["label"]),
        dataset=rec["dataset"],
        split=rec["split"],
        evidence=tuple(
            EvidenceSnippet(
                page_id=e["page_id"],
                element_id=e["element_id"],
                content=e["content"],
                kind=e["kind"],
                unresolved=e["unresolved"],
            )
            for e in rec["evidence"]
        ),
    )

"""Label-invariance validation workflow.

A stratified sample of persuasion variants is served blind to a human
annotator: each item shows the rewritten claim plus its gold evidence and
never the original claim text or the gold label. Verdicts (True / False /
NEI) accumulate into per-technique preservation, flip, and ambiguity
rates; techniques whose preservation rate does not exceed the threshold
are excluded from the attack set.

Note: this module deliberately avoids postponed annotation evaluation;
the request model lives in a closure and FastAPI must see a real class,
not a string.
"""

import csv
import io
import json
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .corpus import ClaimRecord
from .rng import SplitMix64, hash64
from .stores import dumps, read_jsonl

VERDICTS = ("True", "False", "NEI")

STATUS_PENDING = "pending"
STATUS_DONE = "done"

EXCLUSION_THRESHOLD = 0.80

# The three-step decision procedure shown to annotators in the UI.
DECISION_STEPS = (
    "Core Fact Identification",
    "Evidence Verification",
    "Ambiguity Resolution",
)


class AnnotationError(Exception):
    pass


@dataclass
class ValidationItem:
    item_id: int
    text: str
    evidence: tuple[str, ...]
    technique_key: str
    dataset: str
    hidden_gold_label: bool
    claim_id: str
    status: str = STATUS_PENDING

    def client_payload(self) -> dict:
        """What an annotator may see: the variant and its evidence only."""
        return {"item_id": self.item_id, "text": self.text, "evidence": list(self.evidence)}

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "text": self.text,
            "evidence": list(self.evidence),
            "technique_key": self.technique_key,
            "dataset": self.dataset,
            "hidden_gold_label": self.hidden_gold_label,
            "claim_id": self.claim_id,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ValidationItem":
        return cls(
            item_id=int(rec["item_id"]),
            text=rec["text"],
            evidence=tuple(rec["evidence"]),
            technique_key=rec["technique_key"],
            dataset=rec["dataset"],
            hidden_gold_label=bool(rec["hidden_gold_label"]),
            claim_id=rec["claim_id"],
        )


@dataclass(frozen=True)
class VerdictAnnotation:
    item_id: int
    verdict: str
    annotator_id: str
    timestamp: float

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise AnnotationError(f"unknown verdict {self.verdict!r}")


def _claim_key(var: dict) -> tuple[str, str]:
    return (var.get("dataset", ""), var["claim_id"])


def sample_validation_set(
    variants: list[dict],
    claims: dict[tuple[str, str], ClaimRecord],
    n_per_technique: int = 30,
    seed: int = 0,
    technique_keys: list[str] | None = None,
) -> tuple[list[ValidationItem], list[str]]:
    """Draw the stratified validation sample.

    ``claims`` is keyed by (dataset, claim id). Per technique,
    ``n_per_technique`` variants are sampled stratified by (dataset, gold
    label): quotas split as evenly as divisibility allows and the
    remainder strata are picked by seeded draw. Strata that cannot fill
    their quota are reported as shortfalls and sampling continues with
    what exists. Item order is a seeded shuffle so the annotator never
    sees one technique in a block; ids are sequential.
    """
    pools: dict[str, dict[tuple[str, bool], list[dict]]] = {}
    for var in variants:
        if var.get("attack_kind") != "persuasion" or not var.get("text"):
            continue
        claim = claims.get(_claim_key(var))
        if claim is None:
            continue
        stratum = (claim.dataset, claim.label)
        pools.setdefault(var["technique_key"], {}).setdefault(stratum, []).append(var)

    keys = technique_keys if technique_keys is not None else sorted(pools)
    strata = sorted({s for tech in pools.values() for s in tech})
    shortfalls: list[str] = []
    chosen: list[tuple[str, dict]] = []
    for tech_key in keys:
        tech_pools = pools.get(tech_key, {})
        if not tech_pools:
            shortfalls.append(f"{tech_key}: no variants at all")
            continue
        rng = SplitMix64(hash64(seed, "validation-sample", tech_key))
        quotas = _stratum_quotas(n_per_technique, strata, rng)
        for stratum in strata:
            pool = sorted(
                tech_pools.get(stratum, []), key=lambda v: (v["claim_id"], v["text"])
            )
            want = quotas[stratum]
            if want == 0:
                continue
            if len(pool) < want:
                shortfalls.append(
                    f"{tech_key}: stratum {stratum[0]}/{stratum[1]} has "
                    f"{len(pool)} of {want} requested"
                )
                want = len(pool)
            for var in rng.sample(pool, want):
                chosen.append((tech_key, var))

    order_rng = SplitMix64(hash64(seed, "validation-order"))
    order_rng.shuffle(chosen)
    items = []
    for i, (tech_key, var) in enumerate(chosen, start=1):
        claim = claims[_claim_key(var)]
        items.append(
            ValidationItem(
                item_id=i,
                text=var["text"],
                evidence=tuple(s.content for s in claim.resolved_evidence()),
                technique_key=tech_key,
                dataset=claim.dataset,
                hidden_gold_label=claim.label,
                claim_id=claim.id,
            )
        )
    return items, shortfalls


def _stratum_quotas(
    n: int, strata: list[tuple[str, bool]], rng: SplitMix64
) -> dict[tuple[str, bool], int]:
    if not strata:
        return {}
    base, rem = divmod(n, len(strata))
    quotas = {s: base for s in strata}
    for s in rng.sample(strata, rem):
        quotas[s] += 1
    return quotas


@dataclass
class TechniqueValidationStats:
    technique_key: str
    n: int
    n_preserve: int
    n_flip: int
    n_ambiguous: int

    def __post_init__(self):
        if self.n <= 0:
            raise AnnotationError("stats need at least one annotation")
        if self.n_preserve + self.n_flip + self.n_ambiguous != self.n:
            raise AnnotationError("preservation + flip + ambiguity must cover all items")

    @property
    def preservation(self) -> float:
        return self.n_preserve / self.n

    @property
    def flip(self) -> float:
        return self.n_flip / self.n

    @property
    def ambiguity(self) -> float:
        return self.n_ambiguous / self.n


def final_verdicts(annotations: list[VerdictAnnotation]) -> dict[int, VerdictAnnotation]:
    """Last write wins per item (pre-freeze edits are allowed)."""
    ordered: dict[int, VerdictAnnotation] = {}
    for ann in annotations:
        ordered[ann.item_id] = ann
    return ordered


def aggregate_rates(
    annotations: list[VerdictAnnotation], items: dict[int, ValidationItem]
) -> list[TechniqueValidationStats]:
    """Preservation / flip / ambiguity per technique.

    Preservation: the verdict matches the hidden gold label. Flip: the
    opposite binary verdict. Ambiguity: NEI (never counted as a flip).
    """
    counters: dict[str, list[int]] = {}
    for ann in final_verdicts(annotations).values():
        item = items.get(ann.item_id)
        if item is None:
            raise AnnotationError(f"annotation for unknown item {ann.item_id}")
        slot = counters.setdefault(item.technique_key, [0, 0, 0])  # preserve, flip, nei
        if ann.verdict == "NEI":
            slot[2] += 1
        elif (ann.verdict == "True") == item.hidden_gold_label:
            slot[0] += 1
        else:
            slot[1] += 1
    stats = []
    for tech_key in sorted(counters):
        preserve, flip, nei = counters[tech_key]
        stats.append(
            TechniqueValidationStats(
                technique_key=tech_key,
                n=preserve + flip + nei,
                n_preserve=preserve,
                n_flip=flip,
                n_ambiguous=nei,
            )
        )
    return stats


def apply_exclusion(
    stats: list[TechniqueValidationStats], threshold: float = EXCLUSION_THRESHOLD
) -> dict[str, str]:
    """Partition techniques: preservation <= threshold means excluded.

    The comparison is exact rational arithmetic so a preservation rate
    sitting precisely on the threshold is excluded, while anything above
    it by any margin stays in.
    """
    out = {}
    for s in stats:
        rate = Fraction(s.n_preserve, s.n)
        out[s.technique_key] = "excluded" if rate <= Fraction(threshold) else "included"
    return out


def stats_csv(stats: list[TechniqueValidationStats]) -> str:
    """Per-technique rates as percentages, two decimals."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["technique", "preservation", "flip", "ambiguity", "n"])
    for s in stats:
        writer.writerow(
            [
                s.technique_key,
                f"{100 * s.preservation:.2f}",
                f"{100 * s.flip:.2f}",
                f"{100 * s.ambiguity:.2f}",
                s.n,
            ]
        )
    return buf.getvalue()


# --- HTTP service -----------------------------------------------------------


@dataclass
class AnnotationState:
    items: dict[int, ValidationItem]
    annotations: list[VerdictAnnotation] = field(default_factory=list)
    frozen: bool = False
    leases: dict[int, str] = field(default_factory=dict)

    def pending_ids(self) -> list[int]:
        return sorted(i for i, item in self.items.items() if item.status == STATUS_PENDING)


def load_validation_items(path: str | Path) -> dict[int, ValidationItem]:
    return {int(rec["item_id"]): ValidationItem.from_record(rec) for rec in read_jsonl(path)}


def save_validation_items(items: list[ValidationItem], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(dumps(item.to_record()) + "\n")


def create_app(
    items_path: str | Path,
    annotations_path: str | Path,
    static_dir: str | Path | None = None,
):
    """Build the annotation FastAPI app.

    Verdict writes are serialized under one lock; item handout uses
    check-and-set leases so concurrent annotators never receive the same
    pending item. Existing annotations are replayed on startup so an
    interrupted session resumes where it stopped.
    """
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse
    from pydantic import BaseModel

    items = load_validation_items(items_path)
    state = AnnotationState(items=items)
    annotations_path = Path(annotations_path)
    annotations_path.parent.mkdir(parents=True, exist_ok=True)
    if annotations_path.exists():
        for rec in read_jsonl(annotations_path):
            if rec.get("frozen"):
                state.frozen = True
                continue
            ann = VerdictAnnotation(
                item_id=int(rec["item_id"]),
                verdict=rec["verdict"],
                annotator_id=rec.get("annotator_id", "default"),
                timestamp=float(rec.get("timestamp", 0.0)),
            )
            state.annotations.append(ann)
            if ann.item_id in state.items:
                state.items[ann.item_id].status = STATUS_DONE

    lock = threading.Lock()
    app = FastAPI(title="label-invariance annotation")

    class VerdictPayload(BaseModel):
        item_id: int
        verdict: str
        annotator: str = "default"
        revise: bool = False

    @app.get("/api/next")
    def next_item(annotator: str = "default"):
        with lock:
            for item_id in state.pending_ids():
                holder = state.leases.get(item_id)
                if holder is None or holder == annotator:
                    state.leases[item_id] = annotator
                    return state.items[item_id].client_payload()
        return {"item_id": None}

    @app.post("/api/verdict")
    def post_verdict(payload: VerdictPayload):
        if payload.verdict not in VERDICTS:
            raise HTTPException(status_code=400, detail=f"verdict must be one of {VERDICTS}")
        with lock:
            if state.frozen:
                raise HTTPException(status_code=409, detail="annotation set is frozen")
            item = state.items.get(payload.item_id)
            if item is None:
                raise HTTPException(status_code=404, detail="unknown item")
            if item.status == STATUS_DONE and not payload.revise:
                raise HTTPException(status_code=409, detail="item already annotated")
            ann = VerdictAnnotation(
                item_id=payload.item_id,
                verdict=payload.verdict,
                annotator_id=payload.annotator,
                timestamp=time.time(),
            )
            state.annotations.append(ann)
            item.status = STATUS_DONE
            state.leases.pop(payload.item_id, None)
            with open(annotations_path, "a", encoding="utf-8") as fh:
                fh.write(
                    dumps(
                        {
                            "item_id": ann.item_id,
                            "verdict": ann.verdict,
                            "annotator_id": ann.annotator_id,
                            "timestamp": ann.timestamp,
                        }
                    )
                    + "\n"
                )
        return {"item_id": payload.item_id, "status": STATUS_DONE}

    @app.get("/api/progress")
    def progress():
        with lock:
            per_technique: dict[str, dict[str, int]] = {}
            done = 0
            for item in state.items.values():
                slot = per_technique.setdefault(item.technique_key, {"done": 0, "total": 0})
                slot["total"] += 1
                if item.status == STATUS_DONE:
                    slot["done"] += 1
                    done += 1
            return {
                "total": len(state.items),
                "done": done,
                "pending": len(state.items) - done,
                "frozen": state.frozen,
                "per_technique": per_technique,
            }

    @app.post("/api/freeze")
    def freeze():
        with lock:
            state.frozen = True
            with open(annotations_path, "a", encoding="utf-8") as fh:
                fh.write(dumps({"frozen": True, "timestamp": time.time()}) + "\n")
        return {"frozen": True}

    @app.get("/api/export.csv", response_class=PlainTextResponse)
    def export_csv():
        with lock:
            stats = aggregate_rates(state.annotations, state.items)
        return stats_csv(stats)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    app.state.annotation = state
    return app

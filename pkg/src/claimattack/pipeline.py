"""Experiment stages: ingest -> stats -> index -> attack -> paraphrase ->
score -> select -> retrieve -> evaluate -> report, plus validation
sampling.

Each stage reads its predecessors' stores under the output directory and
appends only missing records (or rewrites its output atomically when
cheap), so re-running any stage with unchanged inputs and seed leaves
byte-identical stores and interrupted runs resume without duplicates.
Every record carries the experiment id and config digest; a store started
under a different experiment aborts the stage instead of mixing records.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

from . import corpus as corpus_mod
from .adversary import MissingVariantsError, ScoredVariant, select_oracle
from .annotation import sample_validation_set, save_validation_items
from .config import ConfigError, ExperimentConfig
from .corpus import ClaimRecord, PageStore, claim_to_record, record_to_claim
from .generation import (
    ATTACK_PARAPHRASE,
    ATTACK_PERSUASION,
    FLAG_NOOP,
    HttpChatClient,
    MockChatClient,
    generate_paraphrases,
    generate_variants,
)
from .lexical import (
    ATTACK_CHAR_NOISE,
    ATTACK_SYNONYM,
    ATTACK_WORD_SWAP,
    AttackInapplicable,
    PerturbationConfig,
    char_perturb,
    synonym_substitute,
    word_swap,
)
from .metrics import EvalRow, UndefinedMetricError, accuracy, asr_split, macro_f1, roc_auc
from .pos import HeuristicTagger
from .rng import derive_seed
from .retrieval import build_index, load_corpus, load_index, recall_at_k, save_index
from .scoring import (
    CachingScorer,
    HttpScoreClient,
    ScoreCache,
    ScoringError,
    StubScorer,
    StubScorerSpec,
    assemble_request,
)
from .stores import AppendStore, dumps, load_jsonl, write_jsonl
from .taxonomy import PromptTemplates, Technique, included_techniques, load_taxonomy
from .wordnet import SynonymLexicon

LEXICAL_KINDS = (ATTACK_SYNONYM, ATTACK_WORD_SWAP, ATTACK_CHAR_NOISE)
BASELINE_KINDS = (*LEXICAL_KINDS, ATTACK_PARAPHRASE)


class StageInputError(Exception):
    """A predecessor stage has not produced its store yet."""


@dataclass
class Paths:
    out: Path

    @property
    def claims(self) -> Path:
        return self.out / "corpus" / "claims.jsonl"

    @property
    def issues(self) -> Path:
        return self.out / "corpus" / "issues.jsonl"

    @property
    def stats(self) -> Path:
        return self.out / "corpus" / "stats.txt"

    @property
    def index(self) -> Path:
        return self.out / "index.bin"

    @property
    def variants(self) -> Path:
        return self.out / "variants.jsonl"

    @property
    def scores(self) -> Path:
        return self.out / "scores.jsonl"

    @property
    def score_cache(self) -> Path:
        return self.out / "score_cache.jsonl"

    @property
    def selections(self) -> Path:
        return self.out / "selections.jsonl"

    @property
    def retrieval(self) -> Path:
        return self.out / "retrieval.jsonl"

    @property
    def coverage(self) -> Path:
        return self.out / "coverage.json"

    @property
    def evaluation(self) -> Path:
        return self.out / "evaluation.json"

    @property
    def reports(self) -> Path:
        return self.out / "reports"

    @property
    def validation_items(self) -> Path:
        return self.out / "validation" / "items.jsonl"

    @property
    def validation_annotations(self) -> Path:
        return self.out / "validation" / "annotations.jsonl"

    @property
    def validation_stats(self) -> Path:
        return self.out / "validation" / "stats.csv"


class Experiment:
    """Shared context for stage execution."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.paths = Paths(Path(cfg.out_dir))
        self.experiment_id = cfg.experiment_id()
        self.config_digest = cfg.digest()
        self._taxonomy: list[Technique] | None = None
        self._templates: PromptTemplates | None = None

    # --- shared resources ---------------------------------------------------

    @property
    def taxonomy(self) -> list[Technique]:
        if self._taxonomy is None:
            self._taxonomy = load_taxonomy(self.cfg.taxonomy_path)
        return self._taxonomy

    @property
    def templates(self) -> PromptTemplates:
        if self._templates is None:
            self._templates = PromptTemplates.load(self.cfg.prompts_dir)
        return self._templates

    def attack_techniques(self) -> list[Technique]:
        if self.cfg.attacks.persuasion == "all":
            return list(self.taxonomy)
        return included_techniques(self.taxonomy)

    def provenance(self) -> dict:
        return {"experiment_id": self.experiment_id, "config_digest": self.config_digest}

    def stamp(self, record: dict) -> dict:
        record.update(self.provenance())
        return record

    def open_store(self, path: Path, key_fn) -> AppendStore:
        store = AppendStore(path, key_fn)
        for rec in store.records()[:1]:
            if rec.get("experiment_id") not in (None, self.experiment_id):
                raise StageInputError(
                    f"{path} belongs to experiment {rec.get('experiment_id')}, "
                    f"not {self.experiment_id}; use a fresh --out directory"
                )
        return store

    def require(self, path: Path, producer: str) -> Path:
        if not path.exists():
            raise StageInputError(f"missing {path}; run the '{producer}' stage first")
        return path

    def load_claims(self) -> list[ClaimRecord]:
        self.require(self.paths.claims, "ingest")
        return [record_to_claim(rec) for rec in load_jsonl(self.paths.claims)]

    def test_claims(self) -> list[ClaimRecord]:
        return [c for c in self.load_claims() if c.split == "test"]

    def uid(self, claim: ClaimRecord) -> str:
        return f"{claim.dataset}/{claim.id}"

    def update_coverage(self, stage: str, data: dict) -> None:
        coverage = {}
        if self.paths.coverage.exists():
            coverage = json.loads(self.paths.coverage.read_text(encoding="utf-8"))
        coverage[stage] = data
        self.paths.coverage.parent.mkdir(parents=True, exist_ok=True)
        self.paths.coverage.write_text(
            json.dumps(coverage, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )

    def coverage_data(self) -> dict:
        if self.paths.coverage.exists():
            return json.loads(self.paths.coverage.read_text(encoding="utf-8"))
        return {}


# --- ingest / stats / index --------------------------------------------------


def stage_ingest(exp: Experiment) -> None:
    cfg = exp.cfg
    page_store = PageStore.load(cfg.page_store) if cfg.page_store else None
    issues: list[corpus_mod.IngestIssue] = []
    records: list[dict] = []
    for name in sorted(cfg.datasets):
        ds = cfg.datasets[name]
        for split, file in ds.files.items():
            if file and not Path(file).exists():
                raise StageInputError(f"dataset file missing: {file}")
        if ds.format == "fever":
            for split in ("train", "dev", "test"):
                file = ds.files.get(split)
                if not file:
                    continue
                for claim in corpus_mod.ingest_fever(
                    file, split=split, dataset=name, page_store=page_store, issues=issues
                ):
                    records.append(exp.stamp(claim_to_record(claim)))
        else:
            if "train" not in ds.files or "dev" not in ds.files:
                raise StageInputError(f"dataset {name} needs train and dev files")
            for claim in corpus_mod.ingest_feverous(
                ds.files["train"],
                ds.files["dev"],
                dataset=name,
                page_store=page_store,
                seed=cfg.seed,
                dev_counts=ds.dev_counts,
                dev_fraction=ds.dev_fraction,
                issues=issues,
            ):
                records.append(exp.stamp(claim_to_record(claim)))
    write_jsonl(exp.paths.claims, records)
    write_jsonl(
        exp.paths.issues,
        [{"file": i.file, "line": i.line, "reason": i.reason} for i in issues],
    )
    exp.update_coverage("ingest", {"claims": len(records), "issues": len(issues)})


def stage_stats(exp: Experiment) -> str:
    claims = exp.load_claims()
    stats = corpus_mod.compute_stats(claims)
    lines = []
    for (dataset, split) in sorted(stats):
        s = stats[(dataset, split)]
        prefix = f"{dataset}.{split}"
        lines.append(f"{prefix}.true_count {s.true_count}")
        lines.append(f"{prefix}.false_count {s.false_count}")
        lines.append(f"{prefix}.avg_claim_tokens {s.avg_claim_tokens:.4f}")
        lines.append(f"{prefix}.avg_gold_evidence {s.avg_gold_evidence:.4f}")
    text = "\n".join(lines) + "\n"
    exp.paths.stats.parent.mkdir(parents=True, exist_ok=True)
    exp.paths.stats.write_text(text, encoding="utf-8")
    return text


def stage_index(exp: Experiment) -> None:
    cfg = exp.cfg
    if not cfg.retrieval.corpus:
        raise StageInputError("config sets no retrieval.corpus file")
    exp.require(Path(cfg.retrieval.corpus), "ingest")
    index = build_index(load_corpus(cfg.retrieval.corpus), k1=cfg.retrieval.k1, b=cfg.retrieval.b)
    save_index(index, exp.paths.index)


# --- attack / paraphrase ------------------------------------------------------


def _variant_key(rec: dict) -> tuple:
    return (rec["dataset"], rec["claim_id"], rec["attack_kind"], rec.get("technique_key"))


def _lexical_record(exp: Experiment, claim: ClaimRecord, result) -> dict:
    ratio = len(result.text) / len(claim.text) if claim.text else 0.0
    return exp.stamp(
        {
            "claim_id": claim.id,
            "dataset": claim.dataset,
            "attack_kind": result.kind,
            "technique_key": None,
            "text": result.text,
            "length_ratio": ratio,
            "flags": [FLAG_NOOP] if result.noop else [],
            "n_edits": result.n_edits,
            "retries": 0,
            "generator": {"model": f"rule:{result.kind}", "temperature": 0.0},
            "timestamp": time.time(),
        }
    )


def _generated_record(exp: Experiment, claim: ClaimRecord, record) -> dict:
    cfg = exp.cfg.generator
    model = MockChatClient.model_name if cfg.mode == "mock" else cfg.model_name
    return exp.stamp(
        {
            "claim_id": claim.id,
            "dataset": claim.dataset,
            "attack_kind": record.attack_kind,
            "technique_key": record.technique_key,
            "text": record.text,
            "length_ratio": record.length_ratio,
            "flags": list(record.flags),
            "retries": record.retries,
            "generator": {"model": model, "temperature": cfg.temperature},
            "timestamp": time.time(),
        }
    )


def make_chat_client(cfg: ExperimentConfig):
    if cfg.generator.mode == "mock":
        return MockChatClient()
    if not cfg.generator.endpoint_url:
        raise ConfigError("generator.mode=http requires generator.endpoint_url")
    return HttpChatClient(cfg.generator)


def stage_attack(exp: Experiment) -> None:
    cfg = exp.cfg
    claims = exp.test_claims()
    store = exp.open_store(exp.paths.variants, _variant_key)
    inapplicable = {kind: 0 for kind in LEXICAL_KINDS}
    failed_generations = 0

    lexicon = None
    tagger = None
    if ATTACK_SYNONYM in cfg.attacks.lexical:
        if not cfg.attacks.wordnet_dir:
            raise StageInputError("synonym attack needs attacks.wordnet_dir in the config")
        lexicon = SynonymLexicon.load(cfg.attacks.wordnet_dir)
        tagger = HeuristicTagger(lexicon)

    client = make_chat_client(cfg)
    techniques = exp.attack_techniques()

    for claim in claims:
        uid = exp.uid(claim)
        for kind in cfg.attacks.lexical:
            if (claim.dataset, claim.id, kind, None) in store:
                continue
            pcfg = PerturbationConfig(rate=cfg.attacks.rate, seed=derive_seed(cfg.seed, uid, kind))
            try:
                if kind == ATTACK_SYNONYM:
                    result = synonym_substitute(claim.text, lexicon, tagger, pcfg)
                elif kind == ATTACK_WORD_SWAP:
                    result = word_swap(claim.text, pcfg)
                elif kind == ATTACK_CHAR_NOISE:
                    result = char_perturb(claim.text, pcfg)
                else:
                    raise ConfigError(f"unknown lexical attack {kind!r}")
            except AttackInapplicable:
                inapplicable[kind] += 1
                continue
            store.append(_lexical_record(exp, claim, result))

        todo = [
            t for t in techniques
            if (claim.dataset, claim.id, ATTACK_PERSUASION, t.key) not in store
        ]
        if todo:
            variant_set = generate_variants(
                claim, todo, client, exp.templates, parallelism=cfg.generator.parallelism
            )
            for technique in todo:
                record = variant_set.variants[technique.key]
                if record.failed:
                    failed_generations += 1
                store.append(_generated_record(exp, claim, record))

    exp.update_coverage(
        "attack",
        {
            "claims": len(claims),
            "inapplicable": inapplicable,
            "failed_generations": failed_generations,
        },
    )


def stage_paraphrase(exp: Experiment) -> None:
    cfg = exp.cfg
    claims = exp.test_claims()
    store = exp.open_store(exp.paths.variants, _variant_key)
    todo = [c for c in claims if (c.dataset, c.id, ATTACK_PARAPHRASE, None) not in store]
    client = make_chat_client(cfg)
    records = generate_paraphrases(
        todo, client, exp.templates, parallelism=cfg.generator.parallelism
    )
    failed = 0
    for claim, record in zip(todo, records):
        if record.failed:
            failed += 1
        store.append(_generated_record(exp, claim, record))
    exp.update_coverage("paraphrase", {"claims": len(claims), "failed_generations": failed})


# --- score / select -----------------------------------------------------------


def _score_key(rec: dict) -> tuple:
    return (
        rec["dataset"],
        rec["claim_id"],
        rec["attack_kind"],
        rec.get("technique_key"),
        rec["condition"],
    )


def make_scorer(exp: Experiment, condition: str) -> CachingScorer:
    cfg = exp.cfg.scorers[condition]
    cache = ScoreCache(exp.paths.score_cache)
    if cfg.stub:
        scorer = StubScorer(StubScorerSpec.parse(cfg.stub))
    else:
        scorer = HttpScoreClient(cfg.endpoint, model_id=cfg.model_id)
    return CachingScorer(scorer, cache, cfg.model_id)


def stage_score(exp: Experiment) -> None:
    cfg = exp.cfg
    claims = exp.test_claims()
    exp.require(exp.paths.variants, "attack")
    variants = load_jsonl(exp.paths.variants)
    store = exp.open_store(exp.paths.scores, _score_key)
    unscorable = 0

    by_claim: dict[tuple[str, str], list[dict]] = {}
    for var in variants:
        if var["text"]:
            by_claim.setdefault((var["dataset"], var["claim_id"]), []).append(var)

    for condition in cfg.conditions():
        scorer = make_scorer(exp, condition)
        for claim in claims:
            texts = [("none", None, claim.text)]
            for var in by_claim.get((claim.dataset, claim.id), []):
                texts.append((var["attack_kind"], var.get("technique_key"), var["text"]))
            for attack_kind, technique_key, text in texts:
                key = (claim.dataset, claim.id, attack_kind, technique_key, condition)
                if key in store:
                    continue
                try:
                    request = assemble_request(claim, condition, text=text)
                except ScoringError:
                    unscorable += 1
                    continue
                resp = scorer.score(request)
                store.append(
                    exp.stamp(
                        {
                            "claim_id": claim.id,
                            "dataset": claim.dataset,
                            "attack_kind": attack_kind,
                            "technique_key": technique_key,
                            "condition": condition,
                            "p_true": resp.p_true,
                            "model_id": resp.model_id,
                            "gold": claim.label,
                        }
                    )
                )
    exp.update_coverage("score", {"unscorable_requests": unscorable})


def _selection_key(rec: dict) -> tuple:
    return (rec["dataset"], rec["claim_id"], rec["evidence_condition"], rec["policy"])


def stage_select(exp: Experiment) -> None:
    cfg = exp.cfg
    exp.require(exp.paths.scores, "score")
    scores = load_jsonl(exp.paths.scores)
    taxonomy = {t.key: t for t in exp.taxonomy}
    included = {t.key for t in included_techniques(exp.taxonomy)}
    include_baselines = cfg.oracle_pool == "persuasion+baselines"
    store = exp.open_store(exp.paths.selections, _selection_key)
    skipped = 0

    pools: dict[tuple[str, str, str], list[ScoredVariant]] = {}
    golds: dict[tuple[str, str], bool] = {}
    for row in scores:
        golds[(row["dataset"], row["claim_id"])] = bool(row["gold"])
        kind = row["attack_kind"]
        is_pool_member = (
            kind == ATTACK_PERSUASION and row.get("technique_key") in included
        ) or (include_baselines and kind in BASELINE_KINDS)
        if not is_pool_member:
            continue
        technique = taxonomy.get(row.get("technique_key") or "")
        candidate = ScoredVariant.build(
            claim_id=row["claim_id"],
            attack_kind=kind,
            text="",
            p_true=row["p_true"],
            gold=bool(row["gold"]),
            evidence_condition=row["condition"],
            technique_key=row.get("technique_key"),
            technique_ordinal=technique.ordinal if technique else None,
        )
        pools.setdefault((row["dataset"], row["condition"], row["claim_id"]), []).append(candidate)

    claim_keys = sorted({(ds, cond) for ds, cond, _ in pools})
    for ds, cond in claim_keys:
        claim_ids = sorted(cid for d, c, cid in pools if d == ds and c == cond)
        for cid in claim_ids:
            if (ds, cid, cond, "oracle") in store:
                continue
            try:
                selection = select_oracle(pools[(ds, cond, cid)], golds[(ds, cid)])
            except MissingVariantsError:
                skipped += 1
                continue
            chosen = selection.chosen
            store.append(
                exp.stamp(
                    {
                        "claim_id": cid,
                        "dataset": ds,
                        "policy": "oracle",
                        "evidence_condition": cond,
                        "attack_kind": chosen.attack_kind,
                        "technique_key": chosen.technique_key,
                        "p_true": chosen.p_true,
                        "loss": chosen.loss,
                    }
                )
            )
    exp.update_coverage("select", {"claims_without_candidates": skipped})


# --- retrieve ------------------------------------------------------------------


def _retrieval_key(rec: dict) -> tuple:
    return (rec["dataset"], rec["claim_id"], rec["attack_kind"])


def stage_retrieve(exp: Experiment) -> None:
    cfg = exp.cfg
    exp.require(exp.paths.index, "index")
    exp.require(exp.paths.variants, "attack")
    index = load_index(exp.paths.index)
    claims = exp.test_claims()
    variants = load_jsonl(exp.paths.variants)
    selections = load_jsonl(exp.paths.selections) if exp.paths.selections.exists() else []
    store = exp.open_store(exp.paths.retrieval, _retrieval_key)
    k_max = max(cfg.retrieval.k)
    skipped_empty_gold = 0

    text_by_variant: dict[tuple[str, str, str, str | None], str] = {}
    for var in variants:
        if var["text"]:
            text_by_variant[
                (var["dataset"], var["claim_id"], var["attack_kind"], var.get("technique_key"))
            ] = var["text"]

    oracle_text: dict[tuple[str, str], str] = {}
    oracle_condition = "gold_evidence" if "gold_evidence" in cfg.conditions() else (
        cfg.conditions()[0] if cfg.conditions() else None
    )
    for sel in selections:
        if sel["evidence_condition"] != oracle_condition:
            continue
        text = text_by_variant.get(
            (sel["dataset"], sel["claim_id"], sel["attack_kind"], sel.get("technique_key"))
        )
        if text:
            oracle_text[(sel["dataset"], sel["claim_id"])] = text

    for claim in claims:
        if not claim.gold_pages:
            skipped_empty_gold += 1
            continue
        queries: list[tuple[str, str]] = [("none", claim.text)]
        for kind in (*LEXICAL_KINDS, ATTACK_PARAPHRASE):
            text = text_by_variant.get((claim.dataset, claim.id, kind, None))
            if text:
                queries.append((kind, text))
        for technique in exp.attack_techniques():
            text = text_by_variant.get(
                (claim.dataset, claim.id, ATTACK_PERSUASION, technique.key)
            )
            if text:
                queries.append((f"technique:{technique.key}", text))
        sel_text = oracle_text.get((claim.dataset, claim.id))
        if sel_text:
            queries.append(("persuasion_oracle", sel_text))
        for label, text in queries:
            if (claim.dataset, claim.id, label) in store:
                continue
            result = index.retrieve(text, k_max, claim_id=claim.id)
            store.append(
                exp.stamp(
                    {
                        "claim_id": claim.id,
                        "dataset": claim.dataset,
                        "attack_kind": label,
                        "k": k_max,
                        "pages": list(result.page_ids),
                        "scores": [s for _, s in result.ranked_pages],
                    }
                )
            )
    exp.update_coverage("retrieve", {"claims_skipped_empty_gold": skipped_empty_gold})


# --- evaluate / report -----------------------------------------------------------


def _rows_from_scores(rows: list[dict]) -> list[EvalRow]:
    return [
        EvalRow(
            claim_id=r["claim_id"],
            gold=bool(r["gold"]),
            p_true=float(r["p_true"]),
            condition=r["condition"],
            attack_kind=r["attack_kind"],
            technique_key=r.get("technique_key"),
        )
        for r in rows
    ]


def _classification_cell(rows: list[EvalRow], baseline_acc: float | None) -> dict:
    cell: dict = {"n": len(rows)}
    cell["acc"] = accuracy(rows)
    cell["f1"] = macro_f1(rows)
    try:
        cell["auc"] = roc_auc(rows)
    except UndefinedMetricError:
        cell["auc"] = None
    cell["delta_acc"] = None if baseline_acc is None else cell["acc"] - baseline_acc
    return cell


def stage_evaluate(exp: Experiment) -> dict:
    cfg = exp.cfg
    exp.require(exp.paths.scores, "score")
    claims = exp.test_claims()
    scores = load_jsonl(exp.paths.scores)
    selections = load_jsonl(exp.paths.selections) if exp.paths.selections.exists() else []
    retrieval_rows = load_jsonl(exp.paths.retrieval) if exp.paths.retrieval.exists() else []
    included = {t.key for t in included_techniques(exp.taxonomy)}
    datasets = sorted(cfg.datasets)
    conditions = cfg.conditions()

    evaluation: dict = {
        "datasets": datasets,
        "conditions": conditions,
        "classification": {},
        "asr": {},
        "technique_easr": {},
        "retrieval": {},
        "provenance": {
            "experiment": cfg.name,
            "seed": cfg.seed,
            "scorers": {c: cfg.scorers[c].model_id for c in conditions},
            **exp.provenance(),
        },
    }

    by_cell: dict[tuple[str, str, str, str | None], list[dict]] = {}
    for row in scores:
        key = (row["dataset"], row["condition"], row["attack_kind"], row.get("technique_key"))
        by_cell.setdefault(key, []).append(row)

    for ds in datasets:
        for cond in conditions:
            originals = _rows_from_scores(by_cell.get((ds, cond, "none", None), []))
            if not originals:
                continue
            base_cell = _classification_cell(originals, None)
            evaluation["classification"][f"{ds}|{cond}|none"] = base_cell
            base_acc = base_cell["acc"]

            for kind in BASELINE_KINDS:
                rows = _rows_from_scores(by_cell.get((ds, cond, kind, None), []))
                if rows:
                    evaluation["classification"][f"{ds}|{cond}|{kind}"] = _classification_cell(
                        rows, base_acc
                    )

            pooled: list[EvalRow] = []
            for key, cell_rows in by_cell.items():
                if key[0] == ds and key[1] == cond and key[2] == ATTACK_PERSUASION:
                    technique_rows = _rows_from_scores(cell_rows)
                    easr = asr_split(originals, technique_rows)
                    evaluation["technique_easr"][f"{ds}|{cond}|{key[3]}"] = easr["evasion"]
                    if key[3] in included:
                        pooled.extend(technique_rows)
            if pooled:
                pooled.sort(key=lambda r: (r.claim_id, r.technique_key or ""))
                evaluation["classification"][f"{ds}|{cond}|persuasion_blind"] = (
                    _classification_cell(pooled, base_acc)
                )
                evaluation["asr"][f"{ds}|{cond}|blind_pooled"] = asr_split(originals, pooled)

            golds = {r.claim_id: r.gold for r in originals}
            oracle_rows = _rows_from_scores(
                [
                    {**sel, "condition": cond, "attack_kind": "persuasion_oracle",
                     "gold": golds[sel["claim_id"]]}
                    for sel in selections
                    if sel["dataset"] == ds
                    and sel["evidence_condition"] == cond
                    and sel["claim_id"] in golds
                ]
            )
            if oracle_rows:
                evaluation["classification"][f"{ds}|{cond}|persuasion_oracle"] = (
                    _classification_cell(oracle_rows, base_acc)
                )
                evaluation["asr"][f"{ds}|{cond}|oracle"] = asr_split(originals, oracle_rows)

    _evaluate_retrieval(exp, evaluation, claims, retrieval_rows, included)
    evaluation["coverage"] = _flatten_coverage(exp.coverage_data())
    exp.paths.evaluation.write_text(
        json.dumps(evaluation, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    return evaluation


def _evaluate_retrieval(
    exp: Experiment,
    evaluation: dict,
    claims: list[ClaimRecord],
    retrieval_rows: list[dict],
    included: set[str],
) -> None:
    cfg = exp.cfg
    gold_pages = {
        (c.dataset, c.id): set(c.gold_pages) for c in claims if c.gold_pages
    }
    by_label: dict[tuple[str, str], list[dict]] = {}
    for row in retrieval_rows:
        if (row["dataset"], row["claim_id"]) not in gold_pages:
            continue
        by_label.setdefault((row["dataset"], row["attack_kind"]), []).append(row)

    def label_cell(rows: list[dict]) -> dict:
        recalls: dict[str, float] = {}
        allfound: dict[str, float] = {}
        for k in cfg.retrieval.k:
            vals = []
            hits = []
            for row in rows:
                gold = gold_pages[(row["dataset"], row["claim_id"])]
                top = set(row["pages"][:k])
                vals.append(len(gold & top) / len(gold))
                hits.append(1.0 if gold <= top else 0.0)
            recalls[str(k)] = sum(vals) / len(vals)
            allfound[str(k)] = sum(hits) / len(hits)
        return {"recall": recalls, "all_found": allfound, "n": len(rows)}

    for (ds, label), rows in sorted(by_label.items()):
        evaluation["retrieval"][f"{ds}|{label}"] = label_cell(rows)

    # Blind pooled curve: every (claim, included technique) row with equal weight.
    datasets = {ds for ds, _ in by_label}
    for ds in sorted(datasets):
        pooled = []
        for (row_ds, label), rows in by_label.items():
            if row_ds == ds and label.startswith("technique:") and label.split(":", 1)[1] in included:
                pooled.extend(rows)
        if pooled:
            evaluation["retrieval"][f"{ds}|persuasion_blind"] = label_cell(pooled)


def _flatten_coverage(coverage: dict) -> dict:
    flat = {}
    for stage, data in coverage.items():
        for key, value in data.items():
            if isinstance(value, dict):
                for sub, v in value.items():
                    flat[f"{stage}.{key}.{sub}"] = v
            else:
                flat[f"{stage}.{key}"] = value
    return flat


def stage_report(exp: Experiment, plots: bool = False) -> Path:
    from .reports import build_reports, render_plots, write_reports

    exp.require(exp.paths.evaluation, "evaluate")
    evaluation = json.loads(exp.paths.evaluation.read_text(encoding="utf-8"))
    bundle = build_reports(evaluation, exp.taxonomy)
    write_reports(bundle, exp.paths.reports)
    if plots:
        render_plots(bundle, exp.paths.reports)
    return exp.paths.reports


def stage_validate_sample(exp: Experiment) -> tuple[int, list[str]]:
    cfg = exp.cfg
    exp.require(exp.paths.variants, "attack")
    claims = {(c.dataset, c.id): c for c in exp.test_claims()}
    variants = [v for v in load_jsonl(exp.paths.variants) if v["attack_kind"] == ATTACK_PERSUASION]
    technique_keys = [t.key for t in exp.taxonomy]
    items, shortfalls = sample_validation_set(
        variants,
        claims,
        n_per_technique=cfg.validation_per_technique,
        seed=cfg.seed,
        technique_keys=technique_keys,
    )
    save_validation_items(items, exp.paths.validation_items)
    exp.update_coverage(
        "validate_sample", {"items": len(items), "shortfalls": len(shortfalls)}
    )
    return len(items), shortfalls


STAGES = (
    "ingest",
    "stats",
    "index",
    "attack",
    "paraphrase",
    "score",
    "select",
    "retrieve",
    "evaluate",
    "report",
)


def run_stage(exp: Experiment, stage: str, **kwargs) -> None:
    fn = {
        "ingest": stage_ingest,
        "stats": stage_stats,
        "index": stage_index,
        "attack": stage_attack,
        "paraphrase": stage_paraphrase,
        "score": stage_score,
        "select": stage_select,
        "retrieve": stage_retrieve,
        "evaluate": stage_evaluate,
        "report": stage_report,
        "validate-sample": stage_validate_sample,
    }[stage]
    fn(exp, **kwargs)


def run_all(exp: Experiment, plots: bool = False) -> None:
    for stage in STAGES:
        if stage == "report":
            stage_report(exp, plots=plots)
        else:
            run_stage(exp, stage)


def bundle_digest(reports_dir: str | Path) -> str:
    """Order-independent digest of the report bundle files."""
    import hashlib

    reports_dir = Path(reports_dir)
    h = hashlib.sha256()
    for path in sorted(reports_dir.glob("*.csv")) + sorted(reports_dir.glob("*.txt")):
        h.update(path.name.encode("utf-8"))
        h.update(b"\x00")
        h.update(path.read_bytes())
        h.update(b"\x00")
    return h.hexdigest()

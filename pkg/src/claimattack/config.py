"""Experiment configuration.

A single YAML document describes an experiment: dataset files, taxonomy
and prompt locations, attack settings, generator and scorer endpoints (or
stubs), retrieval parameters, and the seed. Relative paths resolve
against the config file's directory. Environment variables override
endpoint URLs only:

    CLAIMATTACK_GENERATOR_URL
    CLAIMATTACK_SCORER_URL_CLAIM_ONLY
    CLAIMATTACK_SCORER_URL_GOLD_EVIDENCE

The canonical JSON rendering of the loaded config is hashed into the
config digest; together with the seed it forms the experiment id stamped
onto every output record.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .generation import GeneratorConfig


class ConfigError(Exception):
    pass


@dataclass
class DatasetConfig:
    format: str  # "fever" | "feverous"
    files: dict[str, str]
    dev_fraction: float | None = None
    dev_counts: tuple[int, int] | None = None

    def __post_init__(self):
        if self.format not in ("fever", "feverous"):
            raise ConfigError(f"unknown dataset format {self.format!r}")


@dataclass
class ScorerConfig:
    stub: str | None = None  # "overlap" | "constant:p" | "keyed:path"
    endpoint: str | None = None
    model_id: str = ""

    def __post_init__(self):
        if (self.stub is None) == (self.endpoint is None):
            raise ConfigError("scorer needs exactly one of stub / endpoint")
        if not self.model_id:
            self.model_id = f"stub:{self.stub}" if self.stub else "remote"


@dataclass
class AttackConfig:
    lexical: tuple[str, ...] = ("synonym", "word_swap", "char_noise")
    persuasion: str = "included"  # "included" | "all"
    rate: float = 0.10
    wordnet_dir: str | None = None


@dataclass
class RetrievalConfig:
    corpus: str | None = None
    k: tuple[int, ...] = (3, 5, 7, 10)
    k1: float = 0.9
    b: float = 0.4


@dataclass
class ExperimentConfig:
    name: str
    seed: int
    datasets: dict[str, DatasetConfig]
    page_store: str | None = None
    taxonomy_path: str | None = None
    prompts_dir: str | None = None
    attacks: AttackConfig = field(default_factory=AttackConfig)
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    scorers: dict[str, ScorerConfig] = field(default_factory=dict)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    oracle_pool: str = "persuasion"  # or "persuasion+baselines"
    validation_per_technique: int = 30
    out_dir: str = "out"
    source_text: str = ""  # raw config file text; basis of the digest

    def digest(self) -> str:
        """Identity of the experiment definition.

        Hashes the config file as written (relative paths and all) so the
        digest is independent of the checkout location and the chosen
        output directory.
        """
        if self.source_text:
            basis = self.source_text
        else:
            data = _as_jsonable(self)
            data.pop("out_dir", None)
            data.pop("source_text", None)
            basis = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(basis.encode("utf-8")).hexdigest()[:12]

    def experiment_id(self) -> str:
        raw = f"{self.digest()}:{self.seed}"
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:12]

    def conditions(self) -> list[str]:
        order = ("claim_only", "gold_evidence")
        return [c for c in order if c in self.scorers]


def _as_jsonable(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _as_jsonable(getattr(obj, k)) for k in sorted(obj.__dataclass_fields__)}
    if isinstance(obj, dict):
        return {k: _as_jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_as_jsonable(v) for v in obj]
    return obj


def _resolve(base: Path, value: str | None) -> str | None:
    if value is None:
        return None
    path = Path(value)
    return str(path if path.is_absolute() else (base / path))


def load_config(path: str | Path, *, seed: int | None = None, out: str | None = None) -> ExperimentConfig:
    """Load, path-resolve, and env-override an experiment config."""
    path = Path(path)
    try:
        source_text = path.read_text(encoding="utf-8")
        raw = yaml.safe_load(source_text)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    base = path.parent

    datasets = {}
    for name, block in (raw.get("datasets") or {}).items():
        files = {
            split: _resolve(base, file) for split, file in (block.get("files") or {}).items()
        }
        dev_counts = block.get("dev_counts")
        datasets[name] = DatasetConfig(
            format=block.get("format", "fever"),
            files=files,
            dev_fraction=block.get("dev_fraction"),
            dev_counts=tuple(dev_counts) if dev_counts else None,
        )
    if not datasets:
        raise ConfigError("config defines no datasets")

    attacks_raw = raw.get("attacks") or {}
    attacks = AttackConfig(
        lexical=tuple(attacks_raw.get("lexical", ("synonym", "word_swap", "char_noise"))),
        persuasion=attacks_raw.get("persuasion", "included"),
        rate=float(attacks_raw.get("rate", 0.10)),
        wordnet_dir=_resolve(base, attacks_raw.get("wordnet_dir")),
    )

    gen_raw = raw.get("generator") or {}
    generator = GeneratorConfig(
        endpoint_url=os.environ.get("CLAIMATTACK_GENERATOR_URL", gen_raw.get("endpoint_url", "")),
        model_name=gen_raw.get("model_name", "mock-rewriter"),
        temperature=float(gen_raw.get("temperature", 0.0)),
        max_tokens=int(gen_raw.get("max_tokens", 128)),
        max_retries=int(gen_raw.get("max_retries", 3)),
        parallelism=int(gen_raw.get("parallelism", 1)),
        timeout=float(gen_raw.get("timeout", 30.0)),
        backoff_base=float(gen_raw.get("backoff_base", 0.5)),
        mode=gen_raw.get("mode", "mock"),
    )

    scorers = {}
    for condition, block in (raw.get("scorers") or {}).items():
        endpoint = block.get("endpoint")
        env_key = f"CLAIMATTACK_SCORER_URL_{condition.upper()}"
        endpoint = os.environ.get(env_key, endpoint)
        stub = block.get("stub")
        if endpoint:
            stub = None
        scorers[condition] = ScorerConfig(
            stub=stub, endpoint=endpoint, model_id=block.get("model_id", "")
        )

    retr_raw = raw.get("retrieval") or {}
    retrieval = RetrievalConfig(
        corpus=_resolve(base, retr_raw.get("corpus")),
        k=tuple(int(k) for k in retr_raw.get("k", (3, 5, 7, 10))),
        k1=float(retr_raw.get("k1", 0.9)),
        b=float(retr_raw.get("b", 0.4)),
    )

    validation_raw = raw.get("validation") or {}
    cfg = ExperimentConfig(
        name=str(raw.get("experiment", path.stem)),
        seed=int(seed if seed is not None else raw.get("seed", 0)),
        datasets=datasets,
        page_store=_resolve(base, raw.get("page_store")),
        taxonomy_path=_resolve(base, raw.get("taxonomy")),
        prompts_dir=_resolve(base, raw.get("prompts")),
        attacks=attacks,
        generator=generator,
        scorers=scorers,
        retrieval=retrieval,
        oracle_pool=raw.get("oracle_pool", "persuasion"),
        validation_per_technique=int(validation_raw.get("per_technique", 30)),
        out_dir=out if out is not None else _resolve(base, raw.get("out", "out")),
        source_text=source_text,
    )
    return cfg

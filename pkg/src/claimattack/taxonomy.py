"""Persuasion technique catalogue and prompt rendering.

The 23 techniques, their 6 rhetorical categories, and the post-validation
inclusion status ship as package data; both the rewrite prompt and the
paraphrase prompt are stored as plain text templates with literal
``{PLACEHOLDER}`` markers that are substituted verbatim (no escaping, no
format-string semantics), so rendering is a pure function of its inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

CATEGORIES = (
    "AttackOnReputation",
    "Justification",
    "Distraction",
    "Simplification",
    "Call",
    "ManipulativeWording",
)

TECHNIQUE_COUNT = 23
INCLUDED_COUNT = 15


class TaxonomyError(Exception):
    pass


@dataclass(frozen=True)
class Technique:
    key: str
    name: str
    category: str
    definition: str
    fewshot: tuple[str, str]
    status: str  # "included" | "excluded"
    ordinal: int

    @property
    def included(self) -> bool:
        return self.status == "included"


def _default_path(name: str) -> Path:
    return Path(str(resources.files("claimattack").joinpath("data", name)))


def load_taxonomy(definitions_file: str | Path | None = None) -> list[Technique]:
    """Load and validate the technique catalogue.

    Fails loudly when the file does not describe exactly 23 techniques in
    6 categories with 15 included and unique ordinals; a partial taxonomy
    would silently skew every pooled metric downstream.
    """
    path = Path(definitions_file) if definitions_file else _default_path("taxonomy.jsonl")
    techniques: list[Technique] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            fewshot = tuple(rec["fewshot"])
            if len(fewshot) != 2:
                raise TaxonomyError(f"technique {rec['key']!r} needs exactly 2 few-shot examples")
            if rec["category"] not in CATEGORIES:
                raise TaxonomyError(f"unknown category {rec['category']!r}")
            if rec["status"] not in ("included", "excluded"):
                raise TaxonomyError(f"unknown status {rec['status']!r}")
            techniques.append(
                Technique(
                    key=rec["key"],
                    name=rec["name"],
                    category=rec["category"],
                    definition=rec["definition"],
                    fewshot=fewshot,  # type: ignore[arg-type]
                    status=rec["status"],
                    ordinal=int(rec["ordinal"]),
                )
            )
    if len(techniques) != TECHNIQUE_COUNT:
        raise TaxonomyError(f"expected {TECHNIQUE_COUNT} techniques, found {len(techniques)}")
    categories = {t.category for t in techniques}
    if len(categories) != len(CATEGORIES):
        raise TaxonomyError(f"expected {len(CATEGORIES)} categories, found {len(categories)}")
    included = sum(1 for t in techniques if t.included)
    if included != INCLUDED_COUNT:
        raise TaxonomyError(f"expected {INCLUDED_COUNT} included techniques, found {included}")
    ordinals = {t.ordinal for t in techniques}
    if len(ordinals) != len(techniques):
        raise TaxonomyError("technique ordinals must be unique")
    keys = {t.key for t in techniques}
    if len(keys) != len(techniques):
        raise TaxonomyError("technique keys must be unique")
    techniques.sort(key=lambda t: t.ordinal)
    return techniques


def by_key(techniques: list[Technique]) -> dict[str, Technique]:
    return {t.key: t for t in techniques}


def included_techniques(techniques: list[Technique]) -> list[Technique]:
    return [t for t in techniques if t.included]


class PromptTemplates:
    """The rewrite and paraphrase templates with placeholder validation."""

    PERSUASION_PLACEHOLDERS = ("{TECHNIQUE_NAME}", "{DEFINITION}", "{EXAMPLES}", "{CLAIM}")

    def __init__(self, persuasion_body: str, paraphrase_body: str):
        for ph in self.PERSUASION_PLACEHOLDERS:
            if ph not in persuasion_body:
                raise TaxonomyError(f"persuasion template missing placeholder {ph}")
        if "{CLAIM}" not in paraphrase_body:
            raise TaxonomyError("paraphrase template missing placeholder {CLAIM}")
        for ph in ("{TECHNIQUE_NAME}", "{DEFINITION}", "{EXAMPLES}"):
            if ph in paraphrase_body:
                raise TaxonomyError(f"paraphrase template must not contain {ph}")
        self.persuasion_body = persuasion_body
        self.paraphrase_body = paraphrase_body

    @classmethod
    def load(cls, prompts_dir: str | Path | None = None) -> "PromptTemplates":
        if prompts_dir is None:
            base = _default_path("prompts")
        else:
            base = Path(prompts_dir)
        persuasion = (base / "persuasion_prompt.txt").read_text(encoding="utf-8")
        paraphrase = (base / "paraphrase_prompt.txt").read_text(encoding="utf-8")
        return cls(persuasion, paraphrase)


def render_prompt(technique: Technique, claim: str, templates: PromptTemplates) -> str:
    """Instantiate the rewrite prompt for one technique and one claim.

    The claim is embedded exactly once and byte-for-byte unmodified;
    excluded techniques render too, since the validation study needs them.
    """
    if not claim:
        raise ValueError("claim must be non-empty")
    examples = "\n".join(f"- {ex}" for ex in technique.fewshot)
    body = templates.persuasion_body
    body = body.replace("{TECHNIQUE_NAME}", technique.name)
    body = body.replace("{DEFINITION}", technique.definition)
    body = body.replace("{EXAMPLES}", examples)
    body = body.replace("{CLAIM}", claim)
    return body


def render_paraphrase_prompt(claim: str, templates: PromptTemplates) -> str:
    if not claim:
        raise ValueError("claim must be non-empty")
    return templates.paraphrase_body.replace("{CLAIM}", claim)

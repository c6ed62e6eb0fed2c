"""Rewrite generation through a chat-completions endpoint.

One generation call per (claim, technique) renders the rewrite prompt,
sends it over the de-facto chat-completions wire shape
``{model, messages, temperature, max_tokens}`` ->
``{choices: [{message: {content}}]}``, then sanitizes and
constraint-checks the output. Failures after retries become records
flagged ``generation_failed`` rather than holes in the variant census.

A deterministic offline generator (``MockChatClient``) answers the same
prompts with canned per-technique transformations so the full pipeline
runs reproducibly without a model server.
"""

from __future__ import annotations

import random
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .corpus import ClaimRecord
from .taxonomy import PromptTemplates, Technique, render_paraphrase_prompt, render_prompt

ATTACK_PERSUASION = "persuasion"
ATTACK_PARAPHRASE = "paraphrase"

FLAG_NOOP = "noop"
FLAG_LENGTH = "length_violation"
FLAG_MULTI_SENTENCE = "multi_sentence"
FLAG_SANITIZED = "sanitized"
FLAG_FAILED = "generation_failed"

LENGTH_BAND = (0.8, 1.2)


class GenerationError(Exception):
    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class SanitationError(GenerationError):
    """Generator output was empty once stripped."""


@dataclass(frozen=True)
class GeneratorConfig:
    endpoint_url: str = ""
    model_name: str = "mock-rewriter"
    temperature: float = 0.0
    max_tokens: int = 128
    max_retries: int = 3
    parallelism: int = 1
    timeout: float = 30.0
    backoff_base: float = 0.5
    mode: str = "mock"  # "mock" | "http"

    def __post_init__(self):
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class Completion:
    text: str
    retries: int = 0


class ChatClient(Protocol):
    def complete(self, prompt: str) -> Completion: ...


@dataclass(frozen=True)
class VariantRecord:
    claim_id: str
    attack_kind: str
    text: str
    length_ratio: float
    flags: tuple[str, ...] = ()
    technique_key: str | None = None
    retries: int = 0

    @property
    def failed(self) -> bool:
        return FLAG_FAILED in self.flags

    def __post_init__(self):
        if not self.failed:
            if not self.text:
                raise ValueError("variant text must be non-empty unless generation failed")
            if self.length_ratio <= 0:
                raise ValueError("length_ratio must be positive")


@dataclass
class VariantSet:
    claim_id: str
    variants: dict[str, VariantRecord] = field(default_factory=dict)

    def add(self, key: str, record: VariantRecord) -> None:
        if key in self.variants:
            raise ValueError(f"duplicate variant {key!r} for claim {self.claim_id}")
        self.variants[key] = record


# --- output hygiene ---------------------------------------------------------

_QUOTE_PAIRS = (('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’"))

# Leading "<words>:" labels chat models like to add despite instructions.
DENY_PREFIXES = (
    "here is the rewritten claim",
    "here's the rewritten claim",
    "here is the paraphrased claim",
    "here is the paraphrase",
    "rewritten claim",
    "paraphrased claim",
    "paraphrase",
    "rewrite",
    "output",
    "answer",
    "result",
)

_NEWLINES = re.compile(r"\s*[\r\n]+\s*")
_TERMINAL_RUNS = re.compile(r"[.!?…]+(?=\s|$)")


def _sanitize_pass(text: str) -> str:
    text = text.strip()
    text = _NEWLINES.sub(" ", text)
    lowered = text.lower()
    for prefix in DENY_PREFIXES:
        label = prefix + ":"
        if lowered.startswith(label):
            text = text[len(label) :].lstrip()
            break
    if len(text) >= 2:
        for open_q, close_q in _QUOTE_PAIRS:
            if text[0] == open_q and text[-1] == close_q:
                text = text[1:-1].strip()
                break
    return text


def sanitize_output(raw: str) -> tuple[str, bool]:
    """Normalize generator output; returns (text, any_rule_fired).

    Passes run to a fixed point so the function is idempotent even on
    nested wrappers (a label inside quotes, doubled quoting, and so on).
    An output that is empty once stripped signals sanitation failure.
    """
    text = raw
    for _ in range(16):
        nxt = _sanitize_pass(text)
        if nxt == text:
            break
        text = nxt
    if not text:
        raise SanitationError("generator output empty after sanitation")
    return text, text != raw


def validate_constraints(original: str, variant: str) -> tuple[tuple[str, ...], float]:
    """Prompt-contract checks; the variant is flagged, never discarded.

    Length is measured in characters against the ±20% band; a variant
    with more than one terminal punctuation run counts as multi-sentence.
    """
    if not original or not variant:
        raise ValueError("constraint check needs non-empty texts")
    ratio = len(variant) / len(original)
    flags = []
    if not LENGTH_BAND[0] <= ratio <= LENGTH_BAND[1]:
        flags.append(FLAG_LENGTH)
    if len(_TERMINAL_RUNS.findall(variant)) > 1:
        flags.append(FLAG_MULTI_SENTENCE)
    return tuple(flags), ratio


# --- clients ----------------------------------------------------------------


class HttpChatClient:
    """Chat-completions client with exponential backoff retries."""

    def __init__(self, config: GeneratorConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        url = config.endpoint_url.rstrip("/")
        if "chat/completions" not in url:
            url += "/v1/chat/completions"
        self.url = url
        self._client = httpx.Client(timeout=config.timeout, transport=transport)

    def close(self):
        self._client.close()

    def complete(self, prompt: str) -> Completion:
        cfg = self.config
        payload = {
            "model": cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(cfg.max_retries + 1):
            try:
                resp = self._client.post(self.url, json=payload)
                if resp.status_code // 100 == 2:
                    data = resp.json()
                    try:
                        text = data["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError) as exc:
                        raise GenerationError(
                            f"malformed completion response: {data!r}", retries=attempt
                        ) from exc
                    return Completion(text=text, retries=attempt)
                last_error = GenerationError(f"HTTP {resp.status_code}")
            except httpx.HTTPError as exc:
                last_error = exc
            if attempt < cfg.max_retries:
                time.sleep(cfg.backoff_base * (2**attempt) * (1 + random.random()))
        raise GenerationError(
            f"generator unreachable after {cfg.max_retries} retries: {last_error}",
            retries=cfg.max_retries,
        )


_TECHNIQUE_IN_PROMPT = re.compile(r'inject persuasive wording of type: "([^"]+)"')
_CLAIM_IN_PROMPT = re.compile(r'^CLAIM: "(.*)"$', re.MULTILINE)
_PARAPHRASE_CLAIM = re.compile(r"^Claim: (.*)$", re.MULTILINE)


def _lower_first(text: str) -> str:
    return text[:1].lower() + text[1:] if text else text


def _mock_obfuscate(claim: str) -> str:
    # Keep the subject head, blur digits, drop the concrete predicate.
    words = re.sub(r"\d+(?:[.,]\d+)*", "several", claim).rstrip(".!?").split()
    head = " ".join(words[: min(3, len(words))])
    return f"{head} is, in broad terms, notable."


def _mock_repeat(claim: str) -> str:
    words = claim.split()
    head = " ".join(words[: min(3, len(words))])
    return f"{head}, {_lower_first(head)}, {' '.join(words[min(3, len(words)):])}".rstrip()


_MOCK_REWRITES = {
    "Obfuscation": _mock_obfuscate,
    "Repetition": _mock_repeat,
    "Slogan": lambda c: "One truth: " + c.rstrip(".!?") + "!",
    "Flag Waving": lambda c: "Every true patriot knows " + _lower_first(c),
    "Appeal to Popularity": lambda c: "Everyone is celebrating that " + _lower_first(c),
    "Appeal to Authority": lambda c: "Experts themselves confirm " + _lower_first(c),
    "Loaded Language": lambda c: "Astonishingly, " + _lower_first(c),
    "Appeal to Values": lambda c: "In the name of honest tradition, " + _lower_first(c),
    "Conversation Killer": lambda c: c.rstrip(".!?") + ", end of story.",
    "Red Herring": lambda c: "Setting every other debate aside, " + _lower_first(c),
}


class MockChatClient:
    """Canned-response generator for offline, reproducible pipelines.

    Reads the technique name and claim straight out of the prompt and
    applies a fixed per-technique transformation; unknown techniques get
    a labelled prefix. Pure function of the prompt.
    """

    model_name = "mock-rewriter"

    def complete(self, prompt: str) -> Completion:
        claim_match = _CLAIM_IN_PROMPT.search(prompt)
        if claim_match:
            claim = claim_match.group(1)
            tech_match = _TECHNIQUE_IN_PROMPT.search(prompt)
            technique = tech_match.group(1) if tech_match else ""
            rewrite = _MOCK_REWRITES.get(technique)
            if rewrite is not None:
                return Completion(text=rewrite(claim))
            return Completion(text=f"As anyone weighing {technique} sees, " + _lower_first(claim))
        para_match = _PARAPHRASE_CLAIM.search(prompt)
        if para_match:
            return Completion(text="Indeed, " + _lower_first(para_match.group(1).strip()))
        raise GenerationError("mock generator could not find a claim in the prompt")


# --- variant generation -----------------------------------------------------


def _finish_record(
    claim: ClaimRecord,
    attack_kind: str,
    completion: Completion,
    technique_key: str | None,
) -> VariantRecord:
    text, fired = sanitize_output(completion.text)
    flags, ratio = validate_constraints(claim.text, text)
    if fired:
        flags = flags + (FLAG_SANITIZED,)
    return VariantRecord(
        claim_id=claim.id,
        attack_kind=attack_kind,
        text=text,
        length_ratio=ratio,
        flags=tuple(sorted(flags)),
        technique_key=technique_key,
        retries=completion.retries,
    )


def _failed_record(
    claim: ClaimRecord, attack_kind: str, technique_key: str | None, retries: int
) -> VariantRecord:
    return VariantRecord(
        claim_id=claim.id,
        attack_kind=attack_kind,
        text="",
        length_ratio=0.0,
        flags=(FLAG_FAILED,),
        technique_key=technique_key,
        retries=retries,
    )


def generate_variants(
    claim: ClaimRecord,
    techniques: list[Technique],
    client: ChatClient,
    templates: PromptTemplates,
    parallelism: int = 1,
) -> VariantSet:
    """One rewrite per technique; failures are recorded, never dropped.

    Results merge in technique-ordinal order regardless of completion
    order, so the variant set is deterministic under any parallelism.
    """

    def run(technique: Technique) -> VariantRecord:
        prompt = render_prompt(technique, claim.text, templates)
        try:
            completion = client.complete(prompt)
            return _finish_record(claim, ATTACK_PERSUASION, completion, technique.key)
        except GenerationError as exc:
            return _failed_record(claim, ATTACK_PERSUASION, technique.key, exc.retries)

    ordered = sorted(techniques, key=lambda t: t.ordinal)
    if parallelism > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(run, ordered))
    else:
        records = [run(t) for t in ordered]
    out = VariantSet(claim_id=claim.id)
    for technique, record in zip(ordered, records):
        out.add(technique.key, record)
    return out


def generate_paraphrases(
    claims: list[ClaimRecord],
    client: ChatClient,
    templates: PromptTemplates,
    parallelism: int = 1,
) -> list[VariantRecord]:
    def run(claim: ClaimRecord) -> VariantRecord:
        prompt = render_paraphrase_prompt(claim.text, templates)
        try:
            completion = client.complete(prompt)
            return _finish_record(claim, ATTACK_PARAPHRASE, completion, None)
        except GenerationError as exc:
            return _failed_record(claim, ATTACK_PARAPHRASE, None, exc.retries)

    if parallelism > 1 and len(claims) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(run, claims))
    return [run(c) for c in claims]

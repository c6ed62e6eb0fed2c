"""Verdict scoring over a small wire protocol, with offline stubs.

Any classifier that answers ``POST /v1/score`` with
``{"claim": str, "evidence": [str], "condition": str}`` ->
``{"p_true": float, "model_id": str}`` can be evaluated; a batch variant
lives at ``/v1/score_batch``. Deterministic stub scorers implement the
same call shape for offline tests and fixture pipelines, and a keyed
cache guarantees each distinct request hits the endpoint at most once.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .corpus import ClaimRecord

CLAIM_ONLY = "claim_only"
GOLD_EVIDENCE = "gold_evidence"
CONDITIONS = (CLAIM_ONLY, GOLD_EVIDENCE)


class ScoringError(Exception):
    pass


class ProtocolViolation(ScoringError):
    """The endpoint answered outside the wire contract."""


class EndpointError(ScoringError):
    """Transport failure that survived the retry policy."""


@dataclass(frozen=True)
class VerdictRequest:
    claim: str
    evidence: tuple[str, ...]
    condition: str

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ScoringError(f"unknown condition {self.condition!r}")
        if self.condition == CLAIM_ONLY and self.evidence:
            raise ScoringError("claim_only requests carry no evidence")

    def body(self) -> dict:
        return {"claim": self.claim, "evidence": list(self.evidence), "condition": self.condition}


@dataclass(frozen=True)
class VerdictResponse:
    p_true: float
    model_id: str

    def __post_init__(self):
        if isinstance(self.p_true, int) and not isinstance(self.p_true, bool):
            object.__setattr__(self, "p_true", float(self.p_true))
        if not (isinstance(self.p_true, float) and math.isfinite(self.p_true)):
            raise ProtocolViolation(f"p_true must be a finite number, got {self.p_true!r}")
        if not 0.0 <= self.p_true <= 1.0:
            raise ProtocolViolation(f"p_true out of range: {self.p_true}")


class Scorer(Protocol):
    def score(self, request: VerdictRequest) -> VerdictResponse: ...


def assemble_request(
    claim: ClaimRecord, condition: str, text: str | None = None
) -> VerdictRequest:
    """Build a scoring request for a claim or one of its attack variants.

    Evidence carries the linearized snippet contents in source order;
    unresolved snippets are skipped. Asking for the gold-evidence
    condition on a claim with no resolved evidence is an error rather
    than a silent downgrade to claim-only.
    """
    body = claim.text if text is None else text
    if condition == CLAIM_ONLY:
        return VerdictRequest(claim=body, evidence=(), condition=condition)
    contents = tuple(s.content for s in claim.resolved_evidence())
    if not contents:
        raise ScoringError(f"claim {claim.id} has no resolved evidence")
    return VerdictRequest(claim=body, evidence=contents, condition=condition)


# --- stub scorers -----------------------------------------------------------

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _token_set(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


@dataclass
class StubScorerSpec:
    mode: str  # constant | keyed | overlap
    constant_p: float = 0.5
    keyed: dict[str, float] = field(default_factory=dict)
    default_p: float = 0.5

    def __post_init__(self):
        if self.mode not in ("constant", "keyed", "overlap"):
            raise ScoringError(f"unknown stub mode {self.mode!r}")
        for p in (self.constant_p, self.default_p, *self.keyed.values()):
            if not 0.0 <= p <= 1.0:
                raise ScoringError(f"stub probability out of range: {p}")

    @property
    def model_id(self) -> str:
        return f"stub:{self.mode}"

    @classmethod
    def parse(cls, text: str) -> "StubScorerSpec":
        """Parse CLI shorthand: ``constant:p`` | ``keyed:file.json`` | ``overlap``."""
        if text == "overlap":
            return cls(mode="overlap")
        kind, _, arg = text.partition(":")
        if kind == "constant" and arg:
            return cls(mode="constant", constant_p=float(arg))
        if kind == "keyed" and arg:
            mapping = json.loads(Path(arg).read_text(encoding="utf-8"))
            return cls(mode="keyed", keyed={str(k): float(v) for k, v in mapping.items()})
        raise ScoringError(f"cannot parse stub spec {text!r}")


def stub_score(request: VerdictRequest, spec: StubScorerSpec) -> VerdictResponse:
    """Pure, deterministic scoring used for offline runs.

    ``overlap`` scores the fraction of claim tokens covered by the pooled
    evidence tokens, a crude but monotone proxy for evidence support;
    claim-only (or empty-token) requests fall back to ``default_p``.
    """
    if spec.mode == "constant":
        return VerdictResponse(p_true=spec.constant_p, model_id=spec.model_id)
    if spec.mode == "keyed":
        p = spec.keyed.get(request.claim, spec.default_p)
        return VerdictResponse(p_true=p, model_id=spec.model_id)
    if not request.evidence:
        return VerdictResponse(p_true=spec.default_p, model_id=spec.model_id)
    claim_tokens = _token_set(request.claim)
    if not claim_tokens:
        return VerdictResponse(p_true=spec.default_p, model_id=spec.model_id)
    evidence_tokens: set[str] = set()
    for text in request.evidence:
        evidence_tokens |= _token_set(text)
    p = len(claim_tokens & evidence_tokens) / len(claim_tokens)
    return VerdictResponse(p_true=p, model_id=spec.model_id)


class StubScorer:
    def __init__(self, spec: StubScorerSpec):
        self.spec = spec
        self.model_id = spec.model_id

    def score(self, request: VerdictRequest) -> VerdictResponse:
        return stub_score(request, self.spec)


# --- HTTP client ------------------------------------------------------------


class HttpScoreClient:
    """Client for the scoring wire protocol with bounded retries.

    ``endpoint_url`` is the server base; ``/v1/score`` and
    ``/v1/score_batch`` are appended. Transport errors and non-2xx
    responses are retried with exponential backoff plus jitter, then
    surfaced as EndpointError.
    """

    def __init__(
        self,
        endpoint_url: str,
        model_id: str = "remote",
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff_base: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint_url = endpoint_url.rstrip("/")
        self.model_id = model_id
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def close(self):
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                resp = self._client.post(self.endpoint_url + path, json=payload)
                if resp.status_code // 100 == 2:
                    return resp.json()
                last_error = EndpointError(f"HTTP {resp.status_code} from {path}")
            except httpx.HTTPError as exc:
                last_error = exc
            if attempt < self.max_retries:
                time.sleep(self.backoff_base * (2**attempt) * (1 + random.random()))
        raise EndpointError(f"scoring endpoint failed after {self.max_retries} retries: {last_error}")

    @staticmethod
    def _parse_response(data: dict) -> VerdictResponse:
        try:
            return VerdictResponse(p_true=float(data["p_true"]), model_id=str(data["model_id"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolViolation(f"malformed scoring response: {data!r}") from exc

    def score(self, request: VerdictRequest) -> VerdictResponse:
        return self._parse_response(self._post("/v1/score", request.body()))

    def score_batch(self, requests: Sequence[VerdictRequest]) -> list[VerdictResponse]:
        payload = {
            "claims": [r.claim for r in requests],
            "evidence": [list(r.evidence) for r in requests],
            "conditions": [r.condition for r in requests],
        }
        data = self._post("/v1/score_batch", payload)
        try:
            rows = list(zip(data["p_true"], data["model_id"]))
        except (KeyError, TypeError) as exc:
            raise ProtocolViolation(f"malformed batch response: {data!r}") from exc
        if len(rows) != len(requests):
            raise ProtocolViolation("batch response length mismatch")
        return [self._parse_response({"p_true": p, "model_id": m}) for p, m in rows]


# --- cache ------------------------------------------------------------------


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def cache_key(request: VerdictRequest, model_id: str) -> tuple[str, str, str, str]:
    return (_sha(request.claim), _sha("\x1f".join(request.evidence)), request.condition, model_id)


class ScoreCache:
    """Append-only score log keyed by request identity.

    Hits never re-contact the endpoint; the file is a single-writer
    append log that loads fully before use, so reads need no locking.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[tuple, float] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    key = (rec["claim_sha"], rec["evidence_sha"], rec["condition"], rec["model_id"])
                    self._entries[key] = float(rec["p_true"])
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: tuple) -> float | None:
        return self._entries.get(key)

    def put(self, key: tuple, p_true: float) -> None:
        if key in self._entries:
            return
        self._entries[key] = p_true
        rec = {
            "claim_sha": key[0],
            "evidence_sha": key[1],
            "condition": key[2],
            "model_id": key[3],
            "p_true": p_true,
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


class CachingScorer:
    """Wrap a scorer with the keyed cache; results are call-order independent.

    The configured ``model_id`` is the model identity throughout: it keys
    the cache and stamps every response, so cold and warm runs report the
    same identity even when the underlying endpoint echoes its own name.
    """

    def __init__(self, scorer: Scorer, cache: ScoreCache, model_id: str):
        self.scorer = scorer
        self.cache = cache
        self.model_id = model_id

    def score(self, request: VerdictRequest) -> VerdictResponse:
        key = cache_key(request, self.model_id)
        hit = self.cache.get(key)
        if hit is not None:
            return VerdictResponse(p_true=hit, model_id=self.model_id)
        resp = self.scorer.score(request)
        self.cache.put(key, resp.p_true)
        return VerdictResponse(p_true=resp.p_true, model_id=self.model_id)


def score_many(
    scorer: Scorer, requests: Sequence[VerdictRequest], parallelism: int = 1
) -> list[VerdictResponse]:
    """Score a batch with bounded in-flight requests, preserving order."""
    if parallelism <= 1 or len(requests) <= 1:
        return [scorer.score(r) for r in requests]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(scorer.score, requests))

"""HTTP service implementing both harness wire protocols.

``POST /v1/score`` and ``/v1/score_batch`` run the loaded checkpoint in
evaluation mode (identical requests produce identical probabilities);
sequence overflow is truncated to the configured length and flagged in
the response metadata. ``POST /v1/chat/completions`` proxies a local
instruction-following model when ``generator_backend.mode`` is
``forward``, or answers with a deterministic canned rewrite in ``canned``
mode so offline setups can exercise the full pipeline.
"""

from __future__ import annotations

import re
from pathlib import Path

import httpx
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .model import load_checkpoint, score_batch

_CLAIM_IN_PROMPT = re.compile(r'^CLAIM: "(.*)"$', re.MULTILINE)
_PARAPHRASE_CLAIM = re.compile(r"^Claim: (.*)$", re.MULTILINE)


class ScoreRequest(BaseModel):
    claim: str = Field(min_length=1)
    evidence: list[str] = Field(default_factory=list)
    condition: str = "claim_only"


class ScoreBatchRequest(BaseModel):
    claims: list[str]
    evidence: list[list[str]]
    conditions: list[str]


class ChatMessage(BaseModel):
    role: str
    content: str


class ChatRequest(BaseModel):
    model: str = ""
    messages: list[ChatMessage]
    temperature: float = 0.0
    max_tokens: int = 256


def _canned_completion(prompt: str) -> str:
    claim = _CLAIM_IN_PROMPT.search(prompt)
    if claim:
        return "To put it plainly, " + claim.group(1)
    paraphrase = _PARAPHRASE_CLAIM.search(prompt)
    if paraphrase:
        return "Put differently, " + paraphrase.group(1).strip()
    return "To put it plainly, the statement stands."


def create_app(checkpoint_dir: str | Path, generator_backend: dict | None = None) -> FastAPI:
    model, tokenizer, metadata = load_checkpoint(checkpoint_dir)
    model_id = f"{metadata.get('model_name', 'adapter')}:{metadata.get('config_digest', '')}"
    max_length = int(metadata.get("max_length", 512))
    backend = generator_backend or {"mode": "canned"}

    app = FastAPI(title="veracity adapter")
    app.state.metadata = metadata

    def _score(claims: list[str], evidence: list[list[str]], conditions: list[str]):
        assembled = [
            [] if cond == "claim_only" else ev for ev, cond in zip(evidence, conditions)
        ]
        return score_batch(model, tokenizer, claims, assembled, max_length)

    @app.post("/v1/score")
    def score(request: ScoreRequest):
        if request.condition not in ("claim_only", "gold_evidence"):
            raise HTTPException(400, f"unknown condition {request.condition!r}")
        probs, truncated = _score([request.claim], [request.evidence], [request.condition])
        return {"p_true": probs[0], "model_id": model_id, "truncated": truncated[0]}

    @app.post("/v1/score_batch")
    def score_many(request: ScoreBatchRequest):
        n = len(request.claims)
        if not (len(request.evidence) == len(request.conditions) == n):
            raise HTTPException(400, "batch arrays must be the same length")
        probs, truncated = _score(request.claims, request.evidence, request.conditions)
        return {"p_true": probs, "model_id": [model_id] * n, "truncated": truncated}

    @app.post("/v1/chat/completions")
    def chat(request: ChatRequest):
        prompt = "\n".join(m.content for m in request.messages if m.role == "user")
        if backend.get("mode") == "forward":
            url = backend["url"].rstrip("/")
            if "chat/completions" not in url:
                url += "/v1/chat/completions"
            resp = httpx.post(url, json=request.model_dump(), timeout=backend.get("timeout", 60))
            if resp.status_code // 100 != 2:
                raise HTTPException(502, f"backend answered {resp.status_code}")
            return resp.json()
        text = _canned_completion(prompt)
        return {"choices": [{"message": {"role": "assistant", "content": text}}]}

    return app

"""Attacker policies over scored variants.

The blind attacker applies techniques uniformly at random, which is
evaluated exactly by pooling every (claim, technique) row with equal
weight. The oracle attacker has query access and keeps, per claim, the
variant with the highest adversarial loss: one minus the predicted
probability of the true class when the gold label is True, the predicted
probability itself when it is False. Selection is pure and tie-broken
deterministically, so re-runs over a cached score table are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Verdict

POLICY_BLIND = "blind_pooled"
POLICY_ORACLE = "oracle"

_NO_ORDINAL = 10**9  # non-persuasion candidates tie-break after any technique


class MissingVariantsError(Exception):
    """A claim reached selection with no scorable candidates."""


def adversarial_loss(p_true: float, gold: Verdict) -> float:
    """Probability mass the classifier puts on the incorrect class."""
    if not 0.0 <= p_true <= 1.0:
        raise ValueError(f"p_true out of range: {p_true}")
    return 1.0 - p_true if gold else p_true


@dataclass(frozen=True)
class ScoredVariant:
    claim_id: str
    attack_kind: str
    technique_key: str | None
    technique_ordinal: int | None
    text: str
    p_true: float
    loss: float
    evidence_condition: str

    @classmethod
    def build(
        cls,
        claim_id: str,
        attack_kind: str,
        text: str,
        p_true: float,
        gold: Verdict,
        evidence_condition: str,
        technique_key: str | None = None,
        technique_ordinal: int | None = None,
    ) -> "ScoredVariant":
        return cls(
            claim_id=claim_id,
            attack_kind=attack_kind,
            technique_key=technique_key,
            technique_ordinal=technique_ordinal,
            text=text,
            p_true=p_true,
            loss=adversarial_loss(p_true, gold),
            evidence_condition=evidence_condition,
        )


@dataclass(frozen=True)
class AttackSelection:
    claim_id: str
    chosen: ScoredVariant
    policy: str


def select_oracle(candidates: list[ScoredVariant], gold: Verdict) -> AttackSelection:
    """Pick the worst-case variant for one claim.

    Ties on loss break toward the smallest technique ordinal, then the
    lexicographically first attack kind, keeping regression runs stable.
    """
    if not candidates:
        raise MissingVariantsError("no candidates to select from")
    conditions = {c.evidence_condition for c in candidates}
    if len(conditions) > 1:
        raise ValueError(f"candidates mix evidence conditions: {sorted(conditions)}")
    claim_ids = {c.claim_id for c in candidates}
    if len(claim_ids) > 1:
        raise ValueError(f"candidates mix claims: {sorted(claim_ids)}")

    for c in candidates:
        if c.loss != adversarial_loss(c.p_true, gold):
            raise ValueError(f"loss inconsistent with gold label for {c.claim_id}")

    def rank(c: ScoredVariant):
        ordinal = c.technique_ordinal if c.technique_ordinal is not None else _NO_ORDINAL
        return (-c.loss, ordinal, c.attack_kind)

    chosen = min(candidates, key=rank)
    return AttackSelection(claim_id=chosen.claim_id, chosen=chosen, policy=POLICY_ORACLE)


def pool_blind(
    variant_index: dict[str, list[tuple[str, bool]]],
    scores: dict[tuple[str, str], ScoredVariant],
) -> tuple[list[ScoredVariant], dict[str, int]]:
    """Assemble the pooled blind-attack table.

    ``variant_index`` maps claim id -> [(technique_key, generation_failed)];
    every non-failed pair must have a score. Each surviving row enters the
    table with equal weight, which realizes the uniform expectation over
    techniques; failures are omitted and tallied in the coverage sidecar
    instead of silently shrinking the pool.
    """
    rows: list[ScoredVariant] = []
    coverage = {"pooled_rows": 0, "failed_generations": 0}
    for claim_id in sorted(variant_index):
        for technique_key, failed in variant_index[claim_id]:
            if failed:
                coverage["failed_generations"] += 1
                continue
            key = (claim_id, technique_key)
            if key not in scores:
                raise MissingVariantsError(
                    f"no score for variant ({claim_id}, {technique_key})"
                )
            rows.append(scores[key])
    coverage["pooled_rows"] = len(rows)
    return rows, coverage

"""Classification and attack-success metrics.

All metrics are implemented from first principles so the test suite can
check them against independent oracles: macro F1 against a brute-force
confusion matrix, ROC AUC (Mann-Whitney formulation with tie credit)
against trapezoidal integration, and attack success rate against a
double loop over aligned rows.

Small fixtures routinely produce empty denominators; those surface as
UndefinedMetricError rather than 0 or NaN so reports can mark the cell
absent instead of fabricating a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .corpus import Verdict

DECISION_THRESHOLD = 0.5


class UndefinedMetricError(Exception):
    pass


def predict(p_true: float, threshold: float = DECISION_THRESHOLD) -> Verdict:
    """Thresholded decision; a probability exactly at threshold reads True."""
    return p_true >= threshold


@dataclass(frozen=True)
class EvalRow:
    claim_id: str
    gold: Verdict
    p_true: float
    condition: str
    attack_kind: str
    technique_key: str | None = None

    @property
    def predicted(self) -> Verdict:
        return predict(self.p_true)

    @property
    def correct(self) -> bool:
        return self.predicted == self.gold


def accuracy(rows: list[EvalRow]) -> float:
    if not rows:
        raise UndefinedMetricError("accuracy over zero rows")
    return sum(1 for r in rows if r.correct) / len(rows)


def _f1_for_class(rows: list[EvalRow], cls: Verdict) -> float:
    tp = sum(1 for r in rows if r.gold == cls and r.predicted == cls)
    fp = sum(1 for r in rows if r.gold != cls and r.predicted == cls)
    fn = sum(1 for r in rows if r.gold == cls and r.predicted != cls)
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def macro_f1(rows: list[EvalRow]) -> float:
    """Unweighted mean of the True-class and False-class F1 scores."""
    if not rows:
        raise UndefinedMetricError("macro F1 over zero rows")
    return (_f1_for_class(rows, True) + _f1_for_class(rows, False)) / 2.0


def roc_auc(rows: list[EvalRow]) -> float:
    """Probability a random True-labelled row outscores a random False one.

    Computed exactly via tie-averaged ranks; equal scores earn half
    credit. Requires both classes in the gold labels.
    """
    pos = [r.p_true for r in rows if r.gold]
    neg = [r.p_true for r in rows if not r.gold]
    if not pos or not neg:
        raise UndefinedMetricError("ROC AUC needs both classes in gold labels")
    scored = sorted((p, is_pos) for p, is_pos in
                    [(p, True) for p in pos] + [(p, False) for p in neg])
    rank_sum_pos = 0.0
    i = 0
    while i < len(scored):
        j = i
        while j < len(scored) and scored[j][0] == scored[i][0]:
            j += 1
        avg_rank = (i + 1 + j) / 2.0  # ranks are 1-based: mean of i+1 .. j
        rank_sum_pos += avg_rank * sum(1 for k in range(i, j) if scored[k][1])
        i = j
    n_pos, n_neg = len(pos), len(neg)
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class AsrCounts:
    flips: int
    base: int  # |C_correct| restricted to claims with an attacked row

    @property
    def value(self) -> float:
        if self.base == 0:
            raise UndefinedMetricError("no originally-correct claims in scope")
        return self.flips / self.base

    @property
    def fraction(self) -> Fraction:
        if self.base == 0:
            raise UndefinedMetricError("no originally-correct claims in scope")
        return Fraction(self.flips, self.base)


def _align(original_rows: list[EvalRow], attacked_rows: list[EvalRow]) -> dict[str, EvalRow]:
    originals = {}
    for row in original_rows:
        if row.claim_id in originals:
            raise ValueError(f"duplicate original row for claim {row.claim_id}")
        originals[row.claim_id] = row
    for row in attacked_rows:
        if row.claim_id not in originals:
            raise ValueError(f"attacked row {row.claim_id} has no original row")
    return originals


def asr_counts(
    original_rows: list[EvalRow],
    attacked_rows: list[EvalRow],
    gold_filter: Verdict | None = None,
) -> AsrCounts:
    """Count flips among attacked rows whose claim was originally correct.

    Attacked rows may be pooled (several per claim); each row counts once,
    mirroring the uniform expectation over techniques. ``gold_filter``
    restricts to one gold class for the evasion/sabotage split.
    """
    originals = _align(original_rows, attacked_rows)
    flips = 0
    base = 0
    for row in attacked_rows:
        orig = originals[row.claim_id]
        if gold_filter is not None and orig.gold != gold_filter:
            continue
        if not orig.correct:
            continue
        base += 1
        if row.predicted != orig.gold:
            flips += 1
    return AsrCounts(flips=flips, base=base)


def asr(original_rows: list[EvalRow], attacked_rows: list[EvalRow]) -> float:
    """Attack success rate: flips / originally-correct, aligned by claim."""
    return asr_counts(original_rows, attacked_rows).value


def asr_split(
    original_rows: list[EvalRow], attacked_rows: list[EvalRow]
) -> dict[str, float | None]:
    """Evasion (gold False flipped to True) and sabotage (True to False).

    A component with an empty denominator is reported as None, never 0.
    """
    out: dict[str, float | None] = {}
    for name, gold in (("evasion", False), ("sabotage", True)):
        counts = asr_counts(original_rows, attacked_rows, gold_filter=gold)
        try:
            out[name] = counts.value
        except UndefinedMetricError:
            out[name] = None
    return out

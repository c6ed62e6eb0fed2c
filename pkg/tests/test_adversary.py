import random

import pytest

from claimattack.adversary import (
    MissingVariantsError,
    ScoredVariant,
    adversarial_loss,
    pool_blind,
    select_oracle,
)
from claimattack.metrics import predict


def candidate(p, ordinal=None, key=None, claim="c1", gold=False, kind="persuasion",
              condition="gold_evidence"):
    return ScoredVariant.build(
        claim_id=claim,
        attack_kind=kind,
        text="",
        p_true=p,
        gold=gold,
        evidence_condition=condition,
        technique_key=key,
        technique_ordinal=ordinal,
    )


class TestLoss:
    def test_direct_values(self):
        assert adversarial_loss(0.9, True) == pytest.approx(0.1)
        assert adversarial_loss(0.9, False) == pytest.approx(0.9)

    def test_complement_identity(self):
        rng = random.Random(17)
        for _ in range(1000):
            p = rng.random()
            assert adversarial_loss(p, True) + adversarial_loss(p, False) == pytest.approx(1.0)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            adversarial_loss(1.2, True)
        with pytest.raises(ValueError):
            adversarial_loss(-0.1, False)


class TestOracle:
    def test_picks_max_loss_for_false_gold(self):
        cands = [candidate(p, ordinal=i + 1) for i, p in enumerate([0.2, 0.9, 0.4])]
        chosen = select_oracle(cands, gold=False).chosen
        assert chosen.p_true == 0.9

    def test_singleton(self):
        only = candidate(0.3, ordinal=5)
        assert select_oracle([only], gold=False).chosen is only

    def test_tie_break_smallest_ordinal(self):
        a = candidate(0.7, ordinal=5, key="five")
        b = candidate(0.7, ordinal=2, key="two")
        chosen = select_oracle([a, b], gold=False).chosen
        assert chosen.technique_key == "two"

    def test_tie_break_kind_after_ordinal(self):
        a = candidate(0.7, kind="word_swap")
        b = candidate(0.7, kind="char_noise")
        chosen = select_oracle([a, b], gold=False).chosen
        assert chosen.attack_kind == "char_noise"

    def test_empty_errors(self):
        with pytest.raises(MissingVariantsError):
            select_oracle([], gold=True)

    def test_mixed_conditions_rejected(self):
        a = candidate(0.4, condition="claim_only")
        b = candidate(0.5, condition="gold_evidence")
        with pytest.raises(ValueError):
            select_oracle([a, b], gold=False)

    def test_monotone_transform_invariance(self):
        rng = random.Random(4)
        for trial in range(200):
            gold = rng.random() < 0.5
            ps = [rng.random() for _ in range(rng.randint(1, 8))]
            cands = [candidate(p, ordinal=i + 1, gold=gold) for i, p in enumerate(ps)]
            base = select_oracle(cands, gold).chosen.technique_ordinal
            squashed = [candidate(p**3, ordinal=i + 1, gold=gold) for i, p in enumerate(ps)]
            # strictly increasing transform of p_true keeps the argmax
            assert select_oracle(squashed, gold).chosen.technique_ordinal == base

    def test_rerun_bit_identical(self):
        cands = [candidate(p, ordinal=i + 1) for i, p in enumerate([0.1, 0.9, 0.9, 0.3])]
        first = select_oracle(cands, gold=False)
        second = select_oracle(list(cands), gold=False)
        assert first == second


class TestPoolBlind:
    def make_scores(self, claims, techniques, gold=False):
        scores = {}
        rng = random.Random(11)
        for c in claims:
            for t in techniques:
                scores[(c, t)] = candidate(rng.random(), key=t, claim=c, gold=gold)
        return scores

    def test_cardinality(self):
        claims = ["c1", "c2"]
        techniques = [f"t{i}" for i in range(15)]
        index = {c: [(t, False) for t in techniques] for c in claims}
        rows, coverage = pool_blind(index, self.make_scores(claims, techniques))
        assert len(rows) == 30
        assert coverage == {"pooled_rows": 30, "failed_generations": 0}

    def test_failed_generation_omitted_and_counted(self):
        claims = ["c1", "c2"]
        techniques = [f"t{i}" for i in range(15)]
        index = {c: [(t, False) for t in techniques] for c in claims}
        index["c2"][3] = ("t3", True)
        scores = self.make_scores(claims, techniques)
        del scores[("c2", "t3")]
        rows, coverage = pool_blind(index, scores)
        assert len(rows) == 29
        assert coverage["failed_generations"] == 1

    def test_missing_score_for_live_variant_errors(self):
        index = {"c1": [("t0", False)]}
        with pytest.raises(MissingVariantsError):
            pool_blind(index, {})

    def test_pooled_accuracy_is_mean_of_technique_accuracies(self):
        rng = random.Random(23)
        claims = [f"c{i}" for i in range(10)]
        techniques = [f"t{i}" for i in range(15)]
        golds = {c: rng.random() < 0.5 for c in claims}
        scores = {}
        for c in claims:
            for t in techniques:
                scores[(c, t)] = candidate(rng.random(), key=t, claim=c, gold=golds[c])
        index = {c: [(t, False) for t in techniques] for c in claims}
        rows, _ = pool_blind(index, scores)

        def acc(selected):
            return sum(
                1 for s in selected if predict(s.p_true) == golds[s.claim_id]
            ) / len(selected)

        pooled_acc = acc(rows)
        per_technique = [acc([r for r in rows if r.technique_key == t]) for t in techniques]
        assert pooled_acc == pytest.approx(sum(per_technique) / len(per_technique))


class TestDominance:
    def test_oracle_below_every_other_policy(self):
        rng = random.Random(101)
        claims = [f"c{i}" for i in range(40)]
        techniques = [f"t{i}" for i in range(8)]
        golds = {c: rng.random() < 0.5 for c in claims}
        scores = {
            (c, t): candidate(rng.random(), key=t, claim=c, gold=golds[c])
            for c in claims
            for t in techniques
        }
        index = {c: [(t, False) for t in techniques] for c in claims}
        pooled, _ = pool_blind(index, scores)

        def acc(rows):
            return sum(1 for r in rows if predict(r.p_true) == golds[r.claim_id]) / len(rows)

        oracle_rows = [
            select_oracle([scores[(c, t)] for t in techniques], golds[c]).chosen for c in claims
        ]
        oracle_acc = acc(oracle_rows)
        blind_acc = acc(pooled)
        technique_accs = [acc([scores[(c, t)] for c in claims]) for t in techniques]
        assert oracle_acc <= blind_acc <= max(technique_accs)
        assert all(oracle_acc <= a for a in technique_accs)

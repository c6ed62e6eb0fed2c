from pathlib import Path

import pytest

from claimattack.corpus import ClaimRecord, EvidenceSnippet


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE] {name}: {status}")
from claimattack.pos import HeuristicTagger
from claimattack.taxonomy import PromptTemplates, load_taxonomy
from claimattack.wordnet import SynonymLexicon

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


@pytest.fixture(scope="session")
def templates():
    return PromptTemplates.load()


@pytest.fixture(scope="session")
def mini_lexicon():
    return SynonymLexicon.from_mapping(
        {
            ("big", "adj"): ["large"],
            ("old", "adj"): ["ancient"],
            ("dog", "noun"): ["hound"],
            ("bridge", "noun"): ["span"],
            ("river", "noun"): ["stream"],
            ("runs", "verb"): ["flows"],
            ("quickly", "adv"): ["rapidly"],
        }
    )


@pytest.fixture(scope="session")
def tagger(mini_lexicon):
    return HeuristicTagger(mini_lexicon)


def make_claim(
    claim_id="c1",
    text="Arden Bridge opened in 1921.",
    label=True,
    evidence=(),
    dataset="fever",
    split="test",
) -> ClaimRecord:
    return ClaimRecord(
        id=claim_id,
        text=text,
        label=label,
        evidence=tuple(evidence),
        dataset=dataset,
        split=split,
    )


def snippet(page="Arden Bridge", element="sentence_0", content="Arden Bridge opened in 1921.",
            kind="sentence", unresolved=False) -> EvidenceSnippet:
    return EvidenceSnippet(
        page_id=page, element_id=element, content=content, kind=kind, unresolved=unresolved
    )

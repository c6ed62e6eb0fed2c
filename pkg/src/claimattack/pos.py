"""Heuristic part-of-speech tagging for substitution eligibility.

The synonym attack only needs a coarse {noun, verb, adj, adv, other}
decision per token. This tagger combines a closed-class word list, the
synonym lexicon's own part-of-speech inventory, and suffix heuristics;
it is deterministic, dependency-free, and injectable, so a stronger
tagger can be swapped in behind the same callable shape.
"""

from __future__ import annotations

from .wordnet import SynonymLexicon

# Closed-class words never substituted: determiners, pronouns,
# prepositions, conjunctions, auxiliaries, common adverbs of degree.
FUNCTION_WORDS = frozenset(
    """
    a an the this that these those some any each every no
    i you he she it we they me him her us them my your his its our their
    mine yours hers ours theirs myself yourself himself herself itself
    who whom whose which what
    and or but nor so yet for if while although because since unless until
    when where why how than as
    in on at by with from into onto of off over under between among through
    during before after above below up down out about against
    is are was were be been being am do does did done doing have has had having
    will would shall should can could may might must not
    there here very too also just only even still then now
    """.split()
)

_ADV_SUFFIXES = ("ly",)
_VERB_SUFFIXES = ("ing", "ed", "ify", "ize", "ise", "ate")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "ic", "al")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "hood", "ism")

_LEXICON_PRIORITY = ("noun", "verb", "adj", "adv")


def _suffix_guess(word: str) -> str | None:
    if word.endswith(_ADV_SUFFIXES):
        return "adv"
    if word.endswith(_VERB_SUFFIXES):
        return "verb"
    if word.endswith(_ADJ_SUFFIXES):
        return "adj"
    if word.endswith(_NOUN_SUFFIXES):
        return "noun"
    return None


class HeuristicTagger:
    """Lexicon-plus-suffix tagger; callable over a token list."""

    def __init__(self, lexicon: SynonymLexicon | None = None):
        self.lexicon = lexicon

    def __call__(self, tokens: list[str]) -> list[str]:
        return [self.tag_word(tok) for tok in tokens]

    def tag_word(self, surface: str) -> str:
        word = surface.lower()
        if not word.isalpha():
            return "other"
        if word in FUNCTION_WORDS:
            return "other"
        in_lexicon: set[str] = self.lexicon.pos_tags(word) if self.lexicon else set()
        if len(in_lexicon) == 1:
            return next(iter(in_lexicon))
        guess = _suffix_guess(word)
        if guess is not None and (not in_lexicon or guess in in_lexicon):
            return guess
        if in_lexicon:
            for pos in _LEXICON_PRIORITY:
                if pos in in_lexicon:
                    return pos
        return guess or "noun"

"""Deterministic lexical baseline attacks.

Three perturbations over a shared tokenizer: part-of-speech matched
synonym substitution, position swaps, and character-level typos. Each is
a pure function of (claim text, per-claim seed, config); the per-claim
seed comes from ``rng.derive_seed`` so results are independent of
processing order and reproducible across platforms.

Character edits never touch a token's first character, which keeps typos
plausible and the casing pattern intact. Edit distances are measured with
adjacent transposition counted as a single operation, matching the four
unit edits the attack applies.
"""

from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass, field

from .rng import SplitMix64
from .wordnet import SynonymLexicon

ATTACK_SYNONYM = "synonym"
ATTACK_WORD_SWAP = "word_swap"
ATTACK_CHAR_NOISE = "char_noise"

_EDIT_OPS = ("swap", "delete", "insert", "substitute")
_LETTERS = string.ascii_lowercase

# Words, possessive/contraction tails, or single punctuation marks.
_TOKEN_RE = re.compile(r"['’]\w+|\w+|[^\w\s]", re.UNICODE)


class AttackInapplicable(Exception):
    """The claim does not meet the attack's preconditions; exclude it."""


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int

    @property
    def alphabetic(self) -> bool:
        return self.surface.isalpha()

    @property
    def is_word(self) -> bool:
        return any(ch.isalnum() for ch in self.surface)


@dataclass(frozen=True)
class TokenizedClaim:
    original: str
    tokens: tuple[Token, ...]

    def rebuild(self, surfaces: list[str]) -> str:
        """Splice replacement surfaces back between the original gaps."""
        if len(surfaces) != len(self.tokens):
            raise ValueError("surface count must match token count")
        parts: list[str] = []
        cursor = 0
        for tok, surface in zip(self.tokens, surfaces):
            parts.append(self.original[cursor : tok.start])
            parts.append(surface)
            cursor = tok.end
        parts.append(self.original[cursor:])
        return "".join(parts)


def tokenize(text: str) -> TokenizedClaim:
    tokens = tuple(
        Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)
    )
    return TokenizedClaim(original=text, tokens=tokens)


def count_words(text: str) -> int:
    return sum(1 for tok in tokenize(text).tokens if tok.is_word)


@dataclass(frozen=True)
class PerturbationConfig:
    rate: float = 0.10
    min_word_len_char: int = 3
    long_word_len: int = 8
    min_synonym_len: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError("rate must be in (0, 1]")
        if min(self.min_word_len_char, self.long_word_len, self.min_synonym_len) <= 0:
            raise ValueError("length thresholds must be positive")


@dataclass(frozen=True)
class LexicalVariant:
    text: str
    kind: str
    noop: bool = False
    n_edits: int = 0
    edited_tokens: tuple[int, ...] = field(default=())


def _copy_casing(original: str, replacement: str) -> str:
    if original.isupper() and len(original) > 1:
        return replacement.upper()
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def synonym_substitute(
    claim: str,
    lexicon: SynonymLexicon,
    tagger,
    cfg: PerturbationConfig,
) -> LexicalVariant:
    """Replace a fixed rate of eligible tokens with POS-matched synonyms.

    Eligible: alphabetic, longer than two characters, and the lexicon has
    a synonym under the tagged part of speech. Exactly
    ``max(1, floor(rate * n_eligible))`` tokens are replaced; a claim with
    no eligible token is returned verbatim with the noop flag.
    """
    tc = tokenize(claim)
    surfaces = [t.surface for t in tc.tokens]
    tags = tagger(surfaces)
    eligible: list[tuple[int, tuple[str, ...]]] = []
    for i, (tok, tag) in enumerate(zip(tc.tokens, tags)):
        if not tok.alphabetic or len(tok.surface) < cfg.min_synonym_len:
            continue
        if tag not in ("noun", "verb", "adj", "adv"):
            continue
        syns = lexicon.synonyms(tok.surface, tag)
        if syns:
            eligible.append((i, syns))
    if not eligible:
        return LexicalVariant(text=claim, kind=ATTACK_SYNONYM, noop=True)
    n = max(1, math.floor(cfg.rate * len(eligible)))
    rng = SplitMix64(cfg.seed)
    chosen = rng.sample(eligible, n)
    for idx, syns in chosen:
        replacement = rng.choice(syns)
        surfaces[idx] = _copy_casing(tc.tokens[idx].surface, replacement)
    edited = tuple(sorted(idx for idx, _ in chosen))
    return LexicalVariant(
        text=tc.rebuild(surfaces), kind=ATTACK_SYNONYM, n_edits=n, edited_tokens=edited
    )


_WS_SPLIT = re.compile(r"(\s+)")


def word_swap(claim: str, cfg: PerturbationConfig) -> LexicalVariant:
    """Exchange word positions, ``max(1, floor(rate * words))`` times.

    Words are whitespace-delimited chunks containing an alphanumeric
    character; attached punctuation travels with its word. Swapping whole
    chunks (rather than finer tokens) means rearrangement can never merge
    two tokens across a missing gap, so both the word multiset and the
    retrieval analyzer's term multiset are exactly preserved.
    """
    parts = _WS_SPLIT.split(claim)
    word_positions = [
        i for i in range(0, len(parts), 2) if any(ch.isalnum() for ch in parts[i])
    ]
    if len(word_positions) < 2:
        raise AttackInapplicable("word swap needs at least two words")
    n_swaps = max(1, math.floor(cfg.rate * len(word_positions)))
    rng = SplitMix64(cfg.seed)
    touched: set[int] = set()
    for _ in range(n_swaps):
        a, b = rng.sample(word_positions, 2)
        parts[a], parts[b] = parts[b], parts[a]
        touched.update((a, b))
    return LexicalVariant(
        text="".join(parts),
        kind=ATTACK_WORD_SWAP,
        n_edits=n_swaps,
        edited_tokens=tuple(sorted(word_positions.index(i) for i in touched)),
    )


def char_perturb(claim: str, cfg: PerturbationConfig) -> LexicalVariant:
    """Inject typos into ``max(1, floor(rate * eligible))`` long-enough tokens.

    Tokens shorter than ``min_word_len_char`` are never touched. Each
    target token receives one edit, or two when longer than
    ``long_word_len``; edits are drawn uniformly from adjacent-swap,
    deletion, insertion, and substitution, and the result is guaranteed to
    sit at exactly that edit distance from the original token.
    """
    tc = tokenize(claim)
    surfaces = [t.surface for t in tc.tokens]
    eligible = [i for i, t in enumerate(tc.tokens) if len(t.surface) >= cfg.min_word_len_char]
    if not eligible:
        raise AttackInapplicable("no token long enough to perturb")
    n_targets = max(1, math.floor(cfg.rate * len(eligible)))
    rng = SplitMix64(cfg.seed)
    targets = sorted(rng.sample(eligible, n_targets))
    for idx in targets:
        original = surfaces[idx]
        n_edits = 2 if len(original) > cfg.long_word_len else 1
        surfaces[idx] = _perturb_token(original, n_edits, rng)
    return LexicalVariant(
        text=tc.rebuild(surfaces),
        kind=ATTACK_CHAR_NOISE,
        n_edits=n_targets,
        edited_tokens=tuple(targets),
    )


def _perturb_token(token: str, k: int, rng: SplitMix64) -> str:
    for _ in range(32):
        candidate = token
        for _ in range(k):
            candidate = _one_edit(candidate, rng)
        if edit_distance(token, candidate) == k:
            return candidate
    # Deletions always land at exactly distance k; keep determinism by
    # drawing positions from the same stream.
    positions = rng.sample(range(1, len(token)), k)
    out = token
    for pos in sorted(positions, reverse=True):
        out = out[:pos] + out[pos + 1 :]
    return out


def _one_edit(token: str, rng: SplitMix64) -> str:
    ops = list(_EDIT_OPS)
    if len(token) < 3:
        ops.remove("swap")  # needs two editable adjacent positions
    op = rng.choice(ops)
    if op == "swap":
        i = 1 + rng.randrange(len(token) - 2)
        return token[:i] + token[i + 1] + token[i] + token[i + 2 :]
    if op == "delete":
        if len(token) <= 2:
            op = "substitute"  # keep at least two characters
        else:
            i = 1 + rng.randrange(len(token) - 1)
            return token[:i] + token[i + 1 :]
    if op == "insert":
        i = 1 + rng.randrange(len(token))
        return token[:i] + rng.choice(_LETTERS) + token[i:]
    i = 1 + rng.randrange(len(token) - 1)
    choices = [c for c in _LETTERS if c != token[i]]
    return token[:i] + rng.choice(choices) + token[i + 1 :]


def edit_distance(a: str, b: str) -> int:
    """Edit distance counting adjacent transposition as one operation."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return max(la, lb)
    prev2: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]

"""WordNet 3.0 plaintext database parser.

Reads the ``index.{pos}`` / ``data.{pos}`` file pairs of a WordNet 3.0
installation directly (the ``dict/`` directory of the public
distribution) and builds a part-of-speech keyed synonym lexicon. Only the
synset membership is consumed: for each index lemma, the words of all its
synsets become the synonym candidates.

Multi-word collocations (underscore lemmas) are skipped on both sides of
the mapping; token-level substitution should not splice phrases into a
claim. Synonym lists are lowercased, deduplicated, ordered by sense rank
then synset word order, and never contain the lemma itself.
"""

from __future__ import annotations

from pathlib import Path

POS_TAGS = ("noun", "verb", "adj", "adv")

# data.* word entries may carry adjective syntax markers, e.g. "galore(ip)"
_ADJ_MARKERS = ("(a)", "(p)", "(ip)")


class LexiconError(Exception):
    pass


def _strip_marker(word: str) -> str:
    for marker in _ADJ_MARKERS:
        if word.endswith(marker):
            return word[: -len(marker)]
    return word


def _parse_data_file(path: Path) -> dict[str, list[str]]:
    """Map synset offset -> member words (markers stripped, case kept)."""
    synsets: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("  ") or not line.strip():
                continue  # license header block
            fields = line.split(" ")
            if len(fields) < 5:
                raise LexiconError(f"malformed data line in {path.name}: {line[:50]!r}")
            offset = fields[0]
            try:
                w_cnt = int(fields[3], 16)
            except ValueError as exc:
                raise LexiconError(f"bad word count in {path.name} at offset {offset}") from exc
            words = []
            for i in range(w_cnt):
                words.append(_strip_marker(fields[4 + 2 * i]))
            synsets[offset] = words
    return synsets


def _parse_index_file(path: Path) -> dict[str, list[str]]:
    """Map lemma -> synset offsets in sense order."""
    entries: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("  ") or not line.strip():
                continue
            fields = line.split()
            if len(fields) < 6:
                raise LexiconError(f"malformed index line in {path.name}: {line[:50]!r}")
            lemma = fields[0]
            synset_cnt = int(fields[2])
            p_cnt = int(fields[3])
            offsets = fields[4 + p_cnt + 2 :]
            if len(offsets) != synset_cnt:
                raise LexiconError(
                    f"offset count mismatch for {lemma!r} in {path.name}: "
                    f"expected {synset_cnt}, found {len(offsets)}"
                )
            entries[lemma] = offsets
    return entries


class SynonymLexicon:
    """Case-insensitive (lemma, pos) -> synonyms lookup."""

    def __init__(self, entries: dict[tuple[str, str], tuple[str, ...]]):
        self._entries = entries
        self._pos_by_lemma: dict[str, set[str]] = {}
        for (lemma, pos) in entries:
            self._pos_by_lemma.setdefault(lemma, set()).add(pos)

    def __len__(self) -> int:
        return len(self._entries)

    def synonyms(self, lemma: str, pos: str) -> tuple[str, ...]:
        return self._entries.get((lemma.lower(), pos), ())

    def pos_tags(self, lemma: str) -> set[str]:
        """Parts of speech under which this lemma has synonyms."""
        return self._pos_by_lemma.get(lemma.lower(), set())

    @classmethod
    def from_mapping(cls, mapping: dict[tuple[str, str], list[str]]) -> "SynonymLexicon":
        """Build from a plain dict; used by tests and tiny fixture lexicons."""
        entries: dict[tuple[str, str], tuple[str, ...]] = {}
        for (lemma, pos), syns in mapping.items():
            lemma_l = lemma.lower()
            cleaned = tuple(
                dict.fromkeys(s.lower() for s in syns if s.lower() != lemma_l and "_" not in s)
            )
            if cleaned:
                entries[(lemma_l, pos)] = cleaned
        return cls(entries)

    @classmethod
    def load(cls, wordnet_dir: str | Path) -> "SynonymLexicon":
        """Parse ``index.{pos}``/``data.{pos}`` pairs under ``wordnet_dir``."""
        base = Path(wordnet_dir)
        entries: dict[tuple[str, str], tuple[str, ...]] = {}
        found_any = False
        for pos in POS_TAGS:
            index_path = base / f"index.{pos}"
            data_path = base / f"data.{pos}"
            if not index_path.exists() or not data_path.exists():
                continue
            found_any = True
            synsets = _parse_data_file(data_path)
            for lemma, offsets in _parse_index_file(index_path).items():
                if "_" in lemma:
                    continue
                seen: dict[str, None] = {}
                for offset in offsets:
                    for word in synsets.get(offset, ()):
                        low = word.lower()
                        if low == lemma or "_" in low:
                            continue
                        seen.setdefault(low)
                if seen:
                    entries[(lemma, pos)] = tuple(seen)
        if not found_any:
            raise LexiconError(f"no WordNet index/data files found under {base}")
        return cls(entries)

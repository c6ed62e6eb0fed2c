"""Page-level BM25 retrieval and recall measurement.

The analyzer lowercases and splits on non-alphanumeric characters;
no stemming or stopword removal unless asked for. Scoring uses the
Lucene-style formulation with the idf kept non-negative,

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
    score(q, d) = sum over query tokens of
        idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))

with defaults k1 = 0.9 and b = 0.4. Duplicate query tokens contribute
once per occurrence. Rankings are total: documents that match no query
term score exactly 0 and order lexicographically by page id, the same
tie rule applied to equal positive scores.

Index persistence is a little-endian binary layout with a version header:

    magic   4 bytes  b"CAIX"
    version u32      1
    k1, b   f64 f64
    N       u32      document count
    avgdl   f64
    N entries of     page_id (u32 length + UTF-8 bytes), doc_len u32
    V       u32      vocabulary size
    V entries of     term (u32 length + UTF-8 bytes), postings count u32,
                     then (doc ordinal u32, term frequency u32) pairs
"""

from __future__ import annotations

import math
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

_MAGIC = b"CAIX"
_VERSION = 1

_TERM_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_K1 = 0.9
DEFAULT_B = 0.4
REPORT_DEPTHS = (3, 5, 7, 10)


class RetrievalError(Exception):
    pass


def analyze(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop empty terms."""
    return _TERM_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    page_id: str
    text: str


@dataclass(frozen=True)
class RetrievalResult:
    claim_id: str
    ranked_pages: tuple[tuple[str, float], ...]
    k: int

    @property
    def page_ids(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.ranked_pages)


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    doc_ids: list[str] = field(default_factory=list)
    doc_len: list[int] = field(default_factory=list)
    avgdl: float = 0.0
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def score_all(self, query_terms: list[str]) -> dict[int, float]:
        """BM25 scores for every document matching at least one query term.

        Query tokens count with multiplicity, but accumulation runs over
        the sorted unique terms so the result is bit-identical under any
        permutation of the query (floating-point addition is not
        associative; the order must be canonical).
        """
        counts: dict[str, int] = {}
        for term in query_terms:
            counts[term] = counts.get(term, 0) + 1
        scores: dict[int, float] = {}
        for term in sorted(counts):
            plist = self.postings.get(term)
            if not plist:
                continue
            idf = self.idf(term)
            multiplicity = counts[term]
            for ordinal, tf in plist:
                dl = self.doc_len[ordinal]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
                contribution = multiplicity * (idf * tf * (self.k1 + 1.0) / denom)
                scores[ordinal] = scores.get(ordinal, 0.0) + contribution
        return scores

    def bm25_score(self, query_terms: list[str], page_id: str) -> float:
        """Score one document; absent terms contribute zero."""
        try:
            ordinal = self.doc_ids.index(page_id)
        except ValueError:
            raise RetrievalError(f"unknown page {page_id!r}") from None
        counts: dict[str, int] = {}
        for term in query_terms:
            counts[term] = counts.get(term, 0) + 1
        total = 0.0
        for term in sorted(counts):
            plist = self.postings.get(term)
            if not plist:
                continue
            tf = next((f for o, f in plist if o == ordinal), 0)
            if tf == 0:
                continue
            dl = self.doc_len[ordinal]
            denom = tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
            total += counts[term] * (self.idf(term) * tf * (self.k1 + 1.0) / denom)
        return total

    def retrieve(self, claim_text: str, k: int, claim_id: str = "") -> RetrievalResult:
        """Top-k pages for a claim query, ties broken by page id.

        When k exceeds the corpus size every document is returned;
        zero-score documents fill the tail in lexicographic order.
        """
        if k < 1:
            raise ValueError("retrieval depth k must be >= 1")
        scores = self.score_all(analyze(claim_text))
        ranked = sorted(
            ((self.doc_ids[o], s) for o, s in scores.items()),
            key=lambda item: (-item[1], item[0]),
        )
        if len(ranked) < min(k, self.n_docs):
            matched = {p for p, _ in ranked}
            fillers = sorted(p for p in self.doc_ids if p not in matched)
            ranked.extend((p, 0.0) for p in fillers)
        return RetrievalResult(claim_id=claim_id, ranked_pages=tuple(ranked[:k]), k=k)


def build_index(
    docs: Iterable[Document], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> InvertedIndex:
    index = InvertedIndex(k1=k1, b=b)
    seen: set[str] = set()
    for doc in docs:
        if doc.page_id in seen:
            raise RetrievalError(f"duplicate page_id {doc.page_id!r}")
        seen.add(doc.page_id)
        ordinal = len(index.doc_ids)
        index.doc_ids.append(doc.page_id)
        terms = analyze(doc.text)
        index.doc_len.append(len(terms))
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            index.postings.setdefault(term, []).append((ordinal, tf))
    if index.doc_ids:
        index.avgdl = sum(index.doc_len) / len(index.doc_len)
    return index


def recall_at_k(result: RetrievalResult, gold_pages: set[str], k: int) -> float:
    """Fraction of gold pages present in the top-k."""
    if not gold_pages:
        raise ValueError("gold page set must be non-empty")
    top = set(result.page_ids[:k])
    return len(gold_pages & top) / len(gold_pages)


def all_found_at_k(result: RetrievalResult, gold_pages: set[str], k: int) -> bool:
    """Secondary reading: every gold page retrieved within the top-k."""
    if not gold_pages:
        raise ValueError("gold page set must be non-empty")
    return gold_pages <= set(result.page_ids[:k])


def load_corpus(path: str | Path) -> Iterable[Document]:
    import json

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            yield Document(page_id=rec["page_id"], text=rec.get("text", ""))


# --- persistence ------------------------------------------------------------


def _write_str(fh, text: str) -> None:
    data = text.encode("utf-8")
    fh.write(struct.pack("<I", len(data)))
    fh.write(data)


def _read_str(fh) -> str:
    (length,) = struct.unpack("<I", fh.read(4))
    return fh.read(length).decode("utf-8")


def save_index(index: InvertedIndex, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<dd", index.k1, index.b))
        fh.write(struct.pack("<I", index.n_docs))
        fh.write(struct.pack("<d", index.avgdl))
        for page_id, dl in zip(index.doc_ids, index.doc_len):
            _write_str(fh, page_id)
            fh.write(struct.pack("<I", dl))
        terms = sorted(index.postings)
        fh.write(struct.pack("<I", len(terms)))
        for term in terms:
            plist = index.postings[term]
            _write_str(fh, term)
            fh.write(struct.pack("<I", len(plist)))
            for ordinal, tf in plist:
                fh.write(struct.pack("<II", ordinal, tf))


def load_index(path: str | Path) -> InvertedIndex:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise RetrievalError(f"{path} is not an index file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise RetrievalError(f"unsupported index version {version}")
        k1, b = struct.unpack("<dd", fh.read(16))
        (n_docs,) = struct.unpack("<I", fh.read(4))
        (avgdl,) = struct.unpack("<d", fh.read(8))
        index = InvertedIndex(k1=k1, b=b, avgdl=avgdl)
        for _ in range(n_docs):
            page_id = _read_str(fh)
            (dl,) = struct.unpack("<I", fh.read(4))
            index.doc_ids.append(page_id)
            index.doc_len.append(dl)
        (n_terms,) = struct.unpack("<I", fh.read(4))
        for _ in range(n_terms):
            term = _read_str(fh)
            (n_postings,) = struct.unpack("<I", fh.read(4))
            plist = []
            for _ in range(n_postings):
                ordinal, tf = struct.unpack("<II", fh.read(8))
                plist.append((ordinal, tf))
            index.postings[term] = plist
    return index

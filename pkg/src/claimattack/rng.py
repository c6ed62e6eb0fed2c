"""Portable seeded randomness.

All stochastic choices in the harness flow through SplitMix64, a tiny
64-bit generator with a published reference implementation, so that
variant generation and sampling reproduce bit-for-bit on any platform
and any Python build. Per-claim streams are derived with ``derive_seed``
so results do not depend on processing order.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def hash64(*parts: object) -> int:
    """FNV-1a over the UTF-8 rendering of ``parts`` joined by unit separators."""
    h = _FNV_OFFSET
    data = "\x1f".join(str(p) for p in parts).encode("utf-8")
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def derive_seed(experiment_seed: int, claim_id: str, attack_kind: str) -> int:
    """Stable per-(claim, attack) stream seed."""
    return hash64(experiment_seed, claim_id, attack_kind)


class SplitMix64:
    """SplitMix64 stream generator (Steele, Lea & Flood's mixing constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (unbiased)."""
        if n <= 0:
            raise ValueError("randrange() bound must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def choice(self, seq):
        if not seq:
            raise IndexError("choice() on empty sequence")
        return seq[self.randrange(len(seq))]

    def sample(self, seq, k: int) -> list:
        """k distinct elements, order of draw preserved."""
        if k > len(seq):
            raise ValueError(f"sample size {k} exceeds population {len(seq)}")
        pool = list(seq)
        out = []
        for _ in range(k):
            out.append(pool.pop(self.randrange(len(pool))))
        return out

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

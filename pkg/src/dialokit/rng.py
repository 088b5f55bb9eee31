"""Deterministic random streams shared by every stochastic operation.

The generator is SplitMix64: a handful of integer operations, trivially
portable, and bit-exact across platforms. Each document gets its own stream
derived from (global seed, document id) so corpus-level parallel maps stay
order-independent and reproducible.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: str) -> int:
    """FNV-1a hash of the UTF-8 encoding of ``data``, as an unsigned 64-bit int."""
    h = _FNV_OFFSET
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def mix64(z: int) -> int:
    """SplitMix64 finalizer: diffuses ``z`` into a well-mixed 64-bit value."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class RngStream:
    """SplitMix64 stream fully determined by its 64-bit state.

    Two streams constructed with equal states produce identical draw
    sequences forever.
    """

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform01(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * 2.0**-53

    def bernoulli(self, p: float) -> bool:
        return self.uniform01() < p

    def poisson(self, lam: float) -> int:
        """Knuth's multiplication method; fine for the small lambdas used here."""
        limit = math.exp(-lam)
        k = 0
        prod = self.uniform01()
        while prod >= limit:
            k += 1
            prod *= self.uniform01()
        return k

    def choice(self, n: int) -> int:
        """Index in [0, n). Modulo bias is <= n / 2**64, documented as acceptable."""
        if n <= 0:
            raise ValueError("choice() requires a non-empty candidate set")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.choice(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_rng(global_seed: int, doc_id: str) -> RngStream:
    """Per-document stream: seed XOR FNV-1a(doc_id), finalized through mix64."""
    return RngStream(mix64((global_seed ^ fnv1a_64(doc_id)) & _MASK64))

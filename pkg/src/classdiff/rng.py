"""Portable deterministic randomness for subset sampling and split seeds.

Seeded subset choices must reproduce bit-for-bit across platforms and
implementations, so the generator is pinned here rather than delegated to
a library default: a SplitMix64 stream drives a Fisher-Yates prefix
shuffle, and derived seeds mix in string labels via 64-bit FNV-1a.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class SplitMix64:
    """Counter-based 64-bit generator (SplitMix64)."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) without modulo bias."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK - (_MASK + 1) % bound
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % bound


def fisher_yates_prefix(items: list, k: int, seed: int) -> list:
    """First k elements of a seeded Fisher-Yates shuffle of ``items``."""
    rng = SplitMix64(seed)
    arr = list(items)
    n = len(arr)
    for i in range(min(k, n - 1)):
        j = i + rng.below(n - i)
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:k]


def derive_seed(seed: int, *parts: str) -> int:
    """Stable 64-bit sub-seed from a base seed and string parts."""
    h = SplitMix64(seed).next_u64()
    for part in parts:
        for byte in part.encode("utf-8"):
            h = ((h ^ byte) * _FNV_PRIME) & _MASK
        h = (h ^ 0xFF) * _FNV_PRIME & _MASK  # separator so ("ab","c") != ("a","bc")
    return SplitMix64(h).next_u64()

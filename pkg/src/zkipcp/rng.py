"""Deterministic randomness: a counter-mode SHA-256 generator with domain
separation, so every experiment is reproducible from (seed, label) alone."""

from __future__ import annotations

import hashlib
import struct


class DomainRNG:
    """Counter-mode generator over SHA-256; independent streams per label."""

    __slots__ = ("_key", "_counter", "_buf", "_bits")

    def __init__(self, seed, label: str = ""):
        if isinstance(seed, int):
            seed = seed.to_bytes(seed.bit_length() // 8 + 2, "little", signed=True)
        elif isinstance(seed, str):
            seed = seed.encode()
        elif not isinstance(seed, bytes):
            seed = repr(seed).encode()
        self._key = hashlib.sha256(seed + b"\x00" + label.encode()).digest()
        self._counter = 0
        self._buf = 0
        self._bits = 0

    def child(self, label: str) -> "DomainRNG":
        return DomainRNG(self._key, label)

    def _refill(self):
        block = hashlib.sha256(self._key + struct.pack("<Q", self._counter)).digest()
        self._counter += 1
        self._buf |= int.from_bytes(block, "little") << self._bits
        self._bits += 256

    def getrandbits(self, k: int) -> int:
        while self._bits < k:
            self._refill()
        out = self._buf & ((1 << k) - 1)
        self._buf >>= k
        self._bits -= k
        return out

    def randrange(self, n: int) -> int:
        """Uniform in [0, n) by rejection sampling on the bit stream."""
        if n <= 0:
            raise ValueError("randrange needs a positive bound")
        k = (n - 1).bit_length() or 1
        while True:
            v = self.getrandbits(k)
            if v < n:
                return v

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def field_element(self, field) -> int:
        return field.element(self.randrange(field.order))

    def nonzero(self, field) -> int:
        return field.element(1 + self.randrange(field.order - 1))

    def from_subset(self, subset) -> int:
        return subset.elements[self.randrange(len(subset.elements))]

    def not_in(self, field, excluded) -> int:
        """Uniform over the field minus `excluded` (rejection on enumeration)."""
        ex = excluded if isinstance(excluded, (set, frozenset)) else set(excluded)
        while True:
            v = field.element(self.randrange(field.order))
            if v not in ex:
                return v

    def shuffle(self, seq: list):
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample_points(self, field, m: int, count: int) -> list[tuple]:
        return [tuple(self.field_element(field) for _ in range(m)) for _ in range(count)]

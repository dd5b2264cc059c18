"""Seeded random streams with reproducible, order-independent substreams.

Every random draw in a simulation flows through a RandomStream. Streams are
backed by PCG64, which produces identical sequences for identical seeds on
every platform. Per-role substreams are keyed by (run seed, instance id) via
SHA-256, so the stream a role sees never depends on registration or
scheduling order.
"""

from __future__ import annotations

import hashlib

import numpy as np


class RandomStream:
    """A seeded source of random bits, floats, and permutations."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed & (2**64 - 1)))

    @classmethod
    def substream(cls, seed: int, key: str) -> "RandomStream":
        """Derive an independent stream from a run seed and a stable string key."""
        digest = hashlib.sha256(f"{int(seed)}\x00{key}".encode("utf-8")).digest()
        return cls(int.from_bytes(digest[:8], "big"))

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._gen.random())

    def bit(self) -> int:
        """Uniform bit."""
        return int(self._gen.integers(0, 2))

    def bits(self, n: int) -> np.ndarray:
        """Array of n uniform bits (uint8)."""
        return self._gen.integers(0, 2, size=n, dtype=np.uint8)

    def integers(self, high: int) -> int:
        """Uniform integer in [0, high)."""
        return int(self._gen.integers(0, high))

    def integer64(self) -> int:
        """Uniform 64-bit integer (used for in-protocol shuffle seeds)."""
        return int(self._gen.integers(0, 2**63))

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n)."""
        return self._gen.permutation(n)

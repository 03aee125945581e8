"""Seeded randomness.

Every sampling arrow in the library goes through an explicit :class:`Rng`.
An ``Rng`` is single-owner: do not share one between threads, use
:meth:`Rng.spawn` to derive independent streams instead.
"""

from __future__ import annotations

import hashlib
import secrets

import numpy as np

SEED_BYTES = 32


def _coerce_seed(seed) -> bytes:
    if seed is None:
        return secrets.token_bytes(SEED_BYTES)
    if isinstance(seed, Rng):
        return seed.seed
    if isinstance(seed, (bytes, bytearray)):
        seed = bytes(seed)
        if len(seed) != SEED_BYTES:
            # short or long byte strings are hashed down to a full seed
            seed = hashlib.sha256(seed).digest()
        return seed
    if isinstance(seed, str):
        raw = bytes.fromhex(seed)
        if len(raw) != SEED_BYTES:
            raise ValueError(f"hex seed must encode {SEED_BYTES} bytes, got {len(raw)}")
        return raw
    if isinstance(seed, (int, np.integer)):
        seed = int(seed)
        if seed < 0:
            raise ValueError("integer seed must be non-negative")
        return seed.to_bytes(SEED_BYTES, "little") if seed.bit_length() <= 256 else (
            hashlib.sha256(seed.to_bytes((seed.bit_length() + 7) // 8, "little")).digest()
        )
    raise TypeError(f"cannot build a seed from {type(seed).__name__}")


class Rng:
    """Deterministic bit source keyed by a 32-byte seed.

    Accepts ``bytes`` (32 bytes), a 64-character hex string, a non-negative
    ``int`` or ``None`` (fresh OS entropy). The stream is PCG64 keyed by the
    seed; children from :meth:`spawn` are keyed by ``sha256(seed || counter)``.
    """

    __slots__ = ("seed", "_gen", "_children")

    def __init__(self, seed=None):
        self.seed = _coerce_seed(seed)
        ss = np.random.SeedSequence(int.from_bytes(self.seed, "little"))
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._children = 0

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed.hex()[:16]}...)"

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def spawn(self, count: int = 1) -> list[Rng]:
        out = []
        for _ in range(count):
            tag = self._children.to_bytes(8, "little")
            self._children += 1
            out.append(Rng(hashlib.sha256(self.seed + b"spawn" + tag).digest()))
        return out

    def words(self, shape) -> np.ndarray:
        """Uniform 64-bit words."""
        return self._gen.bit_generator.random_raw(shape).astype(np.uint64, copy=False)

    def bits(self, shape) -> np.ndarray:
        """Uniform bits as a uint8 array of 0/1."""
        return self._gen.integers(0, 2, size=shape, dtype=np.uint8)

    def bit(self) -> int:
        return int(self._gen.integers(0, 2))

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def random(self, size=None):
        return self._gen.random(size)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound < 2**63:
            return int(self._gen.integers(0, bound))
        nbits = bound.bit_length()
        nwords = (nbits + 63) // 64
        excess = nwords * 64 - nbits
        while True:
            raw = self.words(nwords)
            value = int.from_bytes(raw.astype("<u8").tobytes(), "little") >> excess
            if value < bound:
                return value

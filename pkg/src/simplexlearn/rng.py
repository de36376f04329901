"""Counter-based random streams.

A stream is identified by ``(master_seed, stream_id)`` and backed by a Philox
generator keyed with exactly those two 64-bit words, so the output of any
stream never depends on how many other streams were consumed before it or on
the thread that consumes it.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def mix_stream_id(kind: str, *indices: int) -> int:
    """Stable 64-bit id for a task kind and an index tuple (blake2b, little-endian)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(kind.encode("utf-8"))
    for idx in indices:
        h.update(b"\x00")
        h.update(struct.pack("<q", int(idx)))
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, kind: str, *indices: int) -> "RngStream":
        """Substream whose id mixes this stream's id with ``kind`` and ``indices``."""
        return RngStream(self.master_seed, mix_stream_id(kind, self.stream_id, *indices))


def as_generator(rng) -> np.random.Generator:
    """Accept an :class:`RngStream`, a numpy ``Generator``, an int seed or ``None``."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")

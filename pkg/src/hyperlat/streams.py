"""Counter-based random streams.

Every sampler in this package is a pure function of its parameters and a
StreamKey.  A StreamKey addresses one Philox counter-based stream through
the 128-bit key (master_seed, stream_index); child streams are derived by
an invertible 64-bit mix, so results never depend on execution order or
worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # splitmix64 increment


def _splitmix64(x: int) -> int:
    # Finalizer of splitmix64; a bijection on 64-bit words.
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class StreamKey:
    """Address of one independent random stream.

    Children of one parent never collide with each other: the derivation
    is splitmix64 of the parent state advanced by (index+1) increments,
    which is injective in the index.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not 0 <= self.stream_index <= _MASK64:
            raise ValueError("stream_index must be an unsigned 64-bit integer")

    def child(self, index: int) -> "StreamKey":
        if index < 0:
            raise ValueError("child index must be nonnegative")
        mixed = _splitmix64((self.stream_index + (index + 1) * _GOLDEN) & _MASK64)
        return StreamKey(self.master_seed, mixed)

    def generator(self) -> np.random.Generator:
        """Fresh Generator for this stream; calling twice replays the stream."""
        key128 = (self.master_seed << 64) | self.stream_index
        return np.random.Generator(np.random.Philox(key=key128))

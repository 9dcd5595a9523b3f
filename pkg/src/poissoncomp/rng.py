"""Seeded, splittable random streams."""

from __future__ import annotations

import zlib

import numpy as np

DEFAULT_SEED = 20240611


class RngStream:
    """PCG64 generator keyed by ``(seed, stream_index)``.

    Equal keys give identical variate sequences; distinct stream indices give
    independent streams through numpy's ``SeedSequence`` spawn keys.  Children
    returned by :meth:`spawn` extend the key, so their streams never collide
    with the parent's or with each other.
    """

    def __init__(self, seed: int = DEFAULT_SEED, stream_index: int = 0, _key: tuple = ()):
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if stream_index < 0:
            raise ValueError("stream_index must be nonnegative")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self._key = (self.stream_index,) + tuple(_key)
        self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self._key)))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index}, key={self._key})"

    def spawn(self, child: int) -> "RngStream":
        """Independent child stream; the same ``child`` index always gives the same stream."""
        return RngStream(self.seed, self.stream_index, self._key[1:] + (int(child),))

    @classmethod
    def for_name(cls, seed: int, name: str) -> "RngStream":
        """Stream whose index is derived from a label, independent of call order."""
        return cls(seed, zlib.crc32(name.encode("utf-8")))

    # thin pass-throughs so samplers read naturally
    def random(self, size=None):
        return self.generator.random(size)

    def exponential(self, size=None):
        return self.generator.standard_exponential(size)

    def poisson(self, lam, size=None):
        return self.generator.poisson(lam, size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

"""Seeded, splittable random streams.

A :class:`RandomSource` is a Philox4x64 counter-based generator whose 128-bit
key is derived from a 64-bit seed and a path of stream indices. Children are
addressed by index, so the numbers consumed by observation ``i`` (or trial
``t``) never depend on how work is scheduled.

Key derivation folds the seed and every path element through the SplitMix64
finalizer into two independent 64-bit lanes. Philox and SplitMix64 are both
fully specified integer algorithms, so identical ``(seed, path)`` pairs give
identical streams on every platform.
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_LANE_SALT = (0x243F6A8885A308D3, 0x13198A2E03707344)
_INV_2_52 = 1.0 / 4503599627370496.0


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to ``x + golden``."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, path: tuple[int, ...]) -> tuple[int, int]:
    lanes = []
    for salt in _LANE_SALT:
        h = splitmix64((seed & _MASK64) ^ salt)
        for depth, index in enumerate(path):
            h = splitmix64(h ^ splitmix64((index & _MASK64) + depth * _GOLDEN))
        lanes.append(h)
    return lanes[0], lanes[1]


def raw_to_open_unit(words: np.ndarray) -> np.ndarray:
    """Map uint64 words to reals strictly inside (0, 1) using 52 bits.

    With 53 bits the top word would round up to exactly 1.0.
    """
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * _INV_2_52


def _philox_state(key: tuple[int, int]) -> dict:
    zeros = np.zeros(4, dtype=np.uint64)
    return {
        "bit_generator": "Philox",
        "state": {"counter": zeros, "key": np.array(key, dtype=np.uint64)},
        "buffer": zeros.copy(),
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }


class RandomSource:
    """Deterministic random stream identified by ``(seed, path)``.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed (larger values are reduced mod 2**64).
    path : tuple of int
        Child-stream indices from the root stream.

    Examples
    --------
    >>> a = RandomSource(7).child(3).uniforms(2)
    >>> b = RandomSource(7).child(3).uniforms(2)
    >>> bool((a == b).all())
    True
    """

    __slots__ = ("seed", "path", "_key", "_generator")

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed) & _MASK64
        self.path = tuple(int(i) for i in path)
        self._key = derive_key(self.seed, self.path)
        self._generator: np.random.Generator | None = None

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, path={self.path})"

    @property
    def key(self) -> tuple[int, int]:
        return self._key

    @property
    def generator(self) -> np.random.Generator:
        """numpy Generator backed by this stream's Philox state."""
        if self._generator is None:
            bg = np.random.Philox(key=np.array(self._key, dtype=np.uint64))
            self._generator = np.random.Generator(bg)
        return self._generator

    def child(self, index: int) -> RandomSource:
        if index < 0:
            raise ValueError(f"stream index must be non-negative, got {index}")
        return RandomSource(self.seed, self.path + (index,))

    def iter_children(self, start: int, stop: int) -> Iterator[RandomSource]:
        """Yield ``child(start) .. child(stop - 1)`` cheaply.

        The yielded sources share a single Philox object that is re-keyed on
        each step, so a yielded source is only valid until the next one is
        requested. The numbers produced are identical to ``child(i)``.
        """
        bg = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        gen = np.random.Generator(bg)
        for index in range(start, stop):
            src = RandomSource.__new__(RandomSource)
            src.seed = self.seed
            src.path = self.path + (index,)
            src._key = derive_key(self.seed, src.path)
            bg.state = _philox_state(src._key)
            src._generator = gen
            yield src

    def words(self, size: int) -> np.ndarray:
        """``size`` raw uint64 words."""
        return self.generator.bit_generator.random_raw(size)

    def uniforms(self, size: int) -> np.ndarray:
        """``size`` reals in the open interval (0, 1)."""
        return raw_to_open_unit(self.words(size))

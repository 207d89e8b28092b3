"""Value types for the structured domains: bit strings, set partitions and
spin lattices. All are immutable and hashable so they can key pmf tables."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class BitString:
    """Fixed-length vector of bits; ``bits[0]`` is the first (leftmost) bit."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0/1, got {self.bits}")

    @classmethod
    def from_str(cls, text: str) -> BitString:
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def from_code(cls, code: int, k: int) -> BitString:
        """Inverse of :attr:`code`."""
        return cls(tuple((code >> (k - 1 - i)) & 1 for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.bits)

    @cached_property
    def code(self) -> int:
        """Big-endian integer value; integer order equals dictionary order."""
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    @cached_property
    def ones(self) -> int:
        return sum(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def all_bitstrings(k: int) -> list[BitString]:
    return [BitString.from_code(c, k) for c in range(1 << k)]


@dataclass(frozen=True)
class Partition:
    """Set partition of ``{1..N}``.

    ``blocks`` is canonical: each block is sorted ascending and blocks are
    sorted by their least element.
    """

    blocks: tuple[tuple[int, ...], ...]
    N: int

    def __init__(self, blocks: Iterable[Iterable[int]], N: int | None = None):
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0))
        if N is None:
            N = sum(len(b) for b in canon)
        object.__setattr__(self, "blocks", canon)
        object.__setattr__(self, "N", int(N))
        self._validate()

    def _validate(self):
        seen = [b for block in self.blocks for b in block]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("partition has an empty block")
        if sorted(seen) != list(range(1, self.N + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition 1..{self.N}")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Partition:
        """Build from a block label per element (element ``i + 1`` has ``labels[i]``)."""
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(i + 1)
        # blocks appear in order of least element and fill ascending, so the
        # grouping is already canonical and covers 1..N
        out = object.__new__(cls)
        object.__setattr__(out, "blocks", tuple(map(tuple, groups.values())))
        object.__setattr__(out, "N", len(labels))
        return out

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def labels(self) -> list[int]:
        """Restricted growth string: block index (by least element) per element."""
        out = [0] * self.N
        for j, block in enumerate(self.blocks):
            for e in block:
                out[e - 1] = j
        return out

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def iter_partitions(N: int) -> Iterator[Partition]:
    """All partitions of ``{1..N}`` via restricted growth strings."""
    if N < 1:
        raise ValueError("N must be >= 1")
    labels = [0] * N

    def rec(i: int, top: int):
        if i == N:
            yield Partition.from_labels(labels)
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    labels[0] = 0
    yield from rec(1, 0)


class SpinLattice:
    """Square ``k x k`` grid of +1/-1 spins (read-only)."""

    __slots__ = ("spins", "_hash")

    def __init__(self, spins):
        arr = np.array(spins, dtype=np.int8)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"lattice must be square, got shape {arr.shape}")
        if arr.shape[0] < 1 or not np.all(np.abs(arr) == 1):
            raise ValueError("every spin must be +1 or -1")
        arr.setflags(write=False)
        self.spins = arr
        self._hash = hash((arr.shape[0], arr.tobytes()))

    @property
    def k(self) -> int:
        return self.spins.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, SpinLattice) and np.array_equal(self.spins, other.spins)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SpinLattice(k={self.k}, {self.spins.tolist()})"

    @classmethod
    def from_code(cls, code: int, k: int) -> SpinLattice:
        """Row-major; bit ``i`` (MSB first) set means spin ``i`` is +1."""
        n = k * k
        flat = [1 if (code >> (n - 1 - i)) & 1 else -1 for i in range(n)]
        return cls(np.array(flat, dtype=np.int8).reshape(k, k))


def all_lattices(k: int) -> list[SpinLattice]:
    if k * k > 20:
        raise ValueError(f"refusing to enumerate 2**{k * k} lattices")
    return [SpinLattice.from_code(c, k) for c in range(1 << (k * k))]

from __future__ import annotations

import numpy as np

from ..domains import BitString, all_bitstrings
from ..streams import RandomSource
from .base import DiscreteModel, MixtureModel

KINDS = ("ind", "odd", "tie")


class BitStringFamily(DiscreteModel):
    """Uniform distribution on the length-``k`` strings meeting a predicate.

    * ``ind``: every string.
    * ``odd``: strings with an odd number of ones.
    * ``tie``: strings whose first ``k/2`` bits are all equal.

    Each family gives every single bit marginal probability 1/2.
    """

    MAX_ENUM_K = 20

    def __init__(self, k: int, kind: str = "ind"):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        if k < 2:
            raise ValueError("k must be >= 2")
        if kind == "tie" and k % 2:
            raise ValueError("kind='tie' requires even k")
        self.k = k
        self.kind = kind
        self.name = f"bits_{kind}({k})"
        free = {"ind": k, "odd": k - 1, "tie": k // 2 + 1}[kind]
        self._mass = 2.0 ** -free

    def in_support(self, x: BitString) -> bool:
        if self.kind == "ind":
            return True
        if self.kind == "odd":
            return x.ones % 2 == 1
        half = x.bits[: self.k // 2]
        return all(b == half[0] for b in half)

    def pmf(self, x: BitString) -> float:
        if x.k != self.k:
            return 0.0
        return self._mass if self.in_support(x) else 0.0

    def sample_bits(self, rng: RandomSource, size: int) -> np.ndarray:
        """``(size, k)`` uint8 array of draws."""
        bits = rng.generator.integers(0, 2, size=(size, self.k), dtype=np.uint8)
        if self.kind == "odd":
            bits[:, -1] = 1 - (bits[:, :-1].sum(axis=1) % 2)
        elif self.kind == "tie":
            bits[:, : self.k // 2] = bits[:, :1]
        return bits

    def sample_batch(self, rng: RandomSource, size: int) -> list[BitString]:
        return [BitString(tuple(row)) for row in self.sample_bits(rng, size).tolist()]

    def enumerate(self) -> list[BitString]:
        if self.k > self.MAX_ENUM_K:
            raise ValueError(f"enumeration limited to k <= {self.MAX_ENUM_K}")
        return all_bitstrings(self.k)


def bitstring_family(k: int, kind: str) -> BitStringFamily:
    return BitStringFamily(k, kind)


def bitstring_alternative(k: int, kind: str, w: float) -> MixtureModel:
    """``w * p_kind + (1 - w) * p_ind``."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {w}")
    return MixtureModel(
        [w, 1.0 - w],
        [BitStringFamily(k, kind), BitStringFamily(k, "ind")],
        name=f"{w:g}*bits_{kind}({k})+{1 - w:g}*bits_ind({k})",
    )

"""Concrete total orders for bit strings, set partitions, spin lattices and
finite pmf tables."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np
from scipy import ndimage

from .domains import BitString, Partition, SpinLattice
from .ranking import Comparison, ComparatorOrder, KeyOrder, TotalOrder, natural_order

# --- bit strings ----------------------------------------------------------


def _same_length(a: BitString, b: BitString) -> None:
    if a.k != b.k:
        raise ValueError(f"bit strings differ in length: {a.k} vs {b.k}")


def lex_order() -> TotalOrder:
    """Dictionary order, first differing bit decides, 0 < 1."""
    return KeyOrder("lex", key=lambda x: x.code, check=_same_length)


def parity_order() -> TotalOrder:
    """Even number of ones before odd, ties by dictionary order."""
    return KeyOrder("parity", key=lambda x: ((x.ones & 1) << x.k) | x.code, check=_same_length)


def ones_order() -> TotalOrder:
    """Fewer ones first, ties by dictionary order."""
    return KeyOrder("ones", key=lambda x: (x.ones << x.k) | x.code, check=_same_length)


# --- partitions -----------------------------------------------------------


def compare_partitions(a: Partition, b: Partition) -> Comparison:
    """Fewer blocks first; then, block by block in order of least element,
    the smaller block first and, for equal sizes, the block whose sorted
    elements are lexicographically smaller."""
    if a.N != b.N:
        raise ValueError(f"partitions of different ground sets: N={a.N} vs N={b.N}")
    if a.num_blocks < b.num_blocks:
        return Comparison.LT
    if a.num_blocks > b.num_blocks:
        return Comparison.GT
    for pa, pb in zip(a.blocks, b.blocks):
        if len(pa) < len(pb):
            return Comparison.LT
        if len(pa) > len(pb):
            return Comparison.GT
        for ea, eb in zip(pa, pb):
            if ea < eb:
                return Comparison.LT
            if ea > eb:
                return Comparison.GT
    return Comparison.EQ


def partition_key(x: Partition) -> tuple:
    key = [x.num_blocks]
    for block in x.blocks:
        key.append(len(block))
        key.extend(block)
    return tuple(key)


def partition_order() -> TotalOrder:
    return KeyOrder("partition", key=partition_key, compare=compare_partitions)


# --- probe composites -----------------------------------------------------


def probe_composite(
    probes: Sequence[Callable], final_tiebreak: TotalOrder, name: str = "probes"
) -> TotalOrder:
    """Compare probe vectors lexicographically, then fall back to ``final_tiebreak``."""
    probes = tuple(probes)
    if not probes:
        raise ValueError("need at least one probe")

    def key(x):
        return tuple(p(x) for p in probes) + (final_tiebreak.key(x),)

    return KeyOrder(name, key=key)


def ising_energy(x: SpinLattice) -> int:
    s = x.spins.astype(np.int64)
    return int((s[:, 1:] * s[:, :-1]).sum() + (s[1:, :] * s[:-1, :]).sum())


def ising_magnetization(x: SpinLattice) -> int:
    return int(x.spins.sum(dtype=np.int64))


def ising_components(x: SpinLattice) -> int:
    """Number of 4-connected clusters of +1 spins."""
    return int(ndimage.label(x.spins > 0)[1])


def _same_side(a: SpinLattice, b: SpinLattice) -> None:
    if a.k != b.k:
        raise ValueError(f"lattices differ in size: {a.k} vs {b.k}")


def spin_lex_order() -> TotalOrder:
    """Row-major dictionary order on spins, -1 < +1."""
    # int8 -1 is byte 0xff, so map spins to 0/1 before keying on bytes
    return KeyOrder("spin-lex", key=lambda x: (x.spins > 0).tobytes(), check=_same_side)


def ising_order() -> TotalOrder:
    """Energy, then magnetization, then +1 component count, then spin order."""
    return probe_composite(
        (ising_energy, ising_magnetization, ising_components), spin_lex_order(), name="ising-epm"
    )


# --- optimal order for a known pair ---------------------------------------


def _as_pmf(v, label: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{label} must be a non-empty vector")
    if np.any(arr < 0) or abs(math.fsum(arr) - 1.0) > 1e-9:
        raise ValueError(f"{label} must be non-negative and sum to 1")
    return arr


def optimal_order(p, q, elements: Sequence | None = None) -> TotalOrder:
    """Sort by ``q(x) - p(x)`` descending, ties by ascending domain index.

    ``p`` and ``q`` are probability vectors over the same indexed domain.
    Without ``elements`` the domain is the indices ``0..K-1``.
    """
    p = _as_pmf(p, "p")
    q = _as_pmf(q, "q")
    if p.size != q.size:
        raise ValueError(f"pmf tables have different domains ({p.size} vs {q.size})")
    h = q - p
    order = np.lexsort((np.arange(h.size), -h))
    position = np.empty(h.size, dtype=np.int64)
    position[order] = np.arange(h.size)

    if elements is None:
        def key(x):
            if not 0 <= int(x) < h.size:
                raise ValueError(f"element {x} outside domain 0..{h.size - 1}")
            return int(position[int(x)])

        def batch(xs):
            arr = np.asarray(xs)
            return position[arr] if arr.dtype.kind in "iu" else None

        return KeyOrder("optimal", key=key, batch_keys=batch)

    if len(elements) != h.size:
        raise ValueError("elements and pmf tables differ in length")
    lookup = {x: int(position[i]) for i, x in enumerate(elements)}
    return KeyOrder("optimal", key=lookup.__getitem__)


# --- registry -------------------------------------------------------------

ORDER_NAMES = ("natural", "lex", "parity", "ones", "partition", "ising-epm", "optimal")


def get_order(name: str, **params) -> TotalOrder:
    """Order by name; ``optimal`` needs ``p`` and ``q`` tables."""
    if name == "optimal":
        return optimal_order(params["p"], params["q"], params.get("elements"))
    factories = {
        "natural": natural_order,
        "lex": lex_order,
        "parity": parity_order,
        "ones": ones_order,
        "partition": partition_order,
        "ising-epm": ising_order,
    }
    if name not in factories:
        raise ValueError(f"unknown order {name!r}; choose from {ORDER_NAMES}")
    return factories[name]()


def comparator(order: TotalOrder) -> ComparatorOrder:
    """Wrap ``order`` so only its ``compare`` is visible (no keys)."""
    return ComparatorOrder(order.name, order.compare)

"""Stochastic ranks of observations against freshly simulated candidates.

The rank of an observation ``y`` among candidate draws ``x_1..x_m`` counts the
draws strictly below ``y`` plus the tied draws whose paired uniform falls
below the observation's uniform. Pairing every draw with its own uniform is
what makes the rank exactly uniform on ``{0..m}`` when ``y`` comes from the
candidate distribution; breaking each tie with an independent coin flip does
not (see :func:`coin_flip_rank`).
"""

from __future__ import annotations

import enum
import functools
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from .streams import RandomSource


class Comparison(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _sign(a, b) -> Comparison:
    if a < b:
        return Comparison.LT
    if a == b:
        return Comparison.EQ
    return Comparison.GT


class TotalOrder:
    """Strict total order on a domain, seen through a three-way comparator.

    Subclasses override :meth:`compare`, or :meth:`key` when elements map
    to naturally ordered keys. :meth:`batch_keys` may return a 1-d numpy
    array of scalar keys for a batch, enabling vectorized ranking.
    """

    name = "order"

    def compare(self, a, b) -> Comparison:
        return _sign(self.key(a), self.key(b))

    def key(self, x) -> Any:
        return self._cmp_key(x)

    @functools.cached_property
    def _cmp_key(self):
        return functools.cmp_to_key(self.compare)

    def batch_keys(self, xs) -> np.ndarray | None:
        return None

    def keys(self, xs) -> Sequence:
        bk = self.batch_keys(xs)
        if bk is not None:
            return bk
        return [self.key(x) for x in xs]

    def sorted(self, xs) -> list:
        return sorted(xs, key=self.key)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name!r}>"


class KeyOrder(TotalOrder):
    """Order induced by a key function.

    ``check`` validates operand pairs in :meth:`compare`. ``compare`` may
    supply an explicit comparator that the key must agree with.
    """

    def __init__(
        self,
        name: str,
        key: Callable[[Any], Any],
        batch_keys: Callable[[Any], np.ndarray | None] | None = None,
        check: Callable[[Any, Any], None] | None = None,
        compare: Callable[[Any, Any], Comparison] | None = None,
    ):
        self.name = name
        self._key = key
        self._batch_keys = batch_keys
        self._check = check
        self._compare = compare

    def key(self, x):
        return self._key(x)

    def batch_keys(self, xs):
        return None if self._batch_keys is None else self._batch_keys(xs)

    def compare(self, a, b) -> Comparison:
        if self._compare is not None:
            return Comparison(self._compare(a, b))
        if self._check is not None:
            self._check(a, b)
        return _sign(self._key(a), self._key(b))


class ComparatorOrder(TotalOrder):
    """Order given only by a procedure returning LT/EQ/GT."""

    def __init__(self, name: str, compare: Callable[[Any, Any], Comparison]):
        self.name = name
        self._compare = compare

    def compare(self, a, b) -> Comparison:
        return Comparison(self._compare(a, b))


def natural_order() -> TotalOrder:
    """The usual order on numbers."""
    def batch(xs):
        arr = np.asarray(xs)
        return arr if arr.ndim == 1 and arr.dtype.kind in "iuf" else None

    return KeyOrder("natural", key=lambda x: x, batch_keys=batch)


def _check_unit(values, what: str) -> None:
    arr = np.asarray(values, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError(f"{what} must lie in the open interval (0, 1)")


def stochastic_rank(y, xs: Sequence, u0: float, us: Sequence[float], order: TotalOrder) -> int:
    """Rank of ``y`` among ``xs`` with paired-uniform tie breaking.

    Returns the number of ``xs[k]`` strictly below ``y`` plus the number of
    ``xs[k]`` equal to ``y`` with ``us[k] < u0``.
    """
    if len(xs) != len(us):
        raise ValueError(f"got {len(xs)} candidates but {len(us)} tie-break uniforms")
    if len(xs) < 1:
        raise ValueError("need at least one candidate sample")
    _check_unit([u0], "u0")
    _check_unit(us, "us")
    rank = 0
    for x, u in zip(xs, us):
        c = order.compare(x, y)
        if c is Comparison.LT or (c is Comparison.EQ and u < u0):
            rank += 1
    return rank


def coin_flip_rank(y, xs: Sequence, flips: Sequence[int], order: TotalOrder) -> int:
    """Rank with each tie broken by its own fair coin.

    Kept only as a counterexample: on a one-point domain this is
    Binomial(m, 1/2), not uniform.
    """
    rank = 0
    for x, f in zip(xs, flips):
        c = order.compare(x, y)
        rank += c is Comparison.LT or (c is Comparison.EQ and bool(f))
    return rank


def _rank_keys(ky, kxs, u0: float, us: np.ndarray) -> int:
    if isinstance(kxs, np.ndarray):
        below = np.count_nonzero(kxs < ky)
        ties = np.count_nonzero((kxs == ky) & (us < u0))
        return int(below + ties)
    rank = 0
    for kx, u in zip(kxs, us):
        if kx < ky or (kx == ky and u < u0):
            rank += 1
    return rank


@dataclass(frozen=True)
class RankSample:
    observation: Any
    rank: int
    m: int

    def __post_init__(self):
        if not 0 <= self.rank <= self.m:
            raise ValueError(f"rank {self.rank} outside [0, {self.m}]")


@dataclass(frozen=True)
class RankHistogram:
    """Counts of ranks ``0..m``."""

    m: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if len(self.counts) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} bins, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @classmethod
    def from_ranks(cls, ranks, m: int) -> RankHistogram:
        ranks = np.asarray(ranks, dtype=np.int64)
        if ranks.size and (ranks.min() < 0 or ranks.max() > m):
            raise ValueError(f"ranks must lie in [0, {m}]")
        return cls(m, tuple(np.bincount(ranks, minlength=m + 1).tolist()))

    @property
    def n(self) -> int:
        return sum(self.counts)

    def __add__(self, other: RankHistogram) -> RankHistogram:
        if other.m != self.m:
            raise ValueError("cannot merge histograms with different m")
        return RankHistogram(self.m, tuple(a + b for a, b in zip(self.counts, other.counts)))


class SamplerError(RuntimeError):
    """Candidate sampler failed while ranking observation ``index``."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"candidate sampler failed at observation {index}: {cause!r}")
        self.index = index


def _rank_range(ys, candidate, m, order, rng: RandomSource, start, stop) -> np.ndarray:
    out = np.empty(stop - start, dtype=np.int64)
    for i, stream in zip(range(start, stop), rng.iter_children(start, stop)):
        try:
            xs = candidate.sample_batch(stream, m)
        except Exception as exc:
            raise SamplerError(i, exc) from exc
        u = stream.uniforms(m + 1)
        out[i - start] = _rank_keys(order.key(ys[i]), order.keys(xs), u[0], u[1:])
    return out


def rank_observations(
    ys: Sequence,
    candidate,
    m: int,
    order: TotalOrder,
    rng: RandomSource,
    threads: int = 1,
) -> np.ndarray:
    """Stochastic rank of each observation; observation ``i`` uses ``rng.child(i)``.

    From each child stream the ``m`` candidate draws are taken first, then
    ``m + 1`` uniforms (the observation's uniform first).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = len(ys)
    if n < 1:
        raise ValueError("need at least one observation")
    if threads <= 1 or n < 2 * threads:
        return _rank_range(ys, candidate, m, order, rng, 0, n)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(
            lambda se: _rank_range(ys, candidate, m, order, rng, se[0], se[1]),
            zip(bounds[:-1], bounds[1:]),
        )
        return np.concatenate(list(parts))


def rank_dataset(
    ys: Sequence,
    candidate,
    m: int,
    order: TotalOrder,
    rng: RandomSource,
    threads: int = 1,
) -> RankHistogram:
    """Histogram of the stochastic ranks of ``ys`` against ``candidate``."""
    return RankHistogram.from_ranks(rank_observations(ys, candidate, m, order, rng, threads), m)


def iter_rank_samples(ys, candidate, m: int, order: TotalOrder, rng: RandomSource):
    ranks = rank_observations(ys, candidate, m, order, rng)
    for y, r in zip(ys, ranks):
        yield RankSample(y, int(r), m)


def rank_batch(ys: Sequence, candidate, m: int, order: TotalOrder, rng: RandomSource) -> np.ndarray:
    """Stochastic ranks of ``ys`` drawing all candidates from one stream.

    Same law as :func:`rank_observations`, but ``len(ys) * m`` candidates
    and ``len(ys) * (m + 1)`` uniforms are drawn in two batches, so the
    ranking vectorizes when ``order`` has batch keys. Row ``i`` of the
    uniforms starts with the observation's uniform.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = len(ys)
    if n < 1:
        raise ValueError("need at least one observation")
    try:
        xs = candidate.sample_batch(rng, n * m)
    except Exception as exc:
        raise SamplerError(-1, exc) from exc
    u = rng.uniforms(n * (m + 1)).reshape(n, m + 1)
    ky = order.keys(ys)
    kx = order.keys(xs)
    if isinstance(ky, np.ndarray) and isinstance(kx, np.ndarray):
        kx = kx.reshape(n, m)
        below = np.count_nonzero(kx < ky[:, None], axis=1)
        ties = np.count_nonzero((kx == ky[:, None]) & (u[:, 1:] < u[:, :1]), axis=1)
        return (below + ties).astype(np.int64)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _rank_keys(ky[i], kx[i * m : (i + 1) * m], u[i, 0], u[i, 1:])
    return out

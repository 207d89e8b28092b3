"""Two-parameter Chinese restaurant process on set partitions of {1..N}.

With discount ``a`` and concentration ``b``, the probability of a partition
with block sizes ``c_1..c_k`` is

    b(b+a)...(b+(k-1)a) / (b(b+1)...(b+N-1)) * prod_i (1-a)(2-a)...(c_i-1-a)

and sequential seating puts customer ``t+1`` at an occupied table ``i`` with
probability ``(c_i - a)/(t + b)`` or at a new table with probability
``(b + k a)/(t + b)``.
"""

from __future__ import annotations

import math

import numpy as np

from ..domains import Partition, iter_partitions
from ..streams import RandomSource
from .base import DiscreteModel, MixtureModel


def check_crp_params(a: float, b: float) -> None:
    if not (0.0 <= a < 1.0) or not (b > -a):
        raise ValueError(f"CRP needs 0 <= a < 1 and b > -a, got a={a}, b={b}")


def crp_pmf(partition: Partition, a: float, b: float) -> float:
    check_crp_params(a, b)
    N, k = partition.N, partition.num_blocks
    # the leading factor b is shared by numerator and denominator
    log_p = 0.0
    for i in range(1, k):
        log_p += math.log(b + i * a)
    for t in range(1, N):
        log_p -= math.log(b + t)
    for c in partition.sizes:
        for j in range(1, c):
            log_p += math.log(j - a)
    return math.exp(log_p)


def crp_sample_labels(N: int, a: float, b: float, rng: RandomSource, size: int) -> np.ndarray:
    """``(size, N)`` table labels, tables numbered in order of opening."""
    check_crp_params(a, b)
    if N < 1:
        raise ValueError("N must be >= 1")
    labels = np.zeros((size, N), dtype=np.int64)
    counts = np.zeros((size, N), dtype=np.float64)
    counts[:, 0] = 1.0
    k = np.ones(size, dtype=np.int64)
    rows = np.arange(size)
    cols = np.arange(N)
    u = rng.generator.random((size, max(N - 1, 0)))
    for t in range(1, N):
        w = np.where(cols < k[:, None], counts - a, 0.0)
        w[rows, k] = b + k * a
        cum = np.cumsum(w, axis=1)
        choice = np.count_nonzero(cum <= (u[:, t - 1] * (t + b))[:, None], axis=1)
        choice = np.minimum(choice, k)
        labels[:, t] = choice
        counts[rows, choice] += 1.0
        k += choice == k
    return labels


def _seat_one(N: int, a: float, b: float, u: np.ndarray) -> list[list[int]]:
    tables = [[1]]
    sizes = [1]
    for t in range(1, N):
        target = u[t - 1] * (t + b)
        acc = 0.0
        for i, c in enumerate(sizes):
            acc += c - a
            if target < acc:
                tables[i].append(t + 1)
                sizes[i] += 1
                break
        else:
            tables.append([t + 1])
            sizes.append(1)
    return tables


def crp_sample(N: int, a: float, b: float, rng: RandomSource) -> Partition:
    check_crp_params(a, b)
    if N < 1:
        raise ValueError("N must be >= 1")
    return Partition(_seat_one(N, a, b, rng.generator.random(max(N - 1, 0))), N)


class CRP(DiscreteModel):
    MAX_ENUM_N = 10
    _VECTOR_MIN = 64

    def __init__(self, N: int, a: float, b: float):
        check_crp_params(a, b)
        if N < 1:
            raise ValueError("N must be >= 1")
        self.N, self.a, self.b = int(N), float(a), float(b)
        self.name = f"crp(N={N},a={a:g},b={b:g})"

    def sample(self, rng: RandomSource) -> Partition:
        return crp_sample(self.N, self.a, self.b, rng)

    def sample_batch(self, rng: RandomSource, size: int) -> list[Partition]:
        if size >= self._VECTOR_MIN:
            return [Partition.from_labels(row) for row in crp_sample_labels(self.N, self.a, self.b, rng, size)]
        u = rng.generator.random((size, max(self.N - 1, 0)))
        return [Partition(_seat_one(self.N, self.a, self.b, row), self.N) for row in u]

    def pmf(self, x: Partition) -> float:
        if x.N != self.N:
            return 0.0
        return crp_pmf(x, self.a, self.b)

    def enumerate(self) -> list[Partition]:
        if self.N > self.MAX_ENUM_N:
            raise ValueError(f"enumeration limited to N <= {self.MAX_ENUM_N}")
        return list(iter_partitions(self.N))


def crp_mixture_p(N: int = 20) -> MixtureModel:
    """Equal mixture of CRP(0.26, 0.76) and CRP(0.19, 5.1)."""
    return MixtureModel([0.5, 0.5], [CRP(N, 0.26, 0.76), CRP(N, 0.19, 5.1)], name=f"crp_mix_p(N={N})")


def crp_pair_q(N: int = 20) -> CRP:
    """CRP(0.52, 0.52), matched to :func:`crp_mixture_p` on table counts and sizes."""
    return CRP(N, 0.52, 0.52)

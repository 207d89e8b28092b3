"""Exact sampling distribution of the stochastic rank on enumerable domains.

For an observation value ``x`` let ``P = p(x)`` and ``C = sum_{x' < x} p(x')``.
Conditioned on ``X_0 = x`` the number ``e`` of candidates equal to ``x`` is
Binomial(m, P); the remaining ``m - e`` fall below ``x`` independently with
probability ``C / (1 - P)``; and the observation's uniform lands in each of
the ``e + 1`` tie slots with probability ``1 / (e + 1)``. Averaging over
``x ~ q`` gives ``Pr{R = r}``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .ranking import TotalOrder, rank_batch
from .streams import RandomSource


@dataclass(frozen=True)
class ExactRankPmf:
    """``probs[r] = Pr{R = r}`` for ``r = 0..m``.

    ``tail_mass`` is the probability left out by a truncated domain and
    ``stderr`` is set only for Monte Carlo estimates.
    """

    m: int
    probs: np.ndarray
    tail_mass: float = 0.0
    stderr: np.ndarray | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.m + 1,):
            raise ValueError(f"expected {self.m + 1} probabilities, got shape {probs.shape}")
        if np.any(probs < -1e-15):
            raise ValueError("negative probability")
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class OrderedCdf:
    """Domain sorted by an order with ``p(x)`` and ``ptilde(x) = sum_{x' < x} p(x')``."""

    elements: list
    p: np.ndarray
    ptilde: np.ndarray


def sorted_domain(elements: Sequence, order: TotalOrder) -> np.ndarray:
    """Permutation sorting ``elements`` by ``order``; rejects EQ between distinct elements."""
    keys = order.keys(elements)
    if isinstance(keys, np.ndarray):
        perm = np.argsort(keys, kind="stable")
        ks = keys[perm]
        dup = bool(np.any(ks[1:] == ks[:-1]))
    else:
        perm = np.array(sorted(range(len(elements)), key=keys.__getitem__), dtype=np.int64)
        dup = any(keys[a] == keys[b] for a, b in zip(perm[:-1], perm[1:]))
    if dup:
        raise ValueError(f"order {order.name!r} ties distinct domain elements")
    return perm


def _exclusive_cumsum(values: np.ndarray) -> np.ndarray:
    # Neumaier-compensated running sum
    out = np.empty_like(values)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values.tolist()):
        out[i] = total + comp
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return out


def ordered_cdf(elements: Sequence, p_table: np.ndarray, order: TotalOrder) -> OrderedCdf:
    perm = sorted_domain(elements, order)
    p_sorted = np.asarray(p_table, dtype=float)[perm]
    return OrderedCdf([elements[i] for i in perm], p_sorted, _exclusive_cumsum(p_sorted))


def _binom_pmf_matrix(n: int, s: np.ndarray) -> np.ndarray:
    """``(len(s), n + 1)`` matrix of Binomial(n, s) probabilities, with 0**0 = 1."""
    k = np.arange(n + 1)
    coef = np.array([math.comb(n, int(i)) for i in k], dtype=float)
    return coef * np.power(s[:, None], k) * np.power(1.0 - s[:, None], n - k)


def conditional_rank_pmf(p_x: np.ndarray, ptilde_x: np.ndarray, m: int) -> np.ndarray:
    """``H[i, r] = Pr{R = r | X_0 = x_i}`` from ``p(x_i)`` and ``ptilde(x_i)``."""
    p_x = np.asarray(p_x, dtype=float)
    ptilde_x = np.asarray(ptilde_x, dtype=float)
    H = np.zeros((p_x.size, m + 1))

    zero = p_x == 0.0
    one = p_x == 1.0
    mid = ~(zero | one)

    if zero.any():
        H[zero] = _binom_pmf_matrix(m, np.clip(ptilde_x[zero], 0.0, 1.0))
    if one.any():
        H[one] = 1.0 / (m + 1)
    if mid.any():
        P = p_x[mid]
        s = np.clip(ptilde_x[mid] / (1.0 - P), 0.0, 1.0)
        ties = _binom_pmf_matrix(m, P)
        Hm = np.zeros((P.size, m + 1))
        for e in range(m + 1):
            below = _binom_pmf_matrix(m - e, s) * (ties[:, e] / (e + 1))[:, None]
            # r = j + l for tie slot j in 0..e and l candidates strictly below
            for j in range(e + 1):
                Hm[:, j : j + m - e + 1] += below
        H[mid] = Hm
    return H


def exact_rank_pmf(p, q, order: TotalOrder, m: int, support: Sequence | None = None) -> ExactRankPmf:
    """Exact ``Pr{R = r}`` for observations from ``q`` ranked against ``p``.

    Both models need ``pmf``. The domain is ``support`` when given (e.g. a
    truncation of a countable domain) and otherwise ``p.enumerate()``,
    which must agree with ``q.enumerate()``. Mass of either model outside
    the domain is reported as ``tail_mass``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    for model, label in ((p, "p"), (q, "q")):
        if not model.has_pmf:
            raise ValueError(f"{label} ({model.name}) has no pmf")
    if support is None:
        if not (p.is_enumerable and q.is_enumerable):
            raise ValueError("models are not enumerable; pass an explicit support")
        elements = p.enumerate()
        other = q.enumerate()
        if len(other) != len(elements) or set(other) != set(elements):
            raise ValueError(f"domains of {p.name} and {q.name} differ")
    else:
        elements = list(support)

    p_table = p.pmf_table(elements)
    q_table = q.pmf_table(elements)
    tail = max(0.0, 1.0 - math.fsum(p_table), 1.0 - math.fsum(q_table))

    perm = sorted_domain(elements, order)
    p_sorted = p_table[perm]
    q_sorted = q_table[perm]
    ptilde = _exclusive_cumsum(p_sorted)
    live = q_sorted > 0
    H = conditional_rank_pmf(p_sorted[live], ptilde[live], m)
    weights = q_sorted[live]
    probs = np.array([math.fsum(H[:, r] * weights) for r in range(m + 1)])
    return ExactRankPmf(m, probs, tail_mass=tail)


def sup_norm_to_uniform(pmf: ExactRankPmf) -> float:
    return float(np.max(np.abs(pmf.probs - 1.0 / (pmf.m + 1))))


def mc_rank_ranks(p, q, order: TotalOrder, m: int, draws: int, rng: RandomSource) -> np.ndarray:
    """``draws`` independent realizations of the rank (one shared stream)."""
    return rank_batch(q.sample_batch(rng, draws), p, m, order, rng)


def mc_rank_pmf(p, q, order: TotalOrder, m: int, draws: int, rng: RandomSource) -> ExactRankPmf:
    """Monte Carlo estimate of the rank pmf with per-bin standard errors."""
    if m < 1 or draws < 1:
        raise ValueError("need m >= 1 and draws >= 1")
    ranks = mc_rank_ranks(p, q, order, m, draws, rng)
    probs = np.bincount(ranks, minlength=m + 1) / draws
    return ExactRankPmf(m, probs, stderr=np.sqrt(probs * (1.0 - probs) / draws))

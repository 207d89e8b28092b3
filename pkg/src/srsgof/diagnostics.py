"""Convergence diagnostic for the Ising samplers via the rank test.

Observations are lattices after a given number of sweeps from a uniform
random start. Candidates come from a few long reference chains, run 100
times longer than the largest checkpoint and thinned over their second
half, standing in for exact samples.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .distributions.ising import _check, chain_samples, run_chains
from .domains import SpinLattice
from .orderings import ising_order
from .ranking import RankHistogram, TotalOrder, _rank_keys
from .streams import RandomSource
from .uniformity import chisq_uniformity


@dataclass(frozen=True)
class DiagnosticRow:
    steps: int
    chisq_statistic: float
    p_value: float


def reference_lattices(
    k: int,
    T: float,
    method: str,
    size: int,
    length: int,
    chains: int,
    rng: RandomSource,
    coupling: int = 1,
) -> np.ndarray:
    """``size`` lattices from ``chains`` chains of ``length`` sweeps each.

    The first half of every chain is discarded and the rest thinned evenly.
    """
    if size < 1 or chains < 1 or length < 2:
        raise ValueError("need size >= 1, chains >= 1 and length >= 2")
    per = math.ceil(size / chains)
    burn_in = length // 2
    thin = max(1, (length - burn_in) // per)
    seeds = rng.words(chains)
    parts = [chain_samples(int(s), k, T, method, burn_in, per, thin, coupling) for s in seeds]
    return np.concatenate(parts)[:size]


def ising_diagnose(
    k: int,
    T: float,
    method: str,
    checkpoints: Sequence[int],
    n: int,
    m: int,
    rng: RandomSource,
    coupling: int = 1,
    reference_factor: int = 100,
    reference_chains: int = 4,
    order: TotalOrder | None = None,
) -> list[DiagnosticRow]:
    """Chi-square uniformity of ranks for each checkpoint number of sweeps.

    Streams: ``rng.child(0)`` seeds the reference chains, ``rng.child(1).child(c)``
    the observation chains and ``rng.child(2).child(c)`` the tie-breaking
    uniforms of checkpoint ``c``.
    """
    checkpoints = [int(s) for s in checkpoints]
    if not checkpoints or min(checkpoints) < 0:
        raise ValueError("checkpoints must be a non-empty list of step counts >= 0")
    _check(k, T, method, max(checkpoints), coupling)
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    order = ising_order() if order is None else order

    length = reference_factor * max(max(checkpoints), 1)
    ref = reference_lattices(k, T, method, n * m, length, reference_chains, rng.child(0), coupling)
    ref_keys = order.keys([SpinLattice(x) for x in ref])

    rows = []
    for c, steps in enumerate(checkpoints):
        obs = run_chains(rng.child(1).child(c).words(n), k, T, method, steps, coupling)
        obs_keys = order.keys([SpinLattice(x) for x in obs])
        u = rng.child(2).child(c).uniforms(n * (m + 1)).reshape(n, m + 1)
        ranks = [_rank_keys(obs_keys[i], ref_keys[i * m : (i + 1) * m], u[i, 0], u[i, 1:]) for i in range(n)]
        report = chisq_uniformity(RankHistogram.from_ranks(ranks, m), 0.05)
        rows.append(DiagnosticRow(steps, report.statistic, report.p_value))
    return rows


def diagnostic_csv(rows: Sequence[DiagnosticRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("steps", "chisq_statistic", "p_value"))
    for r in rows:
        writer.writerow([r.steps, repr(r.chisq_statistic), repr(r.p_value)])
    return buf.getvalue()

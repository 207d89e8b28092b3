"""Square-lattice Ising model with free boundaries.

The target measure is ``P(x) ∝ exp((J/T) * sum_{adjacent i,j} x_i x_j)``
with ``J = coupling`` (+1 ferromagnetic by default, -1 antiferromagnetic).
Two single-site kernels are provided, both applied in row-major sweeps:

* ``gibbs``: heat bath, spin set to +1 with prob ``1/(1+exp(-2 J b / T))``
  where ``b`` is the neighbour sum;
* ``mh``: propose flipping the spin, accept with prob
  ``min(1, exp(-dH / T))`` where ``dH = 2 J x_i b``.

Each chain draws from its own xoshiro256** generator seeded through
SplitMix64 from one 64-bit word, so a chain is a pure function of its seed.
"""

from __future__ import annotations

import math
from functools import cached_property

import numba
import numpy as np

from ..domains import SpinLattice, all_lattices
from ..streams import RandomSource
from .base import DiscreteModel

METHODS = ("gibbs", "mh")


@numba.njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(cache=True)
def _seed_state(seed):
    s = np.empty(4, dtype=np.uint64)
    z = seed
    for i in range(4):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        t = z
        t = (t ^ (t >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        t = (t ^ (t >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        s[i] = t ^ (t >> np.uint64(31))
    return s


@numba.njit(cache=True, inline="always")
def _next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@numba.njit(cache=True, inline="always")
def _next_unit(s):
    # 52 bits keep the result strictly below 1
    return (np.float64(_next_u64(s) >> np.uint64(12)) + 0.5) * (1.0 / 4503599627370496.0)


@numba.njit(cache=True)
def _sweeps(x, s, n_sweeps, table, method):
    # x is padded with a zero border; table[b + 4] (gibbs) is P(spin=+1),
    # table[x*b + 4] (mh) is the flip acceptance probability
    k = x.shape[0] - 2
    for _ in range(n_sweeps):
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                b = x[i - 1, j] + x[i + 1, j] + x[i, j - 1] + x[i, j + 1]
                u = _next_unit(s)
                if method == 0:
                    x[i, j] = 2 * np.int64(u < table[b + 4]) - 1
                else:
                    xi = x[i, j]
                    x[i, j] = xi - 2 * xi * np.int64(u < table[xi * b + 4])


@numba.njit(cache=True)
def _random_start(s, k):
    x = np.zeros((k + 2, k + 2), dtype=np.int64)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            x[i, j] = 1 if _next_u64(s) >> np.uint64(63) else -1
    return x


@numba.njit(cache=True)
def _run_chains(seeds, k, n_sweeps, table, method):
    out = np.empty((seeds.shape[0], k, k), dtype=np.int8)
    for c in range(seeds.shape[0]):
        s = _seed_state(seeds[c])
        x = _random_start(s, k)
        _sweeps(x, s, n_sweeps, table, method)
        for i in range(k):
            for j in range(k):
                out[c, i, j] = x[i + 1, j + 1]
    return out


@numba.njit(cache=True)
def _advance(starts, seeds, n_sweeps, table, method):
    n, k = starts.shape[0], starts.shape[1]
    out = np.empty_like(starts)
    x = np.zeros((k + 2, k + 2), dtype=np.int64)
    for c in range(n):
        s = _seed_state(seeds[c])
        for i in range(k):
            for j in range(k):
                x[i + 1, j + 1] = starts[c, i, j]
        _sweeps(x, s, n_sweeps, table, method)
        for i in range(k):
            for j in range(k):
                out[c, i, j] = x[i + 1, j + 1]
    return out


@numba.njit(cache=True)
def _chain_histogram(seed, k, n_sweeps, burn_in, table, method):
    """Visit counts of each state code (row-major, +1 = bit set) per sweep."""
    counts = np.zeros(1 << (k * k), dtype=np.int64)
    s = _seed_state(seed)
    x = _random_start(s, k)
    _sweeps(x, s, burn_in, table, method)
    for _ in range(n_sweeps):
        _sweeps(x, s, 1, table, method)
        code = 0
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                code = (code << 1) | (1 if x[i, j] > 0 else 0)
        counts[code] += 1
    return counts


@numba.njit(cache=True)
def _chain_samples(seed, k, burn_in, n_samples, thin, table, method):
    out = np.empty((n_samples, k, k), dtype=np.int8)
    s = _seed_state(seed)
    x = _random_start(s, k)
    _sweeps(x, s, burn_in, table, method)
    for c in range(n_samples):
        _sweeps(x, s, thin, table, method)
        for i in range(k):
            for j in range(k):
                out[c, i, j] = x[i + 1, j + 1]
    return out


def kernel_table(T: float, method: str, coupling: int = 1) -> np.ndarray:
    """Lookup table of per-site probabilities indexed by neighbour sum + 4."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    beta = coupling / T
    idx = np.arange(-4, 5)
    if method == "gibbs":
        return 1.0 / (1.0 + np.exp(-2.0 * beta * idx))
    # idx plays the role of x_i * b; dH = 2 J x_i b
    return np.minimum(1.0, np.exp(-2.0 * beta * idx))


def _check(k: int, T: float, method: str, steps: int, coupling: int) -> None:
    if k < 2:
        raise ValueError("lattice side k must be >= 2")
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if coupling not in (1, -1):
        raise ValueError("coupling must be +1 or -1")


def run_chains(seeds: np.ndarray, k: int, T: float, method: str, steps: int, coupling: int = 1) -> np.ndarray:
    """Run one chain per seed for ``steps`` sweeps; ``(len(seeds), k, k)`` int8."""
    _check(k, T, method, steps, coupling)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    return _run_chains(seeds, k, int(steps), kernel_table(T, method, coupling), METHODS.index(method))


def advance_chains(
    starts: np.ndarray, seeds: np.ndarray, T: float, method: str, steps: int, coupling: int = 1
) -> np.ndarray:
    """Run ``steps`` sweeps from each given ``(n, k, k)`` start, one seed per chain."""
    starts = np.ascontiguousarray(starts, dtype=np.int8)
    if starts.ndim != 3 or starts.shape[1] != starts.shape[2] or not np.all(np.abs(starts) == 1):
        raise ValueError("starts must be an (n, k, k) array of +1/-1 spins")
    _check(starts.shape[1], T, method, steps, coupling)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    if seeds.shape != (starts.shape[0],):
        raise ValueError("need one seed per chain")
    return _advance(starts, seeds, int(steps), kernel_table(T, method, coupling), METHODS.index(method))


def chain_visit_counts(
    seed: int, k: int, T: float, method: str, sweeps: int, burn_in: int = 1000, coupling: int = 1
) -> np.ndarray:
    """Per-state visit counts of one long chain (``k*k <= 20``)."""
    _check(k, T, method, sweeps, coupling)
    if k * k > 20:
        raise ValueError("state histogram limited to k*k <= 20")
    table = kernel_table(T, method, coupling)
    return _chain_histogram(np.uint64(seed), k, int(sweeps), int(burn_in), table, METHODS.index(method))


def chain_samples(
    seed: int, k: int, T: float, method: str, burn_in: int, n_samples: int, thin: int, coupling: int = 1
) -> np.ndarray:
    """``n_samples`` lattices from one chain: ``burn_in`` sweeps, then one every ``thin`` sweeps."""
    _check(k, T, method, burn_in, coupling)
    if n_samples < 0 or thin < 1:
        raise ValueError("need n_samples >= 0 and thin >= 1")
    table = kernel_table(T, method, coupling)
    return _chain_samples(np.uint64(seed), k, int(burn_in), int(n_samples), int(thin), table, METHODS.index(method))


def ising_sampler(k: int, T: float, method: str, steps: int, rng: RandomSource, coupling: int = 1) -> SpinLattice:
    """Uniform random start followed by ``steps`` full sweeps."""
    return SpinLattice(run_chains(rng.words(1), k, T, method, steps, coupling)[0])


def adjacent_sum(spins: np.ndarray) -> int:
    """``sum x_i x_j`` over horizontally and vertically adjacent pairs."""
    s = np.asarray(spins, dtype=np.int64)
    return int((s[:, 1:] * s[:, :-1]).sum() + (s[1:, :] * s[:-1, :]).sum())


class IsingModel(DiscreteModel):
    """Approximate Ising sampler: fresh chain per draw, ``steps`` sweeps each.

    ``pmf`` and ``enumerate`` give the exact Boltzmann law and are only
    available for ``k * k <= 16``.
    """

    MAX_ENUM_SITES = 16

    def __init__(self, k: int, T: float, method: str = "gibbs", steps: int = 0, coupling: int = 1):
        _check(k, T, method, steps, coupling)
        self.k, self.T, self.method, self.steps, self.coupling = int(k), float(T), method, int(steps), int(coupling)
        self.name = f"ising(k={k},T={T:g},{method},steps={steps})"

    def sample_lattices(self, rng: RandomSource, size: int) -> np.ndarray:
        return run_chains(rng.words(size), self.k, self.T, self.method, self.steps, self.coupling)

    def sample_batch(self, rng: RandomSource, size: int) -> list[SpinLattice]:
        return [SpinLattice(x) for x in self.sample_lattices(rng, size)]

    def enumerate(self) -> list[SpinLattice]:
        if self.k * self.k > self.MAX_ENUM_SITES:
            raise ValueError(f"enumeration limited to k*k <= {self.MAX_ENUM_SITES}")
        return all_lattices(self.k)

    @cached_property
    def _boltzmann(self) -> dict:
        return boltzmann_table(self.k, self.T, self.coupling)

    def pmf(self, x: SpinLattice) -> float:
        if x.k != self.k:
            return 0.0
        return self._boltzmann[x]


def boltzmann_weights(k: int, T: float, coupling: int = 1) -> np.ndarray:
    """Normalized Boltzmann probabilities indexed by state code."""
    if k * k > 20:
        raise ValueError("exact enumeration limited to k*k <= 20")
    energies = np.array([adjacent_sum(x.spins) for x in all_lattices(k)], dtype=float)
    logw = coupling * energies / T
    w = np.exp(logw - logw.max())
    return w / math.fsum(w)


def boltzmann_table(k: int, T: float, coupling: int = 1) -> dict:
    probs = boltzmann_weights(k, T, coupling)
    return {x: float(p) for x, p in zip(all_lattices(k), probs)}

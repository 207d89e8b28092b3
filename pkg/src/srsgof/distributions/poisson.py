from __future__ import annotations

import math

import numpy as np

from ..streams import RandomSource
from .base import DiscreteModel


def poisson_pmf(k: int, lam: float) -> float:
    if k < 0:
        return 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


class BimodalPoisson(DiscreteModel):
    """Equal mixture of Poisson(lam1) and Poisson(lam2), reflected about 0.

    A draw picks a rate uniformly, draws ``K`` from that Poisson and a
    uniform sign ``S``, and returns ``S * K``. Hence zero keeps the whole
    mixture mass at 0 while ``x != 0`` gets half the mass at ``|x|``.
    """

    def __init__(self, lam1: float, lam2: float):
        if not (lam1 > 0 and lam2 > 0):
            raise ValueError(f"Poisson rates must be positive, got {lam1}, {lam2}")
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)
        self.name = f"bimodal_poisson({lam1:g},{lam2:g})"

    def _mix(self, k: int) -> float:
        return 0.5 * poisson_pmf(k, self.lam1) + 0.5 * poisson_pmf(k, self.lam2)

    def pmf(self, x) -> float:
        x = int(x)
        if x == 0:
            return self._mix(0)
        return 0.5 * self._mix(abs(x))

    def printed_pmf(self, x) -> float:
        """``0.5 * mix(|x|)`` for every x, the unnormalized textbook form."""
        return 0.5 * self._mix(abs(int(x)))

    def sample_batch(self, rng: RandomSource, size: int) -> np.ndarray:
        g = rng.generator
        lam = np.where(g.integers(0, 2, size) == 1, self.lam2, self.lam1)
        k = g.poisson(lam)
        sign = 2 * g.integers(0, 2, size) - 1
        return (sign * k).astype(np.int64)

    def support_radius(self, tol: float = 1e-12) -> int:
        """Smallest K with mass outside ``[-K, K]`` below ``tol``."""
        lam = max(self.lam1, self.lam2)
        k = int(lam)
        covered = math.fsum(self._mix(j) for j in range(k + 1))
        while 1.0 - covered >= tol:
            k += 1
            covered += self._mix(k)
        return k

    def truncated_support(self, tol: float = 1e-12) -> list[int]:
        K = self.support_radius(tol)
        return list(range(-K, K + 1))

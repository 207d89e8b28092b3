"""Common interface for discrete models: a sampler, optionally a pmf and a
finite-domain enumerator."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from ..streams import RandomSource


class DiscreteModel:
    """Base class. Subclasses override ``sample`` or ``sample_batch``.

    ``sample_batch`` may return a numpy array when the domain is numeric;
    otherwise a list of domain elements.
    """

    name = "model"

    def sample(self, rng: RandomSource):
        return self.sample_batch(rng, 1)[0]

    def sample_batch(self, rng: RandomSource, size: int):
        if type(self).sample is DiscreteModel.sample:
            raise NotImplementedError(f"{type(self).__name__} defines no sampler")
        return [self.sample(rng) for _ in range(size)]

    def pmf(self, x) -> float:
        raise NotImplementedError(f"{self.name} has no tractable pmf")

    def enumerate(self) -> list:
        raise NotImplementedError(f"{self.name} has no finite enumeration")

    @property
    def has_pmf(self) -> bool:
        return type(self).pmf is not DiscreteModel.pmf

    @property
    def is_enumerable(self) -> bool:
        return type(self).enumerate is not DiscreteModel.enumerate

    def pmf_table(self, elements: Sequence) -> np.ndarray:
        return np.array([self.pmf(x) for x in elements], dtype=float)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class FinitePmf(DiscreteModel):
    """Explicit probability table over ``elements`` (default ``0..K-1``)."""

    def __init__(self, probs, elements: Sequence | None = None, name: str = "finite"):
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty vector")
        if np.any(probs < 0) or abs(math.fsum(probs) - 1.0) > 1e-9:
            raise ValueError("probs must be non-negative and sum to 1")
        self.probs = probs
        self.elements = list(range(probs.size)) if elements is None else list(elements)
        if len(self.elements) != probs.size:
            raise ValueError("elements and probs differ in length")
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("elements must be distinct")
        self._numeric = elements is None
        self._cdf = np.cumsum(probs)
        self._cdf[-1] = 1.0
        self.name = name

    def sample_batch(self, rng: RandomSource, size: int):
        u = rng.generator.random(size)
        idx = np.searchsorted(self._cdf, u, side="right")
        idx = np.minimum(idx, self.probs.size - 1)
        if self._numeric:
            return idx
        return [self.elements[i] for i in idx]

    def pmf(self, x) -> float:
        i = self._index.get(x)
        return 0.0 if i is None else float(self.probs[i])

    def enumerate(self) -> list:
        return list(self.elements)


class MixtureModel(DiscreteModel):
    """``sum_j weights[j] * components[j]``."""

    def __init__(self, weights: Sequence[float], components: Sequence[DiscreteModel], name: str | None = None):
        w = np.asarray(weights, dtype=float)
        if len(w) != len(components) or len(w) == 0:
            raise ValueError("need one weight per component")
        if np.any(w < 0) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must be >= 0 and sum to 1, got {weights}")
        self.weights = w
        self.components = list(components)
        self.name = name or "mix(" + ",".join(f"{x:g}*{c.name}" for x, c in zip(w, components)) + ")"

    def sample_batch(self, rng: RandomSource, size: int):
        cdf = np.cumsum(self.weights)
        which = np.minimum(np.searchsorted(cdf, rng.generator.random(size), side="right"), len(cdf) - 1)
        parts = {}
        for j, comp in enumerate(self.components):
            cnt = int(np.count_nonzero(which == j))
            if cnt:
                parts[j] = comp.sample_batch(rng, cnt)
        if parts and all(isinstance(p, np.ndarray) for p in parts.values()):
            out = np.empty(size, dtype=next(iter(parts.values())).dtype)
            for j, p in parts.items():
                out[which == j] = p
            return out
        out = [None] * size
        for j, p in parts.items():
            for pos, x in zip(np.flatnonzero(which == j), p):
                out[pos] = x
        return out

    @property
    def has_pmf(self) -> bool:
        return all(c.has_pmf for c in self.components)

    @property
    def is_enumerable(self) -> bool:
        return any(c.is_enumerable for c in self.components)

    def pmf(self, x) -> float:
        return math.fsum(w * c.pmf(x) for w, c in zip(self.weights, self.components) if w > 0)

    def pmf_table(self, elements: Sequence) -> np.ndarray:
        total = np.zeros(len(elements))
        for w, c in zip(self.weights, self.components):
            if w > 0:
                total += w * c.pmf_table(elements)
        return total

    def enumerate(self) -> list:
        seen, out = set(), []
        for c in self.components:
            if not c.is_enumerable:
                continue
            for x in c.enumerate():
                if x not in seen:
                    seen.add(x)
                    out.append(x)
        if not out:
            raise NotImplementedError(f"{self.name} has no finite enumeration")
        return out

"""Monte Carlo power of the rank test and the sample-size calculator."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions.base import DiscreteModel, MixtureModel
from .exact import exact_rank_pmf, sup_norm_to_uniform
from .ranking import RankHistogram, TotalOrder, rank_batch
from .special import normal_quantile
from .streams import RandomSource
from .uniformity import run_test

# decide(observations, cfg, rng) -> True to reject
Decision = Callable[[Sequence, "ExperimentConfig", RandomSource], bool]

METRICS = ("power", "supnorm")


@dataclass(frozen=True)
class ExperimentConfig:
    """One power experiment: ``n`` observations from ``q`` tested against ``p``.

    ``alternative`` and ``weights`` are only used by :func:`weight_sweep`,
    which replaces ``q`` by ``w * alternative + (1 - w) * p``.
    """

    p: DiscreteModel
    q: DiscreteModel
    order: TotalOrder
    m: int
    n: int
    alpha: float = 0.05
    trials: int = 1024
    seed: int = 0
    test: str = "chisq"
    alternative: DiscreteModel | None = None
    weights: tuple[float, ...] = ()
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if any(not 0.0 <= w <= 1.0 for w in self.weights):
            raise ValueError("mixture weights must lie in [0, 1]")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def echo(self) -> dict:
        return {
            "p": self.p.name,
            "q": self.q.name,
            "order": self.order.name,
            "m": self.m,
            "n": self.n,
        }


@dataclass(frozen=True)
class PowerEstimate:
    trials: int
    rejections: int
    alpha: float
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.rejections <= self.trials:
            raise ValueError("rejections must lie in [0, trials]")

    @property
    def power(self) -> float:
        return self.rejections / self.trials

    @property
    def stderr(self) -> float:
        return math.sqrt(self.power * (1.0 - self.power) / self.trials)


def srs_decision(ys: Sequence, cfg: ExperimentConfig, rng: RandomSource) -> bool:
    """Rank ``ys`` against fresh draws from ``cfg.p`` and test uniformity."""
    ranks = rank_batch(ys, cfg.p, cfg.m, cfg.order, rng)
    hist = RankHistogram.from_ranks(ranks, cfg.m)
    return run_test(hist, cfg.alpha, cfg.test).rejected


def _count_rejections(cfg: ExperimentConfig, rng: RandomSource, decide: Decision, start: int, stop: int) -> int:
    hits = 0
    for trial in rng.iter_children(start, stop):
        # child(0) draws the observations, child(1) drives the test
        ys = cfg.q.sample_batch(trial.child(0), cfg.n)
        hits += bool(decide(ys, cfg, trial.child(1)))
    return hits


def estimate_power(
    cfg: ExperimentConfig, rng: RandomSource | None = None, decide: Decision | None = None
) -> PowerEstimate:
    """Fraction of ``cfg.trials`` independent tests that reject.

    Trial ``t`` uses ``rng.child(t)`` (``rng`` defaults to the config seed),
    so adding trials never changes earlier ones. ``decide`` replaces the
    rank test with any other decision rule.
    """
    rng = RandomSource(cfg.seed) if rng is None else rng
    decide = srs_decision if decide is None else decide
    if cfg.threads <= 1 or cfg.trials < 2 * cfg.threads:
        hits = _count_rejections(cfg, rng, decide, 0, cfg.trials)
    else:
        bounds = np.linspace(0, cfg.trials, cfg.threads + 1).astype(int)
        with ThreadPoolExecutor(cfg.threads) as pool:
            hits = sum(
                pool.map(lambda se: _count_rejections(cfg, rng, decide, se[0], se[1]), zip(bounds[:-1], bounds[1:]))
            )
    return PowerEstimate(cfg.trials, int(hits), cfg.alpha, cfg.echo())


def sample_complexity(alpha: float, l_inf: float) -> int:
    """Observations needed by the ``m = 1`` test: ``ceil(4 c^2 / l_inf^4)``, ``c = -Phi^{-1}(alpha/2)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < l_inf <= 1.0:
        raise ValueError(f"l_inf must lie in (0, 1], got {l_inf}")
    c = -normal_quantile(alpha / 2.0)
    n = 4.0 * c * c / l_inf**4
    # absorb rounding in c so exact integers are not pushed up by one
    return max(1, math.ceil(n * (1.0 - 1e-12)))


def l_inf_distance(p, q) -> float:
    """``max_x |p(x) - q(x)|`` for two tables over the same domain.

    Tables are equal-length sequences or mappings with the same keys.
    """
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        if not (isinstance(p, Mapping) and isinstance(q, Mapping)) or set(p) != set(q):
            raise ValueError("pmf tables have different domains")
        keys = list(p)
        p = [p[x] for x in keys]
        q = [q[x] for x in keys]
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"pmf tables have different domains ({a.shape} vs {b.shape})")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


@dataclass(frozen=True)
class SweepRow:
    x: float  # mixture weight, or sample size n (int)
    m: int
    ordering: str
    value: float
    trials: int
    seed: int


SWEEP_COLUMNS = ("n_or_w", "m", "ordering", "power_or_supnorm", "trials", "seed")


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.x, r.m, r.ordering, repr(float(r.value)), r.trials, r.seed])
    return buf.getvalue()


def _mixture(cfg: ExperimentConfig, w: float) -> DiscreteModel:
    if cfg.alternative is None:
        raise ValueError("weight sweep needs an alternative model")
    if w == 0.0:
        return cfg.p
    if w == 1.0:
        return cfg.alternative
    return MixtureModel([w, 1.0 - w], [cfg.alternative, cfg.p], name=f"{w:g}*{cfg.alternative.name}+{1 - w:g}*{cfg.p.name}")


def weight_sweep(
    cfg: ExperimentConfig,
    weights: Sequence[float] | None = None,
    metric: str = "supnorm",
    orders: Sequence[TotalOrder] | None = None,
    decide: Decision | None = None,
) -> list[SweepRow]:
    """Evaluate ``metric`` at ``q = w * alternative + (1 - w) * p`` for each ``w`` and order.

    ``supnorm`` is the exact distance of the rank law from uniform and
    needs enumerable models; ``power`` runs :func:`estimate_power` with
    the config seed at every point.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    weights = cfg.weights if weights is None else tuple(weights)
    if not weights:
        raise ValueError("no mixture weights given")
    orders = [cfg.order] if orders is None else list(orders)
    support = cfg.p.enumerate() if metric == "supnorm" else None
    rows = []
    for order in orders:
        for w in weights:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"mixture weight {w} outside [0, 1]")
            q = _mixture(cfg, w)
            if metric == "supnorm":
                value = sup_norm_to_uniform(exact_rank_pmf(cfg.p, q, order, cfg.m, support=support))
                rows.append(SweepRow(w, cfg.m, order.name, value, 0, cfg.seed))
            else:
                est = estimate_power(replace(cfg, q=q, order=order), decide=decide)
                rows.append(SweepRow(w, cfg.m, order.name, est.power, cfg.trials, cfg.seed))
    return rows


def power_curve(
    cfg: ExperimentConfig,
    ns: Sequence[int],
    ms: Sequence[int] | None = None,
    orders: Sequence[TotalOrder] | None = None,
    decide: Decision | None = None,
) -> list[SweepRow]:
    """Power over a grid of sample sizes, candidate counts and orders."""
    ms = [cfg.m] if ms is None else list(ms)
    orders = [cfg.order] if orders is None else list(orders)
    rows = []
    for order in orders:
        for m in ms:
            for n in ns:
                est = estimate_power(replace(cfg, order=order, m=int(m), n=int(n)), decide=decide)
                rows.append(SweepRow(int(n), int(m), order.name, est.power, cfg.trials, cfg.seed))
    return rows


DEFAULT_N_GRID = tuple(2**i for i in range(5, 13))

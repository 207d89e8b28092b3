"""Tests of uniformity for a histogram of ranks on ``{0..m}``."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

from .ranking import RankHistogram
from .special import chisq_survival, normal_cdf, normal_quantile

REJECT = "reject"
NOT_REJECT = "not_reject"


class LowCountWarning(UserWarning):
    """Fewer than five expected counts per bin."""


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class TestReport:
    """Outcome of a uniformity test; ``decision`` is reject iff ``p_value <= alpha``."""

    __test__ = False  # keep pytest from collecting this class

    statistic: float
    df: int
    p_value: float
    alpha: float
    decision: str
    method: str

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if self.decision != (REJECT if self.p_value <= self.alpha else NOT_REJECT):
            raise ValueError("decision inconsistent with p-value and alpha")

    @property
    def rejected(self) -> bool:
        return self.decision == REJECT

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        return (
            f"{self.method}: statistic={self.statistic:.6g} df={self.df} "
            f"p={self.p_value:.6g} alpha={self.alpha:g} -> {self.decision}"
        )


def _report(statistic, df, p_value, alpha, method) -> TestReport:
    p_value = min(1.0, max(0.0, p_value))
    decision = REJECT if p_value <= alpha else NOT_REJECT
    return TestReport(float(statistic), int(df), float(p_value), float(alpha), decision, method)


def chisq_uniformity(hist: RankHistogram, alpha: float) -> TestReport:
    """Pearson chi-square against the uniform law on ``{0..m}`` with ``df = m``."""
    _check_alpha(alpha)
    n = hist.n
    if n == 0:
        raise ValueError("empty rank histogram")
    bins = hist.m + 1
    expected = n / bins
    if expected < 5:
        warnings.warn(
            f"only {expected:.3g} expected counts per bin (n={n}, m={hist.m}); "
            "the chi-square approximation may be poor",
            LowCountWarning,
            stacklevel=2,
        )
    statistic = math.fsum((c - expected) ** 2 for c in hist.counts) / expected
    return _report(statistic, hist.m, chisq_survival(statistic, hist.m), alpha, "chisq")


def binomial_normal_test(hist: RankHistogram, alpha: float) -> TestReport:
    """Two-sided normal approximation test of ``Pr{R = 0} = 1/2`` for ``m = 1``.

    No continuity correction is applied.
    """
    _check_alpha(alpha)
    if hist.m != 1:
        raise ValueError(f"binomial test needs m = 1, got m = {hist.m}")
    n = hist.n
    if n == 0:
        raise ValueError("empty rank histogram")
    b_hat = hist.counts[0] / n
    z = 2.0 * math.sqrt(n) * (b_hat - 0.5)
    return _report(z, 1, 2.0 * normal_cdf(-abs(z)), alpha, "binomial_normal")


def binomial_threshold(n: int, alpha: float) -> tuple[float, float]:
    """Acceptance interval for ``count_0 / n`` in :func:`binomial_normal_test`."""
    _check_alpha(alpha)
    c = -normal_quantile(alpha / 2.0)
    half = c / (2.0 * math.sqrt(n))
    return 0.5 - half, 0.5 + half


TESTS = {"chisq": chisq_uniformity, "binomial_normal": binomial_normal_test}


def run_test(hist: RankHistogram, alpha: float, method: str = "chisq") -> TestReport:
    if method not in TESTS:
        raise ValueError(f"unknown test {method!r}; choose from {sorted(TESTS)}")
    return TESTS[method](hist, alpha)

"""Exact goodness-of-fit tests for discrete data built on stochastic ranks."""

__version__ = "0.1.0"

from .exact import ExactRankPmf, exact_rank_pmf, mc_rank_pmf, sup_norm_to_uniform
from .orderings import get_order, lex_order, ones_order, optimal_order, parity_order, partition_order
from .power import ExperimentConfig, PowerEstimate, estimate_power, l_inf_distance, sample_complexity, weight_sweep
from .ranking import RankHistogram, TotalOrder, rank_dataset, rank_observations, stochastic_rank
from .streams import RandomSource
from .uniformity import TestReport, binomial_normal_test, chisq_uniformity

__all__ = [
    "ExactRankPmf",
    "ExperimentConfig",
    "PowerEstimate",
    "RandomSource",
    "RankHistogram",
    "TestReport",
    "TotalOrder",
    "binomial_normal_test",
    "chisq_uniformity",
    "estimate_power",
    "exact_rank_pmf",
    "get_order",
    "l_inf_distance",
    "lex_order",
    "mc_rank_pmf",
    "ones_order",
    "optimal_order",
    "parity_order",
    "partition_order",
    "rank_dataset",
    "rank_observations",
    "sample_complexity",
    "stochastic_rank",
    "sup_norm_to_uniform",
    "weight_sweep",
]

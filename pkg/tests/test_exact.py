import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from srsgof.distributions import CRP, BimodalPoisson, BitStringFamily, FinitePmf, MixtureModel
from srsgof.distributions.base import DiscreteModel
from srsgof.exact import (
    ExactRankPmf,
    conditional_rank_pmf,
    exact_rank_pmf,
    mc_rank_pmf,
    ordered_cdf,
    sup_norm_to_uniform,
)
from srsgof.orderings import lex_order, ones_order, partition_order
from srsgof.ranking import natural_order
from srsgof.streams import RandomSource

NAT = natural_order()


def brute_force_rank_pmf(p, q, m):
    """Enumerate every (x_0, x_1..x_m) on indices 0..K-1; the observation's
    slot among the e + 1 tied values is uniform. Exact rational arithmetic."""
    p = [Fraction(v).limit_denominator(10**12) for v in p]
    q = [Fraction(v).limit_denominator(10**12) for v in q]
    out = [Fraction(0)] * (m + 1)
    for x0, qx in enumerate(q):
        if qx == 0:
            continue
        for xs in itertools.product(range(len(p)), repeat=m):
            w = qx * math.prod(p[x] for x in xs)
            if w == 0:
                continue
            below = sum(x < x0 for x in xs)
            ties = sum(x == x0 for x in xs)
            for j in range(ties + 1):
                out[below + j] += w / (ties + 1)
    return [float(v) for v in out]


def _pair(seed, size, sparse=0.3):
    gen = np.random.default_rng(seed)
    out = []
    for _ in range(2):
        w = gen.dirichlet(np.ones(size))
        w[gen.random(size) < sparse] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
        out.append(w / w.sum())
    return out


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force(seed):
    p, q = _pair(seed, 4)
    m = 1 + seed % 4
    exact = exact_rank_pmf(FinitePmf(p), FinitePmf(q), NAT, m).probs
    np.testing.assert_allclose(exact, brute_force_rank_pmf(p, q, m), atol=1e-12)


def test_point_mass_cases():
    # p(x) = 1: uniform whatever q puts on x; p(x) = 0 and p~ in {0, 1}: degenerate
    one = FinitePmf([0.0, 1.0, 0.0])
    np.testing.assert_allclose(exact_rank_pmf(one, FinitePmf([0.0, 1.0, 0.0]), NAT, 3).probs, 0.25)
    np.testing.assert_allclose(exact_rank_pmf(one, FinitePmf([1.0, 0.0, 0.0]), NAT, 3).probs, [1, 0, 0, 0])
    np.testing.assert_allclose(exact_rank_pmf(one, FinitePmf([0.0, 0.0, 1.0]), NAT, 3).probs, [0, 0, 0, 1])


def test_two_point_pair_hidden_at_m1():
    p = FinitePmf([0.5, 0.0, 0.0, 0.5])
    q = FinitePmf([0.0, 0.5, 0.5, 0.0])
    assert exact_rank_pmf(p, q, NAT, 1).probs.tolist() == [0.5, 0.5]
    np.testing.assert_allclose(exact_rank_pmf(p, q, NAT, 2).probs, [0.25, 0.5, 0.25], atol=1e-12)


@pytest.mark.parametrize(
    "model, order",
    [
        (FinitePmf(np.random.default_rng(1).dirichlet(np.ones(9))), NAT),
        (BitStringFamily(6, "odd"), lex_order()),
        (MixtureModel([0.3, 0.7], [BitStringFamily(6, "tie"), BitStringFamily(6, "ind")]), ones_order()),
        (CRP(5, 0.3, 1.1), partition_order()),
    ],
)
@pytest.mark.parametrize("m", [1, 4, 9])
def test_null_is_uniform(model, order, m):
    np.testing.assert_allclose(exact_rank_pmf(model, model, order, m).probs, 1 / (m + 1), atol=1e-12)


def test_structured_domain_matches_monte_carlo():
    p, q = CRP(4, 0.1, 0.5), CRP(4, 0.6, 2.0)
    exact = exact_rank_pmf(p, q, partition_order(), 3)
    mc = mc_rank_pmf(p, q, partition_order(), 3, 40_000, RandomSource(3))
    assert np.all(np.abs(exact.probs - mc.probs) <= 4.5 * mc.stderr + 1e-12)


@pytest.mark.parametrize("seed", range(30))
def test_m1_deviation_persists(seed):
    p, q = _pair(100 + seed, 6)
    base = sup_norm_to_uniform(exact_rank_pmf(FinitePmf(p), FinitePmf(q), NAT, 1))
    if base > 1e-9:
        for m in range(2, 9):
            assert sup_norm_to_uniform(exact_rank_pmf(FinitePmf(p), FinitePmf(q), NAT, m)) > 1e-9


def test_sums_to_one_for_large_m():
    p, q = _pair(7, 6)
    probs = exact_rank_pmf(FinitePmf(p), FinitePmf(q), NAT, 64).probs
    assert abs(math.fsum(probs) - 1.0) < 1e-9 and probs.min() >= 0.0


def test_conditional_rows_are_distributions():
    rng = np.random.default_rng(5)
    P = rng.random(200)
    ptilde = rng.random(200) * (1 - P)
    H = conditional_rank_pmf(P, ptilde, 7)
    np.testing.assert_allclose(H.sum(axis=1), 1.0, atol=1e-12)


def test_ordered_cdf_invariants():
    elems = list(range(6))
    probs = np.array([0.1, 0.3, 0.0, 0.2, 0.25, 0.15])
    cdf = ordered_cdf(elems, probs, NAT)
    assert cdf.ptilde[0] == 0.0
    assert np.all(np.diff(cdf.ptilde) >= 0)
    assert np.all(cdf.ptilde + cdf.p <= 1 + 1e-12)


def test_truncated_countable_domain_reports_tail():
    p, q = BimodalPoisson(10, 20), BimodalPoisson(10, 25)
    support = sorted(set(p.truncated_support(1e-13)) | set(q.truncated_support(1e-13)))
    res = exact_rank_pmf(p, q, NAT, 1, support=support)
    assert res.tail_mass < 1e-12
    # reflection symmetry makes m = 1 exactly uniform
    np.testing.assert_allclose(res.probs, 0.5, atol=1e-12)
    assert sup_norm_to_uniform(exact_rank_pmf(p, q, NAT, 30, support=support)) > 1e-3
    short = exact_rank_pmf(p, q, NAT, 1, support=range(-10, 11))
    assert short.tail_mass > 0.1


def test_argument_errors():
    with pytest.raises(ValueError):
        exact_rank_pmf(FinitePmf([0.5, 0.5]), FinitePmf([0.2, 0.3, 0.5]), NAT, 2)

    class SamplerOnly(DiscreteModel):
        def sample(self, rng):
            return 0

    with pytest.raises(ValueError):
        exact_rank_pmf(SamplerOnly(), FinitePmf([1.0]), NAT, 2)
    with pytest.raises(ValueError):
        exact_rank_pmf(BimodalPoisson(1, 2), BimodalPoisson(1, 2), NAT, 2)
    with pytest.raises(ValueError):
        exact_rank_pmf(FinitePmf([1.0]), FinitePmf([1.0]), NAT, 0)


def test_sup_norm_examples():
    assert sup_norm_to_uniform(ExactRankPmf(3, [0.25] * 4)) == 0.0
    assert sup_norm_to_uniform(ExactRankPmf(2, [0.25, 0.5, 0.25])) == pytest.approx(1 / 6)
    assert sup_norm_to_uniform(ExactRankPmf(1, [1.0, 0.0])) == 0.5


def test_monte_carlo_null_and_determinism():
    p = FinitePmf([0.5, 0.5])
    est = mc_rank_pmf(p, p, NAT, 3, 10**6, RandomSource(8))
    assert np.all(np.abs(est.probs - 0.25) <= 3 * est.stderr)
    again = mc_rank_pmf(p, p, NAT, 3, 10**6, RandomSource(8))
    np.testing.assert_array_equal(est.probs, again.probs)

"""Acceptance criteria, one test each.

Every test appends a ``criterion N: PASS|FAIL`` line that is printed in the
pytest terminal summary. Run standalone with ``python3 tests/test_acceptance.py``.
"""

import functools
import math
import time
from collections import Counter

import numpy as np
import pytest

from srsgof.diagnostics import ising_diagnose
from srsgof.distributions import CRP, BimodalPoisson, BitStringFamily, FinitePmf, crp_pmf
from srsgof.distributions.ising import boltzmann_weights, chain_visit_counts
from srsgof.domains import iter_partitions
from srsgof.exact import exact_rank_pmf, mc_rank_pmf, sup_norm_to_uniform
from srsgof.orderings import compare_partitions, lex_order, optimal_order, parity_order, partition_order
from srsgof.power import ExperimentConfig, estimate_power, l_inf_distance, sample_complexity, weight_sweep
from srsgof.ranking import natural_order
from srsgof.special import normal_cdf
from srsgof.streams import RandomSource

NULL_BAND = (0.032, 0.070)


def _log(log, number, ok, detail, started):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{time.perf_counter() - started:.1f}s]"
    log.append(line)
    print(line)
    return ok


def random_pair(gen: np.random.Generator, size: int, sparse: float = 0.2):
    """Two random pmfs on ``size`` points, some entries forced to zero."""
    out = []
    for _ in range(2):
        w = gen.dirichlet(np.ones(size))
        w[gen.random(size) < sparse] = 0.0
        if w.sum() == 0.0:
            w[gen.integers(size)] = 1.0
        out.append(w / w.sum())
    return out


def test_criterion_1_null_calibration(acceptance_log):
    t0 = time.perf_counter()
    models = [
        (BitStringFamily(8, "ind"), lex_order()),
        (CRP(10, 0.52, 0.52), partition_order()),
        (BimodalPoisson(10, 20), natural_order()),
    ]
    rates = {}
    for model, order in models:
        cfg = ExperimentConfig(p=model, q=model, order=order, m=9, n=500, alpha=0.05, trials=1000, seed=101)
        rates[model.name] = estimate_power(cfg).power
    ok = all(NULL_BAND[0] <= r <= NULL_BAND[1] for r in rates.values())
    detail = "rejection rates " + ", ".join(f"{k}={v:.3f}" for k, v in rates.items()) + f" in {list(NULL_BAND)}"
    assert _log(acceptance_log, 1, ok, detail, t0), detail


def test_criterion_2_exact_matches_monte_carlo(acceptance_log):
    t0 = time.perf_counter()
    gen = np.random.default_rng(202)
    worst_z, worst_sum = 0.0, 0.0
    for i in range(50):
        a, b = random_pair(gen, 6)
        p, q = FinitePmf(a), FinitePmf(b)
        m = 1 + i % 5
        exact = exact_rank_pmf(p, q, natural_order(), m)
        mc = mc_rank_pmf(p, q, natural_order(), m, 10**6, RandomSource(202, (i,)))
        se = np.maximum(mc.stderr, 1e-300)
        z = np.abs(exact.probs - mc.probs) / se
        z[np.abs(exact.probs - mc.probs) <= 1e-15] = 0.0
        worst_z = max(worst_z, float(z.max()))
        worst_sum = max(worst_sum, abs(math.fsum(exact.probs) - 1.0))
    ok = worst_z <= 4.0 and worst_sum <= 1e-9
    detail = f"max |exact - mc| = {worst_z:.2f} SE (<= 4), max |sum - 1| = {worst_sum:.1e} (<= 1e-9)"
    assert _log(acceptance_log, 2, ok, detail, t0), detail


def test_criterion_3_two_point_pair(acceptance_log):
    t0 = time.perf_counter()
    p = FinitePmf([0.5, 0.0, 0.0, 0.5])
    q = FinitePmf([0.0, 0.5, 0.5, 0.0])
    m1 = exact_rank_pmf(p, q, natural_order(), 1).probs
    m2 = exact_rank_pmf(p, q, natural_order(), 2).probs
    err = max(np.abs(m1 - [0.5, 0.5]).max(), np.abs(m2 - [0.25, 0.5, 0.25]).max())
    ok = err <= 1e-12
    detail = f"m=1 -> {m1.tolist()}, m=2 -> {m2.tolist()}, max error {err:.1e}"
    assert _log(acceptance_log, 3, ok, detail, t0), detail


def test_criterion_4_nonuniformity_persists(acceptance_log):
    t0 = time.perf_counter()
    gen = np.random.default_rng(404)
    checked = violations = 0
    pairs = 0
    while pairs < 50:
        a, b = random_pair(gen, 6)
        if l_inf_distance(a, b) <= 1e-9:
            continue
        pairs += 1
        p, q = FinitePmf(a), FinitePmf(b)
        dist = functools.lru_cache(None)(lambda m: sup_norm_to_uniform(exact_rank_pmf(p, q, natural_order(), m)))
        first = next((m for m in range(1, 7) if dist(m) > 1e-9), None)
        if first is None:
            continue
        checked += 1
        violations += any(dist(m) <= 1e-9 for m in range(first, first + 6))
    ok = violations == 0
    detail = f"{checked}/50 pairs non-uniform by m<=6, {violations} later became uniform"
    assert _log(acceptance_log, 4, ok, detail, t0), detail


def test_criterion_5_optimal_order_bound(acceptance_log):
    t0 = time.perf_counter()
    gen = np.random.default_rng(505)
    worst = math.inf
    for _ in range(200):
        a, b = random_pair(gen, 8)
        order = optimal_order(a, b)
        probs = exact_rank_pmf(FinitePmf(a), FinitePmf(b), order, 1).probs
        bound = 0.5 + 0.5 * l_inf_distance(a, b) ** 2
        worst = min(worst, max(probs) - bound)
    ok = worst >= -1e-12
    detail = f"min over 200 pairs of max(Pr0, Pr1) - (1/2 + Linf^2/2) = {worst:.3e} (>= -1e-12)"
    assert _log(acceptance_log, 5, ok, detail, t0), detail


def test_criterion_6_sample_complexity_power(acceptance_log):
    t0 = time.perf_counter()
    p = np.full(8, 1 / 8)
    q = p.copy()
    q[0] += 0.4
    q[1:] -= 0.4 / 7
    linf = l_inf_distance(p, q)
    n = sample_complexity(0.05, linf)
    cfg = ExperimentConfig(
        p=FinitePmf(p),
        q=FinitePmf(q),
        order=optimal_order(p, q),
        m=1,
        n=n,
        alpha=0.05,
        trials=1000,
        seed=606,
        test="binomial_normal",
    )
    power = estimate_power(cfg).power
    target = 1 - normal_cdf(-1.959963984540054)
    ok = abs(linf - 0.4) < 1e-12 and power >= target - 0.05
    detail = f"Linf={linf:.3f}, n={n}, power={power:.3f} (>= {target - 0.05:.3f})"
    assert _log(acceptance_log, 6, ok, detail, t0), detail


def test_criterion_7_bitstring_supnorm(acceptance_log):
    t0 = time.perf_counter()
    base = BitStringFamily(16, "ind")
    cfg = ExperimentConfig(p=base, q=base, order=lex_order(), m=6, n=1, alternative=BitStringFamily(16, "odd"))
    weights = [0.0, 0.25, 0.5, 0.75, 1.0]
    rows = weight_sweep(cfg, weights, "supnorm", [lex_order(), parity_order()])
    curve = {name: [r.value for r in rows if r.ordering == name] for name in ("lex", "parity")}
    ok = (
        curve["parity"][-1] > curve["lex"][-1]
        and curve["parity"][0] <= 1e-12
        and curve["lex"][0] <= 1e-12
        and all(b >= a for a, b in zip(curve["parity"], curve["parity"][1:]))
    )
    detail = "parity " + str([round(v, 5) for v in curve["parity"]]) + ", lex " + str([round(v, 5) for v in curve["lex"]])
    assert _log(acceptance_log, 7, ok, detail, t0), detail


def test_criterion_8_poisson_power_ordering(acceptance_log):
    t0 = time.perf_counter()
    p, q = BimodalPoisson(10, 20), BimodalPoisson(10, 25)
    power = {}
    for m in (1, 3, 30):
        cfg = ExperimentConfig(p=p, q=q, order=natural_order(), m=m, n=512, alpha=0.05, trials=512, seed=808)
        power[m] = estimate_power(cfg).power
    ok = power[30] > power[3] > power[1] and NULL_BAND[0] <= power[1] <= NULL_BAND[1]
    detail = f"power m=30 {power[30]:.3f} > m=3 {power[3]:.3f} > m=1 {power[1]:.3f}; m=1 in {list(NULL_BAND)}"
    assert _log(acceptance_log, 8, ok, detail, t0), detail


def _oracle_partition_key(x):
    # nested tuples: block count, then (size, elements) block by block
    blocks = sorted((sorted(b) for b in x.blocks), key=lambda b: b[0])
    return (len(blocks), tuple((len(b), tuple(b)) for b in blocks))


def test_criterion_9_partition_machinery(acceptance_log):
    t0 = time.perf_counter()
    parts = list(iter_partitions(8))
    gen = np.random.default_rng(909)
    idx = gen.integers(len(parts), size=(10**4, 2))
    disagree = 0
    for i, j in idx:
        a, b = parts[i], parts[j]
        ka, kb = _oracle_partition_key(a), _oracle_partition_key(b)
        disagree += int(compare_partitions(a, b)) != (ka > kb) - (ka < kb)
    by_cmp = sorted(parts, key=functools.cmp_to_key(compare_partitions))
    by_oracle = sorted(parts, key=_oracle_partition_key)
    disagree += by_cmp != by_oracle

    sums = [math.fsum(crp_pmf(x, a, b) for x in iter_partitions(6)) for a, b in ((0.0, 1.0), (0.52, 0.52), (0.3, 4.0))]
    sum_err = max(abs(s - 1.0) for s in sums)

    draws = 10**6
    a, b = 0.52, 0.52
    counts = Counter(CRP(5, a, b).sample_batch(RandomSource(909), draws))
    worst = 0.0
    for x in iter_partitions(5):
        pr = crp_pmf(x, a, b)
        se = math.sqrt(pr * (1 - pr) / draws)
        worst = max(worst, abs(counts[x] / draws - pr) / se)
    ok = len(parts) == 4140 and disagree == 0 and sum_err <= 1e-9 and worst <= 3.0
    detail = (
        f"|Pi_8|={len(parts)}, {disagree} disagreements with oracle, "
        f"max |sum crp_pmf - 1| = {sum_err:.1e}, max atom deviation {worst:.2f} SE (<= 3)"
    )
    assert _log(acceptance_log, 9, ok, detail, t0), detail


def test_criterion_10_ising(acceptance_log):
    t0 = time.perf_counter()
    tv = {}
    for T in (3.0, 8.0):
        exact = boltzmann_weights(3, T)
        for method in ("gibbs", "mh"):
            counts = chain_visit_counts(1010 + int(T), 3, T, method, 4_000_000, burn_in=1000)
            tv[(T, method)] = 0.5 * float(np.abs(counts / counts.sum() - exact).sum())

    p1, c1, c5000 = [], [], []
    for seed in range(5):
        rows = ising_diagnose(16, 8.0, "mh", [1, 5000], n=200, m=9, rng=RandomSource(seed))
        p1.append(rows[0].p_value)
        c1.append(rows[0].chisq_statistic)
        c5000.append(rows[1].chisq_statistic)
    med_p1 = float(np.median(p1))
    ok = max(tv.values()) <= 0.01 and med_p1 < 0.01 and np.median(c5000) < np.median(c1)
    detail = (
        "TV " + ", ".join(f"T={T:g}/{m}={v:.4f}" for (T, m), v in tv.items()) + " (<= 0.01); "
        f"median p(steps=1)={med_p1:.1e} (< 0.01), median chisq 5000 {np.median(c5000):.1f} < 1 step {np.median(c1):.1f}"
    )
    assert _log(acceptance_log, 10, ok, detail, t0), detail


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))

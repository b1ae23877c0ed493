"""Acceptance suite: one test and one PASS/FAIL summary line per criterion.

Large samples are drawn once per session and shared between criteria.
Criteria that the implementation cannot meet are run exactly as stated and
left failing; the printed line carries the measured values.
"""

import functools
import itertools
import math
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from seqroute.analytics import (
    expected_steps,
    finite_tail_bound,
    random_pair_expected_steps,
    record_variance,
)
from seqroute.continuous import conjecture_sweep, from_points, greedy_walk_continuous
from seqroute.experiments import (
    ExperimentConfig,
    distance_histogram,
    exhaustive_distribution,
    ks_distance_to_normal,
    run_experiment,
    sample_pair_steps,
    sample_records,
    standardize,
    tail_thresholds,
    wilson_interval,
)
from seqroute.graph import build_by_criterion, build_incremental
from seqroute.permutation import Permutation, random_permutation, record_stats
from seqroute.rng import DEFAULT_SEED, stream
from seqroute.routing import greedy_walk, steps_via_records

from conftest import ACCEPTANCE_LINES, EX16_TAU

pytestmark = pytest.mark.acceptance

SEED = DEFAULT_SEED
TRIALS = 100_000
BIG = 10**4
GRID_N = (500, 2000, BIG)
GRID_C = (0.2, 0.5, 1.0)


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@functools.lru_cache(maxsize=None)
def records_sample(n):
    """(L, R, seconds) for TRIALS permutations, with the 1% walk cross-check on."""
    t0 = time.perf_counter()
    L, R = sample_records(n, TRIALS, SEED)
    return L, R, time.perf_counter() - t0


def steps_sample(n):
    L, R, _ = records_sample(n)
    return L + R - 2


@functools.lru_cache(maxsize=None)
def exhaustive(n):
    return exhaustive_distribution(n)


def test_exact_identity():
    t0 = time.perf_counter()
    checked = violations = 0
    for n in range(2, 9):
        for tau in itertools.permutations(range(1, n + 1)):
            p = Permutation.from_tau(tau)
            rs = record_stats(p)
            checked += 1
            violations += greedy_walk(build_incremental(p), 1, n).steps != rs.L + rs.R - 2
    elapsed = time.perf_counter() - t0
    report(
        "exact identity (walk 1->n = L+R-2, n<=8)",
        violations == 0 and elapsed < 60,
        f"{checked} permutations, {violations} violations, {elapsed:.1f}s (limit 60s)",
    )


def test_arbitrary_pairs():
    checked = violations = 0
    example = None
    for n in range(2, 7):
        for tau in itertools.permutations(range(1, n + 1)):
            p = Permutation.from_tau(tau)
            g = build_incremental(p)
            for s, t in itertools.combinations(range(1, n + 1), 2):
                checked += 1
                walked = greedy_walk(g, s, t)
                if walked.steps != steps_via_records(p, s, t):
                    violations += 1
                    example = example or (tau, s, t, walked.path)
    detail = f"{checked} (perm, s<t) cases, {violations} violations"
    if example:
        tau, s, t, path = example
        detail += f"; first: tau={tau} s={s} t={t} path={list(path)}"
    report("arbitrary pairs (walk s->t = window L+R-2, n<=6)", violations == 0, detail)


def test_edge_set_equivalence():
    exhaustive_checked = exhaustive_bad = 0
    for n in range(1, 9):
        for tau in itertools.permutations(range(1, n + 1)):
            p = Permutation.from_tau(tau)
            exhaustive_checked += 1
            exhaustive_bad += build_incremental(p).adjacency != build_by_criterion(p).adjacency
    random_bad = 0
    for i in range(1000):
        p = random_permutation(BIG, stream(SEED, BIG, i))
        random_bad += build_incremental(p).adjacency != build_by_criterion(p).adjacency
    report(
        "edge-set equivalence (incremental vs criterion)",
        exhaustive_bad == 0 and random_bad == 0,
        f"exhaustive n<=8: {exhaustive_checked} perms, {exhaustive_bad} mismatches; "
        f"n=10^4: 1000 perms, {random_bad} mismatches",
    )


def test_golden_example():
    p = Permutation.from_tau(EX16_TAU)
    rs = record_stats(p)
    trace = greedy_walk(build_incremental(p), 1, 16)
    ok = (
        rs.ltr_positions == (1, 4, 7)
        and rs.rtl_positions == (7, 16)
        and trace.path == (1, 4, 7, 16)
        and trace.steps == 3
    )
    report(
        "golden 16-vertex example",
        ok,
        f"LTR={list(rs.ltr_positions)} RTL={list(rs.rtl_positions)} path={list(trace.path)} S={trace.steps}",
    )


def test_expectation():
    exact_ok = all(exhaustive(n).mean_steps == expected_steps(n, exact=True) for n in range(1, 9))
    S = steps_sample(BIG)
    _, _, elapsed = records_sample(BIG)
    mean, sd = float(S.mean()), float(S.std(ddof=1))
    target = expected_steps(BIG)
    tol = 4 * sd / math.sqrt(TRIALS)
    mc_ok = abs(mean - target) < tol
    report(
        "expectation E[S_n] = 2H_n - 2",
        exact_ok and mc_ok and elapsed < 300,
        f"exact n<=8: {'match' if exact_ok else 'MISMATCH'}; n=10^4 mean {mean:.4f} vs {target:.4f} "
        f"(|diff| {abs(mean - target):.4f} < {tol:.4f}: {mc_ok}); sampling {elapsed:.0f}s (limit 300s)",
    )


def test_variance():
    exact_ok = True
    for n in range(1, 9):
        d = exhaustive(n)
        exact_ok &= d.var_steps == 2 * record_variance(n, exact=True) + 2 * d.cov_LR
    S = steps_sample(BIG)
    ratio = float(S.var(ddof=1)) / (2 * math.log(BIG))
    band_ok = 0.7 <= ratio <= 1.3
    report(
        "variance Var(S_n) = 2 ln n + O(1)",
        exact_ok and band_ok,
        f"exact n<=8 decomposition: {'match' if exact_ok else 'MISMATCH'}; "
        f"n=10^4 sample var / (2 ln n) = {ratio:.4f} (band [0.7, 1.3])",
    )


def test_bound_validity():
    cells = bad = 0
    ratio_checked = ratio_bad = 0
    worst = []
    for n in GRID_N:
        S = steps_sample(n)
        mean = expected_steps(n)
        for c in GRID_C:
            upper, lower = tail_thresholds(n, c)
            for direction, k, t in (
                ("upper", int(np.count_nonzero(S >= upper)), upper - mean),
                ("lower", int(np.count_nonzero(S <= lower)), mean - lower),
            ):
                emp = k / TRIALS
                lo, hi = wilson_interval(k, TRIALS)
                bound = finite_tail_bound(n, t, direction).bound
                cells += 1
                if emp > bound + (hi - lo) / 2:
                    bad += 1
                    worst.append((n, c, direction, emp, bound))
                if emp >= 1e-4:
                    ratio_checked += 1
                    ratio_bad += not bound / emp > 1
    report(
        "bound validity (empirical tail <= finite bound + Wilson half-width)",
        bad == 0 and ratio_bad == 0,
        f"{cells} cells, {bad} exceed the bound; ratio > 1 in {ratio_checked - ratio_bad}/{ratio_checked} "
        f"cells with empirical >= 1e-4" + (f"; violations {worst}" if worst else ""),
    )


def test_clt():
    z = standardize(steps_sample(BIG), BIG)
    mean, var = float(z.mean()), float(z.var(ddof=1))
    ks = [ks_distance_to_normal(standardize(steps_sample(n), n)) for n in GRID_N]
    mean_ok = abs(mean) <= 0.05
    var_ok = 0.85 <= var <= 1.15
    ks_ok = all(a > b for a, b in zip(ks, ks[1:]))
    report(
        "CLT for the standardized step count",
        mean_ok and var_ok and ks_ok,
        f"n=10^4 std mean {mean:+.4f} (|.|<=0.05: {mean_ok}), std var {var:.4f} "
        f"(band [0.85, 1.15]: {var_ok}); KS over n=500,2000,10^4 = "
        f"{', '.join(f'{d:.4f}' for d in ks)} (strictly decreasing: {ks_ok})",
    )


def test_random_pairs():
    # n = 3 over all 6 orders and all 6 ordered pairs, counted by walking.
    total = Fraction(0)
    for tau in itertools.permutations(range(1, 4)):
        g = build_incremental(Permutation.from_tau(tau))
        for s, t in itertools.permutations(range(1, 4), 2):
            total += greedy_walk(g, s, t).steps
    exact = total / 36
    exact_ok = exact == Fraction(11, 9) == random_pair_expected_steps(3, exact=True)

    steps, dist, _ = sample_pair_steps(BIG, TRIALS, SEED)
    mean = float(steps.mean())
    se = float(steps.std(ddof=1)) / math.sqrt(TRIALS)
    formula = random_pair_expected_steps(BIG)
    mc_ok = abs(mean - formula) < 4 * se
    hist = distance_histogram(BIG, dist)
    chi_ok = hist["p_value"] > 0.01
    report(
        "random pairs",
        exact_ok and mc_ok and chi_ok,
        f"n=3 exact mean {exact} (11/9: {exact_ok}); n=10^4 mean {mean:.4f} vs formula {formula:.4f} "
        f"(|diff| {abs(mean - formula):.4f} < 4 SE {4 * se:.4f}: {mc_ok}); distance chi2 "
        f"{hist['chi2']:.1f} on {hist['dof']} dof, p = {hist['p_value']:.3f} (> 0.01: {chi_ok})",
    )


def test_continuous_conjecture():
    inst = from_points([0.0, 1.0, 0.45], 1, "interval")
    stuck_ok = greedy_walk_continuous(inst, 2, 1).status == "stuck"

    nest_bad = 0
    for i in range(100):
        pts = stream(SEED, 1000, i, 0).random(1000).tolist()
        edges = [from_points(pts, K, "circle").edges() for K in range(1, 9)]
        nest_bad += not all(a <= b for a, b in zip(edges, edges[1:]))

    first = conjecture_sweep([BIG], [8], 1000, 1, seed=SEED, topology="circle")
    second = conjecture_sweep([BIG], [8], 1000, 1, seed=SEED, topology="circle")
    (row,) = first
    det_ok = first == second
    note = ""
    if row["success_rate"] < 0.9:
        note = " (soft warning: success_rate below 0.9)"
        warnings.warn(f"continuous K=8 success rate {row['success_rate']:.3f} < 0.9")
    report(
        "continuous K-NN exploration",
        stuck_ok and nest_bad == 0 and det_ok,
        f"(a) stuck instance: {stuck_ok}; (b) K-nesting K=1..8 on 100 instances at n=10^3: "
        f"{nest_bad} failures; (c) circle K=8 n=10^4: success_rate {row['success_rate']:.3f}, "
        f"steps/ln n {row['steps_per_ln_n']:.3f}, deterministic: {det_ok}{note}",
    )


def test_determinism():
    configs = [
        ExperimentConfig("pmf", [300, 1000], 4000, seed=SEED),
        ExperimentConfig("tails", [300], 4000, seed=SEED, c_list=list(GRID_C)),
        ExperimentConfig("random_pairs", [300], 4000, seed=SEED),
        ExperimentConfig("covariance", [300], 4000, seed=SEED),
        ExperimentConfig("clt", [300], 10_000, seed=SEED),
        ExperimentConfig("bound_ratio", [300], 4000, seed=SEED, c_list=list(GRID_C)),
    ]
    differing = []
    for cfg in configs:
        one = run_experiment(cfg).to_csv()
        cfg.workers = 8
        eight = run_experiment(cfg).to_csv()
        if one != eight:
            differing.append(cfg.kind)
    report(
        "determinism (workers 1 vs 8, byte-identical CSV)",
        not differing,
        f"{len(configs)} experiment kinds compared; differing: {differing or 'none'}",
    )

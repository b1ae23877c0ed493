"""Monte Carlo and exhaustive experiments on the greedy step count.

Trial ``i`` at size ``n`` always draws from ``stream(seed, n, i)``, and
trials are processed in fixed-size blocks whose results are concatenated in
trial order. Output therefore depends on ``(config, seed)`` only, never on
the number of workers.
"""

from __future__ import annotations

import csv
import functools
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np
from scipy import stats

from seqroute import __version__
from seqroute.analytics import (
    asymptotic_tail_bound,
    expected_steps,
    finite_tail_bound,
    random_pair_expected_steps,
    triangular_distance_pmf,
)
from seqroute.graph import build_by_criterion, build_incremental
from seqroute.permutation import Permutation, record_counts, record_stats
from seqroute.rng import DEFAULT_SEED, RNG_ALGORITHM, stream
from seqroute.routing import greedy_walk

BLOCK = 500
CROSS_CHECK_EVERY = 100
EXHAUSTIVE_MAX_N = 10
WILSON_CONFIDENCE = 0.99

SCHEMAS = {
    "pmf": ("n", "steps", "count", "freq", "normal_approx"),
    "tails": (
        "n", "c", "direction", "threshold", "empirical",
        "wilson_lo", "wilson_hi", "finite_bound", "asym_bound",
    ),
    "random_pairs": ("n", "trials", "mean_steps", "stderr", "exact_formula"),
    "covariance": ("n", "trials", "cov_hat", "jackknife_se"),
    "clt": ("n", "trials", "std_mean", "std_var", "std_skew", "ks_distance"),
    "bound_ratio": ("n", "c", "threshold", "empirical", "finite_bound", "ratio"),
}


class IdentityViolation(AssertionError):
    """A sampled trial's greedy walk disagreed with its record count."""


@dataclass
class ExperimentConfig:
    kind: str
    n_list: list[int]
    trials: int
    seed: int = DEFAULT_SEED
    workers: int = 1
    c_list: list[float] = field(default_factory=list)
    cross_check_every: int = CROSS_CHECK_EVERY

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_list:
            raise ValueError("n_list is empty")

    def echo(self) -> dict:
        """Configuration as written into output headers; scheduling hints are left out."""
        d = asdict(self)
        d.pop("workers")
        return d


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    wall_time: float = 0.0
    rng_algorithm: str = RNG_ALGORITHM
    notes: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def columns(self) -> tuple[str, ...]:
        return SCHEMAS[self.config.kind]

    def header_lines(self) -> list[str]:
        lines = [
            f"seqroute {__version__}",
            "config " + json.dumps(self.config.echo(), sort_keys=True),
            f"rng {self.rng_algorithm}",
        ]
        return lines + self.notes

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header_lines():
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "version": __version__,
            "config": self.config.echo(),
            "rng_algorithm": self.rng_algorithm,
            "notes": self.notes,
            "columns": list(self.columns),
            "rows": self.rows,
            "wall_time": self.wall_time,
        }
        payload.update(self.extras)
        return json.dumps(payload, indent=2, default=_json_default)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_default(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, Fraction):
        return str(v)
    raise TypeError(f"not JSON serializable: {type(v)}")


# -- sampling core -----------------------------------------------------------


def _draw_tau(rng: np.random.Generator, n: int) -> np.ndarray:
    """Insertion times of a uniform insertion order (same draw as ``random_permutation``)."""
    pi = rng.permutation(n)
    tau = np.empty(n, dtype=np.int32)
    tau[pi] = np.arange(1, n + 1, dtype=np.int32)
    return tau


def _walk_steps(tau: np.ndarray, s: int, t: int) -> int:
    perm = Permutation.from_tau(tau.tolist())
    return greedy_walk(build_by_criterion(perm), s, t).steps


def _full_block(args) -> tuple[np.ndarray, np.ndarray]:
    n, seed, start, stop, every = args
    taus = np.empty((stop - start, n), dtype=np.int32)
    for row, trial in enumerate(range(start, stop)):
        taus[row] = _draw_tau(stream(seed, n, trial), n)
    L, R = record_counts(taus)
    if every and n >= 2:
        for row, trial in enumerate(range(start, stop)):
            if trial % every == 0:
                expected = int(L[row] + R[row] - 2)
                walked = _walk_steps(taus[row], 1, n)
                if walked != expected:
                    raise IdentityViolation(
                        f"n={n} trial={trial}: greedy walk took {walked} steps, L+R-2={expected}"
                    )
    return L.astype(np.int64), R.astype(np.int64)


def _pair_block(args) -> tuple[np.ndarray, ...]:
    n, seed, start, stop, every = args
    size = stop - start
    steps = np.empty(size, dtype=np.int64)
    dist = np.empty(size, dtype=np.int64)
    # -1 marks trials that were not walked.
    walked = np.full(size, -1, dtype=np.int64)
    for row, trial in enumerate(range(start, stop)):
        rng = stream(seed, n, trial)
        tau = _draw_tau(rng, n)
        s, t = (rng.choice(n, size=2, replace=False) + 1).tolist()
        lo, hi = min(s, t), max(s, t)
        L, R = record_counts(tau[lo - 1 : hi])
        steps[row] = int(L[0] + R[0] - 2)
        dist[row] = hi - lo
        if every and trial % every == 0:
            walked[row] = _walk_steps(tau, s, t)
    return steps, dist, walked


def _run_blocks(fn, n: int, trials: int, seed: int, workers: int, every: int):
    tasks = [
        (n, seed, start, min(start + BLOCK, trials), every)
        for start in range(0, trials, BLOCK)
    ]
    if workers <= 1 or len(tasks) == 1:
        parts = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, tasks))
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def sample_records(n: int, trials: int, seed: int = DEFAULT_SEED, workers: int = 1,
                   cross_check_every: int = CROSS_CHECK_EVERY) -> tuple[np.ndarray, np.ndarray]:
    """``(L_n, R_n)`` for ``trials`` independent uniform permutations.

    Every ``cross_check_every``-th trial is also routed on an explicitly built
    graph and must agree with ``L + R - 2`` (0 disables the check).
    """
    if n < 1 or trials < 1:
        raise ValueError("need n >= 1 and trials >= 1")
    return _run_blocks(_full_block, n, trials, seed, workers, cross_check_every)


def sample_steps(n: int, trials: int, seed: int = DEFAULT_SEED, workers: int = 1,
                 cross_check_every: int = CROSS_CHECK_EVERY) -> np.ndarray:
    L, R = sample_records(n, trials, seed, workers, cross_check_every)
    return L + R - 2


def sample_pair_steps(n: int, trials: int, seed: int = DEFAULT_SEED, workers: int = 1,
                      cross_check_every: int = CROSS_CHECK_EVERY) -> tuple[np.ndarray, ...]:
    """Record-count steps, ``|s - t|`` and walked steps for uniform distinct pairs.

    Steps come from ``L + R - 2`` on the window between the endpoints. Every
    ``cross_check_every``-th trial is also walked on the built graph; other
    entries of the third array are -1. The walk may overshoot an interior
    target along a long edge, so the two counts are compared, not asserted equal.
    """
    if n < 2:
        raise ValueError("random pairs need n >= 2")
    return _run_blocks(_pair_block, n, trials, seed, workers, cross_check_every)


# -- exhaustive enumeration ----------------------------------------------------


@dataclass(frozen=True)
class ExhaustiveDistribution:
    n: int
    count: int
    steps_counts: dict[int, int]
    L_counts: dict[int, int]
    R_counts: dict[int, int]
    mean_steps: Fraction
    var_steps: Fraction
    mean_L: Fraction
    var_L: Fraction
    cov_LR: Fraction


def exhaustive_distribution(n: int) -> ExhaustiveDistribution:
    """Exact laws of ``S_n``, ``L_n``, ``R_n`` over all ``n!`` insertion orders.

    Each permutation is routed on its built graph and the step count compared
    against ``L + R - 2``; any disagreement raises :class:`IdentityViolation`.
    """
    if not 1 <= n <= EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive enumeration needs 1 <= n <= {EXHAUSTIVE_MAX_N}")
    s_counts: dict[int, int] = {}
    l_counts: dict[int, int] = {}
    r_counts: dict[int, int] = {}
    sum_l = sum_r = sum_ll = sum_lr = sum_s = sum_ss = 0
    total = 0
    for tau in itertools.permutations(range(1, n + 1)):
        perm = Permutation.from_tau(tau)
        rs = record_stats(perm)
        L, R = rs.L, rs.R
        S = L + R - 2
        walked = greedy_walk(build_incremental(perm), 1, n).steps if n > 1 else 0
        if walked != S:
            raise IdentityViolation(f"tau={tau}: walk took {walked} steps, L+R-2={S}")
        s_counts[S] = s_counts.get(S, 0) + 1
        l_counts[L] = l_counts.get(L, 0) + 1
        r_counts[R] = r_counts.get(R, 0) + 1
        sum_l += L
        sum_r += R
        sum_ll += L * L
        sum_lr += L * R
        sum_s += S
        sum_ss += S * S
        total += 1
    mean_l = Fraction(sum_l, total)
    mean_s = Fraction(sum_s, total)
    return ExhaustiveDistribution(
        n=n,
        count=total,
        steps_counts=dict(sorted(s_counts.items())),
        L_counts=dict(sorted(l_counts.items())),
        R_counts=dict(sorted(r_counts.items())),
        mean_steps=mean_s,
        var_steps=Fraction(sum_ss, total) - mean_s**2,
        mean_L=mean_l,
        var_L=Fraction(sum_ll, total) - mean_l**2,
        cov_LR=Fraction(sum_lr, total) - mean_l * Fraction(sum_r, total),
    )


# -- experiments ----------------------------------------------------------------


def _timed(fn):
    def wrapper(config: ExperimentConfig) -> ExperimentResult:
        t0 = time.perf_counter()
        result = fn(config)
        result.wall_time = time.perf_counter() - t0
        return result

    return functools.wraps(fn)(wrapper)


def wilson_interval(k: int, trials: int, confidence: float = WILSON_CONFIDENCE) -> tuple[float, float]:
    ci = stats.binomtest(int(k), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _normal_pdf(x: float, mean: float, var: float) -> float:
    return math.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)


@_timed
def sample_pmf(config: ExperimentConfig) -> ExperimentResult:
    """Histogram of ``S_n`` next to the N(2H_n - 2, 2 ln n) density at each step count."""
    rows = []
    for n in config.n_list:
        if n < 2:
            raise ValueError("pmf needs n >= 2")
        S = sample_steps(n, config.trials, config.seed, config.workers, config.cross_check_every)
        values, counts = np.unique(S, return_counts=True)
        mean, var = expected_steps(n), 2 * math.log(n)
        for v, k in zip(values.tolist(), counts.tolist()):
            rows.append({
                "n": n, "steps": v, "count": k, "freq": k / config.trials,
                "normal_approx": _normal_pdf(v, mean, var),
            })
    return ExperimentResult(config, rows)


def tail_thresholds(n: int, c: float) -> tuple[int, int]:
    """Integer thresholds ``ceil((2+c) ln n)`` and ``floor((2-c) ln n)``."""
    ln = math.log(n)
    return math.ceil((2 + c) * ln), math.floor((2 - c) * ln)


@_timed
def sample_tails(config: ExperimentConfig) -> ExperimentResult:
    """Empirical ``P(S_n >= (2+c) ln n)`` and ``P(S_n <= (2-c) ln n)`` against the bounds.

    The finite bound is evaluated at the deviation of the integer threshold
    from ``2H_n - 2``, which is exactly the event being estimated.
    """
    rows = []
    for n in config.n_list:
        S = sample_steps(n, config.trials, config.seed, config.workers, config.cross_check_every)
        mean = expected_steps(n)
        for c in config.c_list:
            upper, lower = tail_thresholds(n, c)
            cells = [("upper", upper, int(np.count_nonzero(S >= upper)), upper - mean)]
            if c < 2:
                cells.append(("lower", lower, int(np.count_nonzero(S <= lower)), mean - lower))
            for direction, threshold, k, t in cells:
                lo, hi = wilson_interval(k, config.trials)
                rows.append({
                    "n": n, "c": float(c), "direction": direction, "threshold": threshold,
                    "empirical": k / config.trials, "wilson_lo": lo, "wilson_hi": hi,
                    "finite_bound": finite_tail_bound(n, t, direction).bound,
                    "asym_bound": asymptotic_tail_bound(n, c, direction),
                })
    notes = [
        "thresholds: upper=ceil((2+c)*ln n), lower=floor((2-c)*ln n); "
        "finite_bound evaluated at the integer threshold",
        f"wilson confidence {WILSON_CONFIDENCE}; asym_bound is the asymptotic reference curve n^-h(+-c/2)",
    ]
    return ExperimentResult(config, rows, notes=notes)


RATIO_FLOOR = 1e-6


@_timed
def bound_ratio(config: ExperimentConfig) -> ExperimentResult:
    """Upper-tail conservatism ``finite_bound / empirical`` over the c grid.

    ``ratio`` is left empty where the empirical probability is below
    ``RATIO_FLOOR``; such estimates are too noisy to divide by.
    """
    tails = sample_tails.__wrapped__(config)
    rows = []
    for r in tails.rows:
        if r["direction"] != "upper":
            continue
        emp = r["empirical"]
        rows.append({
            "n": r["n"], "c": r["c"], "threshold": r["threshold"], "empirical": emp,
            "finite_bound": r["finite_bound"],
            "ratio": r["finite_bound"] / emp if emp >= RATIO_FLOOR else "",
        })
    notes = [tails.notes[0], f"ratio omitted where empirical < {RATIO_FLOOR}"]
    return ExperimentResult(config, rows, notes=notes)


@_timed
def sample_random_pairs(config: ExperimentConfig) -> ExperimentResult:
    """Mean steps for uniform distinct endpoints, plus the distance histogram."""
    rows = []
    hists, checks = {}, {}
    notes = ["mean_steps is L+R-2 on the endpoint window; walked trials may overshoot interior targets"]
    for n in config.n_list:
        steps, dist, walked = sample_pair_steps(n, config.trials, config.seed, config.workers,
                                                config.cross_check_every)
        sd = float(steps.std(ddof=1)) if config.trials > 1 else 0.0
        rows.append({
            "n": n, "trials": config.trials, "mean_steps": float(steps.mean()),
            "stderr": sd / math.sqrt(config.trials),
            "exact_formula": random_pair_expected_steps(n),
        })
        hists[str(n)] = distance_histogram(n, dist)
        mask = walked >= 0
        diff = walked[mask] - steps[mask]
        checks[str(n)] = {
            "walked": int(mask.sum()),
            "disagreements": int(np.count_nonzero(diff)),
            "mean_walk_minus_records": float(diff.mean()) if diff.size else 0.0,
        }
        notes.append(
            f"n={n}: {checks[str(n)]['walked']} trials walked on the built graph, "
            f"{checks[str(n)]['disagreements']} differ from L+R-2"
        )
    extras = {"distance_histograms": hists, "walk_checks": checks}
    return ExperimentResult(config, rows, notes=notes, extras=extras)


def distance_histogram(n: int, dist: np.ndarray) -> dict:
    """Observed ``|s - t|`` counts and a chi-square test against the triangular law.

    Distances whose expected count is below 5 are pooled into one tail cell.
    """
    observed = np.bincount(dist, minlength=n)[1:].astype(float)
    total = observed.sum()
    expected = np.array([triangular_distance_pmf(n, d) for d in range(1, n)]) * total
    obs_cells, exp_cells = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5:
            obs_cells.append(acc_o)
            exp_cells.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and exp_cells:
        obs_cells[-1] += acc_o
        exp_cells[-1] += acc_e
    if len(exp_cells) >= 2:
        chi2, p = stats.chisquare(obs_cells, exp_cells)
    else:
        chi2, p = 0.0, 1.0
    return {
        "counts": observed.astype(int).tolist(),
        "chi2": float(chi2),
        "dof": max(len(exp_cells) - 1, 0),
        "p_value": float(p),
    }


def jackknife_covariance(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Sample covariance and its leave-one-out jackknife standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    N = len(x)
    if N < 3:
        raise ValueError("jackknife needs at least 3 samples")
    xc, yc = x - x.mean(), y - y.mean()
    sx, sy, sxy = xc.sum(), yc.sum(), (xc * yc).sum()
    cov = (sxy - sx * sy / N) / (N - 1)
    loo = ((sxy - xc * yc) - (sx - xc) * (sy - yc) / (N - 1)) / (N - 2)
    se = math.sqrt((N - 1) / N * float(((loo - loo.mean()) ** 2).sum()))
    return float(cov), se


@_timed
def estimate_covariance(config: ExperimentConfig) -> ExperimentResult:
    """Sample ``Cov(L_n, R_n)`` with jackknife standard error."""
    rows = []
    for n in config.n_list:
        if n < 2:
            raise ValueError("covariance needs n >= 2")
        L, R = sample_records(n, config.trials, config.seed, config.workers, config.cross_check_every)
        cov, se = jackknife_covariance(L, R)
        rows.append({"n": n, "trials": config.trials, "cov_hat": cov, "jackknife_se": se})
    return ExperimentResult(config, rows)


def standardize(S: np.ndarray, n: int) -> np.ndarray:
    return (S - expected_steps(n)) / math.sqrt(2 * math.log(n))


def ks_distance_to_normal(z: np.ndarray) -> float:
    """Exact sup-distance between the empirical CDF of ``z`` and the standard normal CDF."""
    values, counts = np.unique(z, return_counts=True)
    cdf_after = np.cumsum(counts) / len(z)
    cdf_before = np.concatenate([[0.0], cdf_after[:-1]])
    phi = np.array([NormalDist().cdf(v) for v in values])
    return float(max(np.abs(cdf_after - phi).max(), np.abs(cdf_before - phi).max()))


@_timed
def clt_diagnostics(config: ExperimentConfig) -> ExperimentResult:
    """Moments and KS distance of ``(S_n - (2H_n - 2)) / sqrt(2 ln n)``."""
    if config.trials < 10_000:
        raise ValueError("clt diagnostics need at least 10^4 trials")
    rows = []
    for n in config.n_list:
        if n < 2:
            raise ValueError("clt needs n >= 2")
        S = sample_steps(n, config.trials, config.seed, config.workers, config.cross_check_every)
        z = standardize(S, n)
        rows.append({
            "n": n, "trials": config.trials,
            "std_mean": float(z.mean()), "std_var": float(z.var(ddof=1)),
            "std_skew": float(stats.skew(z)), "ks_distance": ks_distance_to_normal(z),
        })
    return ExperimentResult(config, rows)


RUNNERS = {
    "pmf": sample_pmf,
    "tails": sample_tails,
    "random_pairs": sample_random_pairs,
    "covariance": estimate_covariance,
    "clt": clt_diagnostics,
    "bound_ratio": bound_ratio,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[config.kind](config)

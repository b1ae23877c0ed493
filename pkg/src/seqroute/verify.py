"""Self-test: cross-check builders, walks and record counts on many permutations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from seqroute import graph as _graph
from seqroute.permutation import Permutation, random_permutation, record_stats
from seqroute.rng import DEFAULT_SEED, stream
from seqroute.routing import greedy_walk, steps_via_records

EXHAUSTIVE_MAX_N = 10
SAMPLED_PAIRS_PER_TRIAL = 10


@dataclass
class Check:
    checked: int = 0
    violations: int = 0
    example: object = None

    def record(self, ok: bool, example) -> None:
        self.checked += 1
        if not ok:
            self.violations += 1
            if self.example is None:
                self.example = example


@dataclass
class VerifyReport:
    n: int
    mode: str
    permutations: int = 0
    checks: dict[str, Check] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.violations == 0 for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "permutations": self.permutations,
            "passed": self.passed,
            "checks": {
                name: {"checked": c.checked, "violations": c.violations, "example": c.example}
                for name, c in self.checks.items()
            },
        }


def _window_graph_steps(perm: Permutation, lo: int, hi: int) -> int:
    """Route 1 -> size on the graph grown from tau restricted to [lo, hi]."""
    sub = perm.tau[lo - 1 : hi]
    rank = {t: r for r, t in enumerate(sorted(sub), start=1)}
    window = Permutation.from_tau([rank[t] for t in sub])
    return greedy_walk(_graph.build_by_criterion(window), 1, window.n).steps


def _check_permutation(report: VerifyReport, perm: Permutation, pairs, endpoints_only: bool) -> None:
    n = perm.n
    tau = perm.tau
    c = report.checks
    g = _graph.build_incremental(perm)
    g2 = _graph.build_by_criterion(perm)
    c["edge_equivalence"].record(g.adjacency == g2.adjacency, {"tau": list(tau)})
    if n < 2:
        return

    rs = record_stats(perm)
    trace = greedy_walk(g, 1, n)
    expected = rs.ltr_positions + rs.rtl_positions[1:]
    c["endpoint_identity"].record(
        trace.steps == rs.L + rs.R - 2 and trace.path == expected,
        {"tau": list(tau), "path": list(trace.path), "L": rs.L, "R": rs.R},
    )
    k = trace.phase_split
    times = [tau[x - 1] for x in trace.path]
    phases_ok = (
        trace.path[k] == rs.m
        and all(a > b for a, b in zip(times[: k + 1], times[1 : k + 1]))
        and all(a < b for a, b in zip(times[k:], times[k + 1 :]))
    )
    c["phase_structure"].record(phases_ok, {"tau": list(tau), "path": list(trace.path)})
    back = greedy_walk(g, n, 1)
    c["reverse_endpoint_identity"].record(back.steps == trace.steps, {"tau": list(tau)})

    for s, t in pairs:
        lo, hi = min(s, t), max(s, t)
        via_records = steps_via_records(perm, s, t)
        c["window_graph_identity"].record(
            _window_graph_steps(perm, lo, hi) == via_records, {"tau": list(tau), "s": s, "t": t}
        )
        if endpoints_only:
            continue
        tr = greedy_walk(g, s, t)
        example = {"tau": list(tau), "s": s, "t": t, "path": list(tr.path), "records": via_records}
        c["pair_identity"].record(tr.steps == via_records, example)
        c["window_confinement"].record(all(lo <= x <= hi for x in tr.path), example)


CHECK_NAMES = (
    "edge_equivalence",
    "endpoint_identity",
    "phase_structure",
    "reverse_endpoint_identity",
    "window_graph_identity",
)
PAIR_CHECK_NAMES = ("pair_identity", "window_confinement")


def verify(n: int, mode: str = "exhaustive", trials: int = 1000, seed: int = DEFAULT_SEED,
           endpoints_only: bool = False) -> VerifyReport:
    """Run every structural check over all (exhaustive) or random (sampled) permutations.

    ``pair_identity`` and ``window_confinement`` test the unconstrained greedy
    walk between arbitrary endpoints; ``endpoints_only`` skips them.
    ``window_graph_identity`` routes on the graph grown from the window alone.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    report = VerifyReport(n, mode)
    names = CHECK_NAMES + (() if endpoints_only else PAIR_CHECK_NAMES)
    report.checks = {name: Check() for name in names}

    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise ValueError(f"exhaustive mode needs n <= {EXHAUSTIVE_MAX_N}")
        pairs = [(s, t) for s in range(1, n + 1) for t in range(s + 1, n + 1)]
        for tau in itertools.permutations(range(1, n + 1)):
            _check_permutation(report, Permutation.from_tau(tau), pairs, endpoints_only)
            report.permutations += 1
    elif mode == "sampled":
        for trial in range(trials):
            rng = stream(seed, n, trial)
            perm = random_permutation(n, rng)
            pairs = []
            if n >= 2:
                for _ in range(SAMPLED_PAIRS_PER_TRIAL):
                    s, t = (rng.choice(n, size=2, replace=False) + 1).tolist()
                    pairs.append((s, t))
            _check_permutation(report, perm, pairs, endpoints_only)
            report.permutations += 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report

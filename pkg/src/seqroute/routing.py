"""Greedy routing on a grown graph and the record-count shortcut for its length."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from seqroute.graph import GrownGraph
from seqroute.permutation import Permutation, record_stats


class RoutingInvariantError(RuntimeError):
    """The walk exceeded its step budget. Indicates a bug, never a valid outcome."""


@dataclass(frozen=True)
class GreedyTrace:
    s: int
    t: int
    path: tuple[int, ...]
    phase_split: int

    @property
    def steps(self) -> int:
        return len(self.path) - 1


def greedy_step(graph: GrownGraph, x: int, t: int) -> int:
    """Neighbor of ``x`` closest to ``t``.

    An exact tie means ``t`` sits midway between a neighbor on each side; the
    neighbor lying in the direction of travel (larger when ``x < t``) wins.
    """
    if x == t:
        raise ValueError("greedy_step called at the target")
    nbrs = graph.adjacency[x - 1]
    i = bisect_right(nbrs, t)
    below = nbrs[i - 1] if i else None
    above = nbrs[i] if i < len(nbrs) else None
    if below is None:
        return above
    if above is None:
        return below
    d_below, d_above = t - below, above - t
    if d_below == d_above:
        return above if x < t else below
    return below if d_below < d_above else above


def _walk_right(graph: GrownGraph, s: int, t: int) -> GreedyTrace:
    tau = graph.source_perm.tau
    path = [s]
    x = s
    split, best = 0, tau[s - 1]
    for _ in range(graph.n):
        if x == t:
            return GreedyTrace(s, t, tuple(path), split)
        x = greedy_step(graph, x, t)
        path.append(x)
        if tau[x - 1] < best:
            split, best = len(path) - 1, tau[x - 1]
    if x == t:
        return GreedyTrace(s, t, tuple(path), split)
    raise RoutingInvariantError(f"greedy walk {s}->{t} did not finish within {graph.n} steps")


def greedy_walk(graph: GrownGraph, s: int, t: int) -> GreedyTrace:
    """Route from ``s`` to ``t``; ``s > t`` is routed on the mirrored axis.

    ``phase_split`` is the path index of the earliest-inserted vertex visited,
    i.e. the turning point between the two record phases.
    """
    n = graph.n
    if not (1 <= s <= n and 1 <= t <= n):
        raise ValueError(f"endpoints must lie in 1..{n}")
    if s == t:
        raise ValueError("s and t must differ")
    if s < t:
        return _walk_right(graph, s, t)
    mirrored = _walk_right(graph.mirrored, n + 1 - s, n + 1 - t)
    return GreedyTrace(s, t, tuple(n + 1 - x for x in mirrored.path), mirrored.phase_split)


def steps_via_records(perm: Permutation, s: int, t: int) -> int:
    """Greedy step count from ``s`` to ``t`` without building the graph.

    Reversing the axis swaps LTR and RTL minima, so ``L + R`` over the
    window is direction-free.
    """
    if s == t:
        raise ValueError("s and t must differ")
    stats = record_stats(perm, (min(s, t), max(s, t)))
    return stats.L + stats.R - 2

"""Construction of the sequentially grown graph G_n.

Two independent builders are provided so each can check the other:

* :func:`build_incremental` replays the insertion process with an ordered set
  of inserted vertices (predecessor/successor queries).
* :func:`build_by_criterion` emits every pair ``x < y`` whose endpoints carry
  the two smallest insertion times of ``[x, y]``, via one monotonic-stack sweep.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

from sortedcontainers import SortedList

from seqroute.permutation import Permutation


class GraphInvariantError(AssertionError):
    """A builder produced a self-loop, multi-edge or asymmetric adjacency."""


@dataclass(frozen=True)
class GrownGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    source_perm: Permutation

    def neighbors(self, x: int) -> tuple[int, ...]:
        return self.adjacency[x - 1]

    def degree(self, x: int) -> int:
        return len(self.adjacency[x - 1])

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(x, y)`` with ``x < y``, sorted lexicographically."""
        return [(x, y) for x in range(1, self.n + 1) for y in self.adjacency[x - 1] if y > x]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def mirrored(self) -> GrownGraph:
        """The same graph on the reversed axis ``x -> n + 1 - x``."""
        n = self.n
        adj = tuple(
            tuple(sorted(n + 1 - y for y in self.adjacency[n - x]))
            for x in range(1, n + 1)
        )
        return GrownGraph(n, adj, self.source_perm.reversed())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tau": list(self.source_perm.tau),
            "edges": [list(e) for e in self.edges()],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")


def _finalize(perm: Permutation, edges: list[tuple[int, int]]) -> GrownGraph:
    n = perm.n
    edges.sort()
    adj: list[list[int]] = [[] for _ in range(n)]
    prev = None
    # Sorted (x, y) with x < y fills every list in ascending order: left
    # neighbors (earlier x) arrive before right neighbors.
    for e in edges:
        x, y = e
        if x >= y:
            raise GraphInvariantError(f"malformed edge {e}")
        if e == prev:
            raise GraphInvariantError(f"multi-edge {e}")
        prev = e
        adj[x - 1].append(y)
        adj[y - 1].append(x)
    return GrownGraph(n, tuple(map(tuple, adj)), perm)


def build_incremental(perm: Permutation) -> GrownGraph:
    """Replay insertions: each new vertex links to its nearest inserted vertex on each side."""
    inserted = SortedList()
    edges = []
    for x in perm.pi:
        i = inserted.bisect_left(x)
        if i > 0:
            edges.append((inserted[i - 1], x))
        if i < len(inserted):
            edges.append((x, inserted[i]))
        inserted.add(x)
    return _finalize(perm, edges)


def build_by_criterion(perm: Permutation) -> GrownGraph:
    """All pairs whose endpoints hold the two smallest insertion times of their interval.

    The stack holds the right-to-left minima of the scanned prefix. Popped
    vertices see ``y`` directly; the surviving top also does.
    """
    tau = perm.tau
    stack: list[int] = []
    edges = []
    for y in range(1, perm.n + 1):
        ty = tau[y - 1]
        while stack and tau[stack[-1] - 1] > ty:
            edges.append((stack.pop(), y))
        if stack:
            edges.append((stack[-1], y))
        stack.append(y)
    return _finalize(perm, edges)


def load_graph(path) -> GrownGraph:
    """Read the ``construct --out`` JSON format back into a graph."""
    data = json.loads(Path(path).read_text())
    perm = Permutation.from_tau(data["tau"])
    if int(data["n"]) != perm.n:
        raise ValueError("n does not match the length of tau")
    edges = [(int(x), int(y)) for x, y in data["edges"]]
    for x, y in edges:
        if not 1 <= x < y <= perm.n:
            raise ValueError(f"bad edge [{x}, {y}]: need 1 <= x < y <= n")
    return _finalize(perm, edges)


def has_edge(perm: Permutation, x: int, y: int) -> bool:
    """Edge test straight from insertion times, in O(y - x)."""
    if not x < y:
        raise ValueError("has_edge requires x < y")
    if x < 1 or y > perm.n:
        raise ValueError("vertex out of range")
    tau = perm.tau
    top = max(tau[x - 1], tau[y - 1])
    return all(tau[z - 1] > top for z in range(x + 1, y))


def next_smaller_right(perm: Permutation, x: int) -> Optional[int]:
    """Least ``y > x`` inserted before ``x``, or None."""
    tau = perm.tau
    tx = tau[x - 1]
    for y in range(x + 1, perm.n + 1):
        if tau[y - 1] < tx:
            return y
    return None


def prev_smaller_left(perm: Permutation, x: int) -> Optional[int]:
    """Greatest ``y < x`` inserted before ``x``, or None."""
    tau = perm.tau
    tx = tau[x - 1]
    for y in range(x - 1, 0, -1):
        if tau[y - 1] < tx:
            return y
    return None


def _argmin_time(perm: Permutation, lo: int, hi: int) -> int:
    tau = perm.tau
    return min(range(lo, hi + 1), key=lambda z: tau[z - 1])


def rightmost_right_neighbor(graph: GrownGraph, x: int) -> Optional[int]:
    """Largest right-neighbor of ``x``, derived from insertion times alone.

    This is ``next_smaller_right(x)`` when it exists, otherwise the earliest
    inserted vertex to the right of ``x``. The adjacency lists are not read,
    so comparing against them is a genuine check.
    """
    perm = graph.source_perm
    if x == perm.n:
        return None
    r = next_smaller_right(perm, x)
    if r is not None:
        return r
    return _argmin_time(perm, x + 1, perm.n)


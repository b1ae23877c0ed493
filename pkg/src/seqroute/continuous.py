"""Sequential K-nearest-neighbor growth on the unit circle or interval.

Points are indexed 0..n-1 in insertion order. Each new point links to its
``min(K, i)`` nearest already-inserted points; the circle has circumference 1.
Greedy routing here can fail: a walk is *stuck* when no neighbor is strictly
closer to the target than the current point.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from sortedcontainers import SortedList

from seqroute.rng import DEFAULT_SEED, stream

log = logging.getLogger(__name__)

Topology = Literal["circle", "interval"]

SWEEP_COLUMNS = (
    "n", "k", "topology", "instances", "pairs",
    "success_rate", "mean_steps_reached", "p95_steps", "steps_per_ln_n",
)


def distance(a: float, b: float, topology: Topology) -> float:
    d = abs(a - b)
    if topology == "circle":
        return min(d, 1.0 - d)
    return d


@dataclass(frozen=True)
class ContinuousInstance:
    topology: str
    points: tuple[float, ...]
    K: int
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.points)

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j}


def _nearest_inserted(index: SortedList, p: float, k: int, topology: Topology) -> list[int]:
    """Indices of the ``k`` inserted points nearest ``p``; ties go to the smaller index.

    Scans outward from ``p``'s position in the coordinate order, always
    taking the closer of the next left and next right candidate. Rounding can
    make points further along the scan exactly as far as the k-th one, so the
    scan continues through such ties before the final (distance, index) cut.
    """
    m = len(index)
    k = min(k, m)
    if k == 0:
        return []
    pos = index.bisect_left((p, -1))
    circle = topology == "circle"
    left, right = pos - 1, pos
    found: list[tuple[float, int]] = []
    while len(found) < m:
        cand = []
        if circle or left >= 0:
            q, j = index[left % m]
            cand.append((distance(p, q, topology), j, "L"))
        if circle or right < m:
            q, j = index[right % m]
            cand.append((distance(p, q, topology), j, "R"))
        d, j, side = min(cand)
        if len(found) >= k and d > found[k - 1][0]:
            break
        found.append((d, j))
        if side == "L":
            left -= 1
        else:
            right += 1
    found.sort()
    return [j for _, j in found[:k]]


def from_points(points: Sequence[float], K: int, topology: Topology = "interval") -> ContinuousInstance:
    """Grow the K-NN graph over ``points`` taken in the given insertion order."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if topology not in ("circle", "interval"):
        raise ValueError(f"unknown topology {topology!r}")
    pts: list[float] = []
    index = SortedList()
    adj: list[set[int]] = []
    for i, p in enumerate(points):
        p = float(p)
        if topology == "circle":
            p %= 1.0
        while _occupied(index, p):
            bumped = float(np.nextafter(p, math.inf))
            log.warning("duplicate coordinate %r at point %d; perturbed to %r", p, i, bumped)
            p = bumped
        adj.append(set())
        for j in _nearest_inserted(index, p, K, topology):
            adj[i].add(j)
            adj[j].add(i)
        pts.append(p)
        index.add((p, i))
    return ContinuousInstance(topology, tuple(pts), K, tuple(tuple(sorted(a)) for a in adj))


def _occupied(index: SortedList, p: float) -> bool:
    pos = index.bisect_left((p, -1))
    return pos < len(index) and index[pos][0] == p


def grow_continuous(n: int, K: int, topology: Topology = "circle", rng=None) -> ContinuousInstance:
    """Draw ``n`` i.i.d. uniform points in [0, 1) and grow the K-NN graph."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return from_points(rng.random(n).tolist(), K, topology)


@dataclass(frozen=True)
class ContinuousTrace:
    s_index: int
    t_index: int
    path: tuple[int, ...]
    status: str

    @property
    def steps(self) -> int:
        return len(self.path) - 1


def default_step_cap(n: int) -> int:
    return 50 * max(1, math.ceil(math.log(max(n, 2))))


def greedy_walk_continuous(instance: ContinuousInstance, s_index: int, t_index: int,
                           step_cap: Optional[int] = None) -> ContinuousTrace:
    """Move to the neighbor nearest the target while that strictly improves the distance."""
    if s_index == t_index:
        raise ValueError("s and t must differ")
    if step_cap is None:
        step_cap = default_step_cap(instance.n)
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    pts, topo = instance.points, instance.topology
    target = pts[t_index]
    x = s_index
    path = [x]
    for _ in range(step_cap):
        if x == t_index:
            return ContinuousTrace(s_index, t_index, tuple(path), "reached")
        here = distance(pts[x], target, topo)
        best = min(instance.adjacency[x], key=lambda j: (distance(pts[j], target, topo), j), default=None)
        if best is None or distance(pts[best], target, topo) >= here:
            return ContinuousTrace(s_index, t_index, tuple(path), "stuck")
        x = best
        path.append(x)
    status = "reached" if x == t_index else "loop_capped"
    return ContinuousTrace(s_index, t_index, tuple(path), status)


def _sweep_instance(args) -> list[tuple[int, bool, int]]:
    """Per K: (K, reached?, steps) for each sampled pair on one point set."""
    n, K_list, topology, pairs, seed, instance = args
    points = stream(seed, n, instance, 0).random(n).tolist()
    pair_rng = stream(seed, n, instance, 1)
    st = [tuple(pair_rng.choice(n, size=2, replace=False).tolist()) for _ in range(pairs)]
    out = []
    for K in K_list:
        inst = from_points(points, K, topology)
        for s, t in st:
            tr = greedy_walk_continuous(inst, s, t)
            out.append((K, tr.status == "reached", tr.steps))
    return out


def conjecture_sweep(n_list: Sequence[int], K_list: Sequence[int], pairs_per_instance: int,
                     instances: int, seed: int = DEFAULT_SEED, topology: Topology = "circle",
                     workers: int = 1) -> list[dict]:
    """Greedy success rate and step statistics over random instances and pairs.

    Point sets and pairs depend on ``(seed, n, instance)`` only, so every K
    sees the same points and the same endpoint pairs.
    """
    if pairs_per_instance < 1 or instances < 1:
        raise ValueError("pairs and instances must be >= 1")
    rows = []
    for n in n_list:
        if n < 2:
            raise ValueError("routing needs n >= 2")
        tasks = [(n, list(K_list), topology, pairs_per_instance, seed, i) for i in range(instances)]
        if workers <= 1 or instances == 1:
            results = [_sweep_instance(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_sweep_instance, tasks))
        flat = [r for part in results for r in part]
        for K in K_list:
            ok = [steps for k, reached, steps in flat if k == K and reached]
            total = instances * pairs_per_instance
            mean = float(np.mean(ok)) if ok else math.nan
            rows.append({
                "n": n, "k": K, "topology": topology, "instances": instances,
                "pairs": pairs_per_instance, "success_rate": len(ok) / total,
                "mean_steps_reached": mean,
                "p95_steps": float(np.percentile(ok, 95)) if ok else math.nan,
                "steps_per_ln_n": mean / math.log(n),
            })
    return rows

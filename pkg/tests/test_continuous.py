import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqroute.continuous import (
    SWEEP_COLUMNS,
    conjecture_sweep,
    default_step_cap,
    distance,
    from_points,
    greedy_walk_continuous,
    grow_continuous,
)

unit = st.floats(0, 1, exclude_max=True, allow_nan=False)
point_lists = st.lists(unit, min_size=2, max_size=40, unique=True)


def brute_knn_edges(points, K, topology):
    def d(a, b):
        x = abs(a - b)
        return min(x, 1 - x) if topology == "circle" else x

    edges = set()
    for i in range(1, len(points)):
        prior = sorted(range(i), key=lambda j: (d(points[i], points[j]), j))
        edges |= {(j, i) for j in prior[:K]}
    return edges


def test_distance():
    assert distance(0.1, 0.9, "interval") == pytest.approx(0.8)
    assert distance(0.1, 0.9, "circle") == pytest.approx(0.2)


def test_hand_example_reaches():
    inst = from_points([0.0, 0.4, 0.55], 1, "interval")
    assert inst.edges() == {(0, 1), (1, 2)}
    tr = greedy_walk_continuous(inst, 0, 2)
    assert tr.status == "reached" and tr.path == (0, 1, 2) and tr.steps == 2


def test_hand_example_stuck():
    # 0.45 attaches to 0.0, so from 0.45 the only neighbor moves away from 1.0.
    inst = from_points([0.0, 1.0, 0.45], 1, "interval")
    assert inst.edges() == {(0, 1), (0, 2)}
    tr = greedy_walk_continuous(inst, 2, 1)
    assert tr.status == "stuck" and tr.path == (2,)


def test_first_point_has_no_links():
    inst = from_points([0.3], 4, "circle")
    assert inst.adjacency == ((),)


@settings(max_examples=60)
@given(point_lists, st.integers(1, 6), st.sampled_from(["circle", "interval"]))
def test_matches_brute_force(points, K, topology):
    inst = from_points(points, K, topology)
    assert inst.edges() == brute_knn_edges(points, K, topology)


@given(point_lists, st.sampled_from(["circle", "interval"]))
def test_K1_is_a_tree(points, topology):
    inst = from_points(points, 1, topology)
    assert len(inst.edges()) == len(points) - 1


@given(point_lists, st.integers(1, 6), st.sampled_from(["circle", "interval"]))
def test_K_nesting(points, K, topology):
    assert from_points(points, K, topology).edges() <= from_points(points, K + 1, topology).edges()


@given(st.lists(st.integers(0, 2**20 - 1), min_size=2, max_size=40, unique=True), st.integers(1, 5))
def test_circle_rotation_invariance(ints, K):
    # Dyadic coordinates make the rotation exact in floating point.
    pts = [i / 2**20 for i in ints]
    rotated = [(p + 0.25) % 1.0 for p in pts]
    a, b = from_points(pts, K, "circle"), from_points(rotated, K, "circle")
    assert a.edges() == b.edges()


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(1, 8), st.integers(0, 2**31))
def test_walk_makes_strict_progress(n, K, seed):
    inst = grow_continuous(n, K, "circle", seed)
    rng = np.random.default_rng(seed)
    s, t = rng.choice(n, size=2, replace=False).tolist()
    tr = greedy_walk_continuous(inst, s, t)
    d = [distance(inst.points[x], inst.points[t], "circle") for x in tr.path]
    assert all(a > b for a, b in zip(d, d[1:]))
    assert (tr.status == "reached") == (tr.path[-1] == t)
    assert tr.status in ("reached", "stuck")
    for a, b in zip(tr.path, tr.path[1:]):
        assert b in inst.adjacency[a]


def test_duplicates_are_perturbed(caplog):
    with caplog.at_level(logging.WARNING):
        inst = from_points([0.5, 0.5, 0.5], 2, "interval")
    assert len(set(inst.points)) == 3
    assert "duplicate coordinate" in caplog.text
    assert inst.edges() == {(0, 1), (0, 2), (1, 2)}


def test_circle_wraps_coordinates():
    inst = from_points([1.25, 0.5], 1, "circle")
    assert inst.points == (0.25, 0.5)


def test_validation():
    with pytest.raises(ValueError):
        from_points([0.1], 0)
    with pytest.raises(ValueError):
        from_points([0.1], 1, "torus")
    inst = from_points([0.1, 0.2], 1)
    with pytest.raises(ValueError):
        greedy_walk_continuous(inst, 0, 0)
    with pytest.raises(ValueError):
        conjecture_sweep([1], [1], 5, 1)


def test_step_cap():
    assert default_step_cap(10**4) == 50 * 10
    inst = from_points([0.0, 0.25, 0.5, 0.75], 1, "interval")
    assert greedy_walk_continuous(inst, 0, 3, step_cap=1).status == "loop_capped"


def test_sweep_n2():
    (row,) = conjecture_sweep([2], [1], 20, 3, seed=1)
    assert tuple(row) == SWEEP_COLUMNS
    assert row["success_rate"] == 1 and row["mean_steps_reached"] == 1
    assert row["steps_per_ln_n"] == pytest.approx(1 / math.log(2))


def test_sweep_deterministic_and_worker_free():
    a = conjecture_sweep([200], [1, 4], 50, 4, seed=3, workers=1)
    b = conjecture_sweep([200], [1, 4], 50, 4, seed=3, workers=2)
    assert a == b
    assert a != conjecture_sweep([200], [1, 4], 50, 4, seed=4)


def test_sweep_same_points_for_every_K():
    both = conjecture_sweep([150], [2, 5], 40, 2, seed=9)
    alone = conjecture_sweep([150], [5], 40, 2, seed=9)
    assert both[1] == alone[0]

"""Greedy routing on sequentially grown 1D nearest-neighbor graphs.

The step count of the greedy walk equals ``L + R - 2``, where ``L`` and ``R``
count left-to-right and right-to-left minima of the insertion-time
permutation. This package builds the graphs, runs the walks, evaluates the
closed-form moments and tail bounds, and drives the Monte Carlo experiments.
"""

__version__ = "0.1.0"

from seqroute.permutation import (
    Permutation,
    RecordStats,
    parse_tau,
    random_permutation,
    record_indicator_simulation,
    record_stats,
)
from seqroute.graph import (
    GrownGraph,
    build_by_criterion,
    build_incremental,
    has_edge,
    next_smaller_right,
    prev_smaller_left,
    rightmost_right_neighbor,
)
from seqroute.routing import GreedyTrace, greedy_step, greedy_walk, steps_via_records

__all__ = [
    "Permutation",
    "RecordStats",
    "parse_tau",
    "random_permutation",
    "record_indicator_simulation",
    "record_stats",
    "GrownGraph",
    "build_by_criterion",
    "build_incremental",
    "has_edge",
    "next_smaller_right",
    "prev_smaller_left",
    "rightmost_right_neighbor",
    "GreedyTrace",
    "greedy_step",
    "greedy_walk",
    "steps_via_records",
    "__version__",
]

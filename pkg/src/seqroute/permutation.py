"""Insertion-order permutations and their record (running-minimum) statistics.

Vertices and times are 1-indexed at every interface. ``pi[t - 1]`` is the
vertex inserted at time ``t`` and ``tau[x - 1]`` is the insertion time of
vertex ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from seqroute.rng import as_generator


class PermutationError(ValueError):
    """Raised when a sequence is not a bijection of {1..n}."""


@dataclass(frozen=True)
class Permutation:
    n: int
    pi: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise PermutationError("n must be >= 1")
        if len(self.pi) != self.n or len(self.tau) != self.n:
            raise PermutationError("pi and tau must both have length n")
        for t, x in enumerate(self.pi, start=1):
            if not 1 <= x <= self.n or self.tau[x - 1] != t:
                raise PermutationError("pi and tau are not mutually inverse bijections")

    @classmethod
    def from_tau(cls, tau: Iterable[int]) -> Permutation:
        tau = tuple(int(v) for v in tau)
        _check_bijection(tau)
        pi = [0] * len(tau)
        for x, t in enumerate(tau, start=1):
            pi[t - 1] = x
        return cls(len(tau), tuple(pi), tau)

    @classmethod
    def from_pi(cls, pi: Iterable[int]) -> Permutation:
        pi = tuple(int(v) for v in pi)
        _check_bijection(pi)
        tau = [0] * len(pi)
        for t, x in enumerate(pi, start=1):
            tau[x - 1] = t
        return cls(len(pi), pi, tuple(tau))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        ident = tuple(range(1, n + 1))
        return cls(n, ident, ident)

    def time(self, x: int) -> int:
        """Insertion time of vertex ``x``."""
        return self.tau[x - 1]

    def reversed(self) -> Permutation:
        """Same insertion times on the mirrored axis ``x -> n + 1 - x``."""
        return Permutation.from_tau(self.tau[::-1])

    def __len__(self) -> int:
        return self.n


def _check_bijection(values: Sequence[int]) -> None:
    n = len(values)
    if n == 0:
        raise PermutationError("empty permutation")
    for v in values:
        if not 1 <= v <= n:
            raise PermutationError(f"value {v} outside 1..{n}")
    counts = np.bincount(np.asarray(values), minlength=n + 1)
    dup = np.flatnonzero(counts > 1)
    if dup.size:
        missing = np.flatnonzero(counts[1:] == 0) + 1
        raise PermutationError(
            f"not a bijection: duplicate value {dup[0]}, missing value {missing[0]}"
        )


def parse_tau(text: str) -> Permutation:
    """Parse comma-separated insertion times listed by vertex 1..n."""
    parts = [p.strip() for p in text.strip().split(",")]
    if not parts or parts == [""]:
        raise PermutationError("empty tau list")
    try:
        values = [int(p) for p in parts]
    except ValueError as exc:
        raise PermutationError(f"non-integer entry in tau list: {exc}") from None
    return Permutation.from_tau(values)


def random_permutation(n: int, rng=None) -> Permutation:
    """Uniform insertion order: an unbiased shuffle of 1..n."""
    if n < 1:
        raise PermutationError("n must be >= 1")
    pi = as_generator(rng).permutation(n) + 1
    return Permutation.from_pi(pi.tolist())


@dataclass(frozen=True)
class RecordStats:
    window: tuple[int, int]
    ltr_positions: tuple[int, ...]
    rtl_positions: tuple[int, ...]
    m: int

    @property
    def L(self) -> int:
        return len(self.ltr_positions)

    @property
    def R(self) -> int:
        return len(self.rtl_positions)


def record_stats(perm: Permutation, window: tuple[int, int] | None = None) -> RecordStats:
    """LTR and RTL minima of ``tau`` restricted to the inclusive vertex window."""
    lo, hi = window if window is not None else (1, perm.n)
    if not 1 <= lo <= hi <= perm.n:
        raise ValueError(f"invalid window ({lo}, {hi}) for n={perm.n}")
    tau = perm.tau

    ltr = []
    best = perm.n + 1
    for x in range(lo, hi + 1):
        if tau[x - 1] < best:
            best = tau[x - 1]
            ltr.append(x)

    rtl = []
    best = perm.n + 1
    for x in range(hi, lo - 1, -1):
        if tau[x - 1] < best:
            best = tau[x - 1]
            rtl.append(x)
    rtl.reverse()

    return RecordStats((lo, hi), tuple(ltr), tuple(rtl), ltr[-1])


def record_indicator_simulation(n: int, rng=None) -> int:
    """Draw ``sum I_i`` with independent ``I_i ~ Bernoulli(1/i)``.

    Same law as the number of LTR minima of a uniform permutation of size n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = as_generator(rng).random(n)
    return int(np.count_nonzero(u * np.arange(1, n + 1) < 1.0))


def record_counts(tau_rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (L, R) for each row of a 2D array of distinct values."""
    tau_rows = np.atleast_2d(tau_rows)
    ltr = tau_rows == np.minimum.accumulate(tau_rows, axis=1)
    rev = tau_rows[:, ::-1]
    rtl = rev == np.minimum.accumulate(rev, axis=1)
    return ltr.sum(axis=1), rtl.sum(axis=1)

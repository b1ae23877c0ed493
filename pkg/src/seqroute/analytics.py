"""Closed-form moments and tail bounds for the greedy step count.

All logarithms are natural. Functions taking ``exact=True`` return
:class:`fractions.Fraction` values for zero-tolerance comparisons against
exhaustive enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

EULER_GAMMA = 0.57721566490153286060651209

Direction = Literal["upper", "lower"]


def harmonic(n: int, exact: bool = False):
    """``H_n = sum_{i<=n} 1/i``; correctly rounded float unless ``exact``."""
    if n < 1:
        raise ValueError("harmonic number needs n >= 1")
    if exact:
        return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))
    return math.fsum(1.0 / i for i in range(1, n + 1))


def harmonic2(n: int, exact: bool = False):
    """``sum_{i<=n} 1/i^2``."""
    if n < 1:
        raise ValueError("harmonic number needs n >= 1")
    if exact:
        return sum((Fraction(1, i * i) for i in range(1, n + 1)), Fraction(0))
    return math.fsum(1.0 / (i * i) for i in range(1, n + 1))


def expected_steps(n: int, exact: bool = False):
    """``E[S_n] = 2 H_n - 2``."""
    return 2 * harmonic(n, exact) - 2


def record_variance(n: int, exact: bool = False):
    """``Var(L_n) = H_n - sum 1/i^2``."""
    return harmonic(n, exact) - harmonic2(n, exact)


@dataclass(frozen=True)
class MomentSummary:
    n: int
    H_n: float
    H2_n: float
    expected_steps: float
    record_variance: float
    euler_gamma: float = EULER_GAMMA

    @property
    def asymptotic_expected_steps(self) -> float:
        """``2 ln n + 2 gamma - 2``, the o(1)-free display value."""
        return 2 * math.log(self.n) + 2 * self.euler_gamma - 2


def moment_summary(n: int) -> MomentSummary:
    h, h2 = harmonic(n), harmonic2(n)
    return MomentSummary(n, h, h2, 2 * h - 2, h - h2)


def bennett_h(u: float) -> float:
    """``(1+u) ln(1+u) - u`` for ``u > -1``, else ``inf``."""
    if u <= -1:
        return math.inf
    return (1 + u) * math.log1p(u) - u


@dataclass(frozen=True)
class TailBound:
    n: int
    t: float
    direction: str
    bound: float
    rate_argument: float
    rate_value: float
    degenerate: bool = False


def finite_tail_bound(n: int, t: float, direction: Direction = "upper") -> TailBound:
    """Bennett/union bound on ``P(S_n >= 2H_n - 2 + t)`` (upper) or ``P(S_n <= 2H_n - 2 - t)``.

    Value is ``min(1, 2 exp(-sigma^2 h(+-t / (2 sigma^2))))`` with
    ``sigma^2 = Var(L_n)``. In the lower direction a rate argument of 1 or
    more puts the threshold below the support of ``L_n``; the bound is then
    reported as 0 with ``degenerate=True``. Non-positive ``t`` gives the
    trivial bound 1.
    """
    if n < 2:
        raise ValueError("tail bound needs n >= 2")
    if direction not in ("upper", "lower"):
        raise ValueError(f"unknown direction {direction!r}")
    var = record_variance(n)
    u = t / (2 * var)
    if t <= 0:
        return TailBound(n, t, direction, 1.0, u, 0.0)
    if direction == "upper":
        rate = bennett_h(u)
    else:
        if u >= 1:
            return TailBound(n, t, direction, 0.0, u, math.inf, degenerate=True)
        rate = bennett_h(-u)
    return TailBound(n, t, direction, min(1.0, 2 * math.exp(-var * rate)), u, rate)


def asymptotic_exponent(c: float, direction: Direction = "upper") -> float:
    """Exponent ``h(c/2)`` (upper) or ``h(-c/2)`` (lower) of the n^-exponent tail curve."""
    if direction == "upper":
        if c < 0:
            raise ValueError("upper tail needs c >= 0")
        return bennett_h(c / 2)
    if direction == "lower":
        if not 0 <= c < 2:
            raise ValueError("lower tail needs 0 <= c < 2")
        return bennett_h(-c / 2)
    raise ValueError(f"unknown direction {direction!r}")


def asymptotic_tail_bound(n: int, c: float, direction: Direction = "upper") -> float:
    """Reference curve ``n^{-h(+-c/2)}`` with the o(1) term dropped."""
    return n ** (-asymptotic_exponent(c, direction))


def triangular_distance_pmf(n: int, d: int, exact: bool = False):
    """``P(|s - t| = d)`` for a uniform pair of distinct endpoints."""
    if not 1 <= d <= n - 1:
        raise ValueError(f"distance must lie in 1..{n - 1}")
    if exact:
        return Fraction(2 * (n - d), n * (n - 1))
    return 2 * (n - d) / (n * (n - 1))


def random_pair_expected_steps(n: int, exact: bool = False):
    """Mean greedy steps for uniform distinct endpoints, in O(n).

    ``4/(n(n-1)) * sum_{d=1}^{n-1} (n-d) H_{d+1} - 2``.
    """
    if n < 2:
        raise ValueError("random pairs need n >= 2")
    if exact:
        h = Fraction(1)
        total = Fraction(0)
        for d in range(1, n):
            h += Fraction(1, d + 1)
            total += (n - d) * h
        return Fraction(4, n * (n - 1)) * total - 2
    # Kahan-compensated running H_{d+1}; the weighted terms go through fsum.
    h, comp = 1.0, 0.0
    parts = []
    for d in range(1, n):
        y = 1.0 / (d + 1) - comp
        total = h + y
        comp = (total - h) - y
        h = total
        parts.append((n - d) * h)
    return 4.0 / (n * (n - 1)) * math.fsum(parts) - 2.0

"""Closed-form thresholds for many parties or settings, and the noisy-regime
``x_min`` check.

For prime ``m`` a zero-slope (``S = 0``) regular arrangement has at most
``n + m - 2`` plus-outcomes in total; spreading them as evenly as possible
gives the binding flat line ``y <= y_max``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .core import ScenarioError, is_prime
from .strategies import DEFAULT_BUDGET, collect_lines

__all__ = [
    "PartitionBound",
    "ConjectureReport",
    "partition_bound",
    "ymax_partition",
    "eta_star_noiseless",
    "eta_star_even_split",
    "noisy_ymax",
    "candidate_lines",
    "check_conjecture",
    "eta_star_noisy_asymptotic",
]


@dataclass(frozen=True)
class PartitionBound:
    n: int
    m: int
    counts: tuple[int, ...]  # descending, sums to n + m - 2
    y_max: Fraction
    m_prime: bool


def partition_bound(n: int, m: int) -> PartitionBound:
    total = n + m - 2
    if total < n:
        raise ScenarioError(f"cannot split {total} plus-outcomes over {n} parties with each >= 1")
    k, r = divmod(total, n)
    counts = (k + 1,) * r + (k,) * (n - r)
    prime = is_prime(m)
    if not prime:
        warnings.warn(f"m={m} is composite; the even-split bound assumes prime m", stacklevel=3)
    return PartitionBound(n, m, counts, sum(Fraction(1, c) for c in counts), prime)


def ymax_partition(n: int, m: int) -> Fraction:
    return partition_bound(n, m).y_max


def eta_star_noiseless(n: int, m: int) -> Fraction:
    """Pure-state threshold ``2n / (m * y_max)`` from the exact even split."""
    return Fraction(2 * n) / (m * ymax_partition(n, m))


def eta_star_even_split(n: int, m: int) -> Fraction:
    """``2/n + 2/m - 4/(mn)``; equals :func:`eta_star_noiseless` when ``n`` divides ``m - 2``."""
    return Fraction(2, n) + Fraction(2, m) - Fraction(4, m * n)


def noisy_ymax(n: int, m: int) -> Fraction:
    """Flat-line height ``n + 1 - m/2`` for ``n >= m``: ``m - 2`` parties with two plus-outcomes."""
    if n < m:
        raise ScenarioError(f"noisy_ymax needs n >= m (got n={n}, m={m})")
    return n + 1 - Fraction(m, 2)


def candidate_lines(n: int, m: int) -> tuple[Fraction, Fraction]:
    """Abscissae where the two candidate lines reach ``noisy_ymax``.

    (i) everyone outputs +1 always: ``p = n/m``, ``q = 1/m``;
    (ii) ``m`` parties play ``{0, 1}`` and the rest ``{0}``: ``p = n - m/2``, ``q = 2**(1-m)``.
    """
    y = noisy_ymax(n, m)
    return m * y - n, Fraction(2 ** (m - 1))


@dataclass(frozen=True)
class ConjectureReport:
    n: int
    m: int
    y_max: Fraction
    x1: Fraction
    x2: Fraction
    x_min: Fraction
    holds: bool  # x_min <= n*m
    achieved_by: str  # "(i)", "(ii)", "(i)+(ii)" or "other"
    mode: str
    witness: object = None

    @property
    def nm(self) -> int:
        return self.n * self.m


def check_conjecture(
    n: int,
    m: int,
    mode: str = "balanced",
    budget: int = DEFAULT_BUDGET,
) -> ConjectureReport:
    """Smallest ``x`` compatible with ``y = noisy_ymax`` over an enumerated line set.

    ``mode`` is ``balanced`` (balanced regular arrangements), ``regular`` (all
    regular arrangements) or ``exhaustive``.
    """
    y = noisy_ymax(n, m)
    if mode == "balanced":
        lines = collect_lines(n, m, "regular", budget=budget, balanced_only=True)
    elif mode in ("regular", "exhaustive"):
        lines = collect_lines(n, m, mode, budget=budget, balanced_only=False)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    x_min, witness = None, None
    for line in lines:
        if line.q == 0:
            if line.p < y:
                raise ScenarioError(f"flat line p={line.p} lies below y={y}")
            continue
        need = (y - line.p) / line.q
        if x_min is None or need > x_min:
            x_min, witness = need, line.provenance
    x1, x2 = candidate_lines(n, m)
    tags = [tag for tag, x in (("(i)", x1), ("(ii)", x2)) if x == x_min]
    return ConjectureReport(
        n=n, m=m, y_max=y, x1=x1, x2=x2, x_min=x_min,
        holds=x_min <= n * m,
        achieved_by="+".join(tags) if tags else "other",
        mode=mode,
        witness=witness,
    )


def eta_star_noisy_asymptotic(m: int, v: float) -> float:
    """``2 / (m v)``: the large-``n`` threshold when ``x_min`` stays below ``n m``."""
    if not 0 < v <= 1:
        raise ScenarioError("v must lie in (0, 1]")
    return 2 / (m * v)

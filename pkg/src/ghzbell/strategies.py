"""Zero-sum counting, constraint lines and strategy enumeration.

A strategy with per-party ``+1`` counts ``c_1..c_n`` (all >= 1) and zero-sum
count ``S`` keeps the local value non-positive iff ``y <= p + q*x`` with
``p = sum(1/c_k)`` and ``q = S / prod(c_k)``.

Two enumeration families are provided:

* every strategy (``enumerate_all``), exponential in ``n*m``;
* regular arrangements (``enumerate_regular``): all parties but the first play
  a prefix set ``{0, .., c-1}``, the first plays a cyclic interval starting at
  a shift ``i0``.

The ``*_line_table`` helpers compute the same line sets without materialising
strategy objects; they share convolution prefixes across the enumeration tree
and are what the envelope code uses at scale.
"""

from __future__ import annotations

import bisect
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .core import MAX_SETTINGS, DeterministicStrategy, ScenarioError

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "VacuousConstraint",
    "ConstraintLine",
    "RegularArrangement",
    "count_zero_sum_naive",
    "count_zero_sum_convolution",
    "line_from_strategy",
    "line_from_counts",
    "count_all",
    "count_regular",
    "enumerate_all",
    "enumerate_regular",
    "strategy_of",
    "exhaustive_line_table",
    "regular_line_table",
    "lines_from_table",
    "collect_lines",
]

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


class VacuousConstraint(ScenarioError):
    """A party never outputs +1, so the strategy constrains nothing."""


@dataclass(frozen=True)
class ConstraintLine:
    """``y <= p + q*x``."""

    p: Fraction
    q: Fraction
    provenance: Union[DeterministicStrategy, "RegularArrangement", str, None] = field(
        default=None, compare=False
    )

    @property
    def key(self) -> tuple[Fraction, Fraction]:
        return (self.p, self.q)

    def at(self, x: Fraction) -> Fraction:
        return self.p + self.q * x


@dataclass(frozen=True)
class RegularArrangement:
    """``counts[0]`` belongs to the shifted party; the rest are prefix sets."""

    counts: tuple[int, ...]
    shift: int = 0


def _supports(s: DeterministicStrategy) -> list[list[int]]:
    return [[i for i in range(s.m) if (mask >> i) & 1] for mask in s.masks]


def count_zero_sum_naive(s: DeterministicStrategy, m: int) -> int:
    """Count index tuples from the parties' ``+1`` sets whose sum is divisible by ``m``.

    Plain nested iteration; exponential in the number of parties.
    """
    if m != s.m:
        raise ScenarioError(f"strategy has width {s.m}, asked for m={m}")
    return sum(1 for idx in itertools.product(*_supports(s)) if sum(idx) % m == 0)


def _convolve_support(dist: list[int], support, m: int) -> list[int]:
    out = [0] * m
    for i in support:
        for k in range(m):
            out[(k + i) % m] += dist[k]
    return out


def count_zero_sum_convolution(s: DeterministicStrategy, m: int) -> int:
    """Same count as :func:`count_zero_sum_naive` via cyclic convolution over Z_m."""
    if m != s.m:
        raise ScenarioError(f"strategy has width {s.m}, asked for m={m}")
    dist = [1] + [0] * (m - 1)
    for support in _supports(s):
        dist = _convolve_support(dist, support, m)
    return dist[0]


def line_from_counts(counts, S: int, provenance=None) -> ConstraintLine:
    counts = tuple(counts)
    if any(c <= 0 for c in counts):
        raise VacuousConstraint("line undefined; constraint vacuous (a party has count 0)")
    total = math.prod(counts)
    p = Fraction(sum(total // c for c in counts), total)
    return ConstraintLine(p=p, q=Fraction(S, total), provenance=provenance)


def line_from_strategy(s: DeterministicStrategy, m: int) -> ConstraintLine:
    counts = s.counts
    if any(c == 0 for c in counts):
        raise VacuousConstraint("line undefined; constraint vacuous (a party has count 0)")
    return line_from_counts(counts, count_zero_sum_convolution(s, m), provenance=s)


# --- exhaustive enumeration -------------------------------------------------


def _lex_masks(m: int) -> list[int]:
    """Non-zero masks ordered by the bit string ``a_0 a_1 .. a_{m-1}``."""
    out = []
    for pattern in range(1, 1 << m):
        mask = 0
        for i in range(m):
            if (pattern >> (m - 1 - i)) & 1:
                mask |= 1 << i
        out.append(mask)
    return out


def count_all(n: int, m: int) -> int:
    return ((1 << m) - 1) ** n


def _check_budget(n: int, m: int, budget: int):
    if m > MAX_SETTINGS:
        raise ScenarioError(f"m > {MAX_SETTINGS} is not supported")
    total = count_all(n, m)
    if total > budget:
        raise BudgetExceeded(
            f"exhaustive enumeration needs {total} strategies (budget {budget}); "
            "use regular arrangements (mode=regular) instead"
        )


def enumerate_all(
    n: int,
    m: int,
    budget: int = DEFAULT_BUDGET,
    chunk: tuple[int, int] | None = None,
) -> Iterator[DeterministicStrategy]:
    """Every strategy whose parties all output +1 somewhere, in lexicographic order.

    ``chunk=(k, K)`` restricts the stream to the ``k``-th of ``K`` contiguous,
    disjoint slices of that order.
    """
    _check_budget(n, m, budget)
    masks = _lex_masks(m)
    base = len(masks)
    total = base**n
    start, stop = 0, total
    if chunk is not None:
        k, parts = chunk
        if not 0 <= k < parts:
            raise ValueError(f"chunk index {k} outside [0, {parts})")
        start, stop = total * k // parts, total * (k + 1) // parts
    digits = []
    rem = start
    for _ in range(n):
        rem, d = divmod(rem, base)
        digits.append(d)
    digits.reverse()
    for _ in range(stop - start):
        yield DeterministicStrategy(m=m, masks=tuple(masks[d] for d in digits))
        for pos in range(n - 1, -1, -1):
            digits[pos] += 1
            if digits[pos] < base:
                break
            digits[pos] = 0


def _exhaustive_subtree(n: int, m: int, first: int) -> dict:
    """Line table for the strategies whose first party plays mask ``first``."""
    masks = _lex_masks(m)
    supports = {mask: [i for i in range(m) if (mask >> i) & 1] for mask in masks}
    sizes = {mask: mask.bit_count() for mask in masks}
    table: dict = {}

    def descend(level, dist, chosen, counts):
        if level == n - 1:
            # zero-sum count for every last-party mask by adding one index at a time
            need = [dist[(-i) % m] for i in range(m)]
            S_of = [0] * (1 << m)
            for mask in range(1, 1 << m):
                low = (mask & -mask).bit_length() - 1
                S_of[mask] = S_of[mask & (mask - 1)] + need[low]
            merged = {}
            for c in range(1, m + 1):
                tmp = list(counts)
                bisect.insort(tmp, c)
                merged[c] = tuple(tmp)
            for mask in masks:
                key = (merged[sizes[mask]], S_of[mask])
                if key not in table:
                    table[key] = chosen + (mask,)
            return
        for mask in masks:
            tmp = list(counts)
            bisect.insort(tmp, sizes[mask])
            descend(
                level + 1,
                _convolve_support(dist, supports[mask], m),
                chosen + (mask,),
                tuple(tmp),
            )

    start = _convolve_support([1] + [0] * (m - 1), supports[first], m)
    if n == 1:
        return {((sizes[first],), start[0]): (first,)}
    descend(1, start, (first,), (sizes[first],))
    return table


def exhaustive_line_table(
    n: int, m: int, budget: int = DEFAULT_BUDGET, workers: int = 1
) -> dict[tuple[tuple[int, ...], int], DeterministicStrategy]:
    """Distinct ``(sorted counts, S)`` over all strategies, with the first witness.

    Work is split by the first party's mask; with ``workers > 1`` the subtrees
    run in separate processes and are merged in enumeration order.
    """
    _check_budget(n, m, budget)
    firsts = _lex_masks(m)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_exhaustive_subtree, [n] * len(firsts), [m] * len(firsts), firsts))
    else:
        parts = [_exhaustive_subtree(n, m, first) for first in firsts]
    table: dict = {}
    for part in parts:
        for key, masks in part.items():
            if key not in table:
                table[key] = DeterministicStrategy(m=m, masks=masks)
    return table


# --- regular arrangements ---------------------------------------------------


def _balanced_counts(n: int, total: int) -> tuple[int, ...]:
    k, r = divmod(total, n)
    return (k + 1,) * r + (k,) * (n - r)


def _balanced_patterns(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """One descending balanced count vector per total ``n .. n*m``.

    The shifted party holds a largest count.
    """
    for total in range(n, n * m + 1):
        yield _balanced_counts(n, total)


def _full_patterns(n: int, m: int) -> Iterator[tuple[int, ...]]:
    for alpha in range(1, m + 1):
        for rest in itertools.combinations_with_replacement(range(m, 0, -1), n - 1):
            yield (alpha,) + rest


def count_regular(n: int, m: int, balanced_only: bool) -> int:
    if balanced_only:
        patterns = n * m - n + 1
    else:
        patterns = m * math.comb(m + n - 2, n - 1)
    return patterns * m


def enumerate_regular(n: int, m: int, balanced_only: bool = True) -> Iterator[RegularArrangement]:
    """Regular arrangements, each count pattern with all ``m`` shifts of the first party.

    ``balanced_only`` keeps patterns whose counts differ by at most one.
    Otherwise the first party's count is free and the prefix parties' counts
    form a non-increasing sequence (prefix parties are interchangeable).
    """
    patterns = _balanced_patterns(n, m) if balanced_only else _full_patterns(n, m)
    for counts in patterns:
        for shift in range(m):
            yield RegularArrangement(counts=counts, shift=shift)


def strategy_of(r: RegularArrangement, n: int, m: int) -> DeterministicStrategy:
    if len(r.counts) != n:
        raise ScenarioError(f"arrangement has {len(r.counts)} counts, expected {n}")
    if any(not 1 <= c <= m for c in r.counts):
        raise ScenarioError(f"counts must lie in [1, {m}]")
    alpha = r.counts[0]
    first = 0
    for t in range(alpha):
        first |= 1 << ((r.shift + t) % m)
    masks = (first,) + tuple((1 << c) - 1 for c in r.counts[1:])
    return DeterministicStrategy(m=m, masks=masks)


def _prefix_step(dist: list[int], c: int, m: int) -> list[int]:
    """Convolve with the prefix set ``{0, .., c-1}`` using a sliding window."""
    if c == m:
        total = sum(dist)
        return [total] * m
    window = sum(dist[(-t) % m] for t in range(c))
    out = [0] * m
    for k in range(m):
        out[k] = window
        window += dist[(k + 1) % m] - dist[(k + 1 - c) % m]
    return out


def _shifted_sums(dist: list[int], m: int) -> list[list[int]]:
    """``S[alpha][i0]`` for the shifted party's cyclic interval against ``dist``."""
    need = [dist[(-t) % m] for t in range(m)]
    cum = [0]
    for t in range(2 * m):
        cum.append(cum[-1] + need[t % m])
    return [[cum[i0 + a] - cum[i0] for i0 in range(m)] for a in range(m + 1)]


def regular_line_table(
    n: int, m: int, balanced_only: bool = True, budget: int = DEFAULT_BUDGET
) -> dict[tuple[tuple[int, ...], int], RegularArrangement]:
    """Distinct ``(sorted counts, S)`` over regular arrangements, with a witness."""
    total = count_regular(n, m, balanced_only)
    if total > budget:
        raise BudgetExceeded(
            f"regular enumeration needs {total} arrangements (budget {budget}); "
            "use balanced_only or raise the budget"
        )
    unit = [1] + [0] * (m - 1)
    table: dict = {}

    def record(alpha, rest, sums):
        counts = tuple(sorted((alpha,) + rest))
        for shift, S in enumerate(sums[alpha]):
            key = (counts, S)
            if key not in table:
                table[key] = RegularArrangement(counts=(alpha,) + rest, shift=shift)

    if balanced_only:
        for counts in _balanced_patterns(n, m):
            dist = unit
            for c in counts[1:]:
                dist = _prefix_step(dist, c, m)
            record(counts[0], counts[1:], _shifted_sums(dist, m))
        return table

    # depth-first over non-increasing prefix counts, sharing partial convolutions
    leaves = []

    def descend(rest, dist, largest):
        if len(rest) == n - 1:
            leaves.append((rest, _shifted_sums(dist, m)))
            return
        for c in range(largest, 0, -1):
            descend(rest + (c,), _prefix_step(dist, c, m), c)

    descend((), unit, m)
    for alpha in range(1, m + 1):
        for rest, sums in leaves:
            record(alpha, rest, sums)
    return table


def lines_from_table(table: dict, m: int) -> list[ConstraintLine]:
    """Deduplicated lines, ordered by (p, q), each with one witness."""
    seen: dict = {}
    for (counts, S), witness in sorted(table.items(), key=lambda kv: kv[0]):
        line = line_from_counts(counts, S, provenance=witness)
        if line.key not in seen:
            seen[line.key] = line
    return [seen[k] for k in sorted(seen)]


def collect_lines(
    n: int,
    m: int,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    balanced_only: bool = False,
    workers: int = 1,
) -> list[ConstraintLine]:
    if mode == "exhaustive":
        table = exhaustive_line_table(n, m, budget=budget, workers=workers)
    elif mode == "regular":
        table = regular_line_table(n, m, balanced_only=balanced_only, budget=budget)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return lines_from_table(table, m)

"""Scenario validation, strategy/parameter value types and the local side of
the Bell functional.

All constraint-side quantities are :class:`fractions.Fraction`.  A local
deterministic strategy is stored as one bit mask per party: bit ``i`` of a
party's mask is set iff that party outputs +1 for setting ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Sequence

__all__ = [
    "ScenarioError",
    "Scenario",
    "DeterministicStrategy",
    "BellParams",
    "is_prime",
    "as_fraction",
    "validate_scenario",
    "bell_value_deterministic",
    "bell_value_expanded",
]

MAX_SETTINGS = 64


class ScenarioError(ValueError):
    """Invalid scenario, strategy or parameter input."""


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    for d in range(2, math.isqrt(k) + 1):
        if k % d == 0:
            return False
    return True


def as_fraction(value) -> Fraction:
    """Exact conversion; strings like ``"0.85"`` or ``"17/20"`` are accepted."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Real):
        # floats go through their shortest repr so 0.85 means 17/20
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot convert {value!r} to a rational")


@dataclass(frozen=True)
class Scenario:
    n: int
    m: int
    v: Fraction = Fraction(1)
    m_prime: bool = False

    @property
    def v_float(self) -> float:
        return float(self.v)


def validate_scenario(n: int, m: int, v=1) -> Scenario:
    if not isinstance(n, int) or n < 2:
        raise ScenarioError(f"n < 2 (got n={n!r})")
    if not isinstance(m, int) or m < 2:
        raise ScenarioError(f"m < 2 (got m={m!r})")
    fv = as_fraction(v)
    if not 0 <= fv <= 1:
        raise ScenarioError(f"v outside [0, 1] (got v={v!r})")
    return Scenario(n=n, m=m, v=fv, m_prime=is_prime(m))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per-party ``+1`` sets as bit masks of width ``m``."""

    m: int
    masks: tuple[int, ...]

    def __post_init__(self):
        if not 2 <= self.m <= MAX_SETTINGS:
            raise ScenarioError(f"m must lie in [2, {MAX_SETTINGS}] (got {self.m})")
        full = (1 << self.m) - 1
        for mask in self.masks:
            if mask < 0 or mask & ~full:
                raise ScenarioError(f"mask {mask:#x} does not fit in {self.m} settings")

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[int]]) -> "DeterministicStrategy":
        vectors = [tuple(vec) for vec in vectors]
        if not vectors:
            raise ScenarioError("strategy needs at least one party")
        m = len(vectors[0])
        masks = []
        for vec in vectors:
            if len(vec) != m:
                raise ScenarioError("all indicator vectors must have the same length")
            if any(bit not in (0, 1) for bit in vec):
                raise ScenarioError("indicator entries must be 0 or 1")
            masks.append(sum(1 << i for i, bit in enumerate(vec) if bit))
        return cls(m=m, masks=tuple(masks))

    @property
    def n(self) -> int:
        return len(self.masks)

    @property
    def vectors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple((mask >> i) & 1 for i in range(self.m)) for mask in self.masks)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(mask.bit_count() for mask in self.masks)

    def support(self, party: int) -> tuple[int, ...]:
        mask = self.masks[party]
        return tuple(i for i in range(self.m) if (mask >> i) & 1)

    def __str__(self):
        return " ".join("".join(map(str, vec)) for vec in self.vectors)


@dataclass(frozen=True)
class BellParams:
    """One member ``(x, y)`` of the inequality family for ``n`` parties, ``m`` settings."""

    x: Fraction
    y: Fraction
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))
        object.__setattr__(self, "y", as_fraction(self.y))


def _check_dims(s: DeterministicStrategy, params: BellParams):
    if s.n != params.n or s.m != params.m:
        raise ScenarioError(
            f"strategy is ({s.n} parties, {s.m} settings) but params are "
            f"({params.n}, {params.m})"
        )


def bell_value_deterministic(s: DeterministicStrategy, params: BellParams) -> Fraction:
    """Local value of the functional: ``prod(counts)*y - S*x - sum_k prod_{j!=k} counts``."""
    from .strategies import count_zero_sum_convolution

    _check_dims(s, params)
    counts = s.counts
    total = math.prod(counts)
    marginals = sum(math.prod(counts[:k] + counts[k + 1:]) for k in range(len(counts)))
    S = count_zero_sum_convolution(s, s.m)
    return total * params.y - S * params.x - marginals


def bell_value_expanded(s: DeterministicStrategy, params: BellParams) -> Fraction:
    """Term-by-term expansion of the local functional over every setting tuple.

    Exponential in ``n``; kept as the reference for :func:`bell_value_deterministic`.
    """
    import itertools

    _check_dims(s, params)
    n, m = s.n, s.m
    vecs = s.vectors
    value = Fraction(0)
    for idx in itertools.product(range(m), repeat=n):
        if all(vecs[k][i] for k, i in enumerate(idx)):
            value += params.y - (params.x if sum(idx) % m == 0 else 0)
    for omit in range(n):
        rest = [vecs[k] for k in range(n) if k != omit]
        for idx in itertools.product(range(m), repeat=n - 1):
            if all(vec[i] for vec, i in zip(rest, idx)):
                value -= 1
    return value

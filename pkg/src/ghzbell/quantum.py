"""Noisy GHZ state under equatorial measurements with lossy detectors.

Closed forms are the source of truth; the dense density-matrix routines
(``*_dense``) rebuild the same probabilities from the state and projectors
and exist only to check them.  Non-detections are mapped to outcome -1, so
a ``k``-party all-plus probability is scaled by ``eta**k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import BellParams, Scenario, ScenarioError
from .envelope import NoViolation

__all__ = [
    "DENSE_MAX_PARTIES",
    "MeasurementAngles",
    "ghz_density",
    "joint_probability",
    "joint_probability_dense",
    "outcome_probability_dense",
    "marginal_probability",
    "marginal_probability_dense",
    "bell_value_quantum",
    "threshold_from_oracle",
    "threshold_closed_form",
    "reference_visibility_bounds",
]

DENSE_MAX_PARTIES = 8
DIRECT_BUDGET = 10**6


@dataclass(frozen=True)
class MeasurementAngles:
    """Azimuths ``phi[party][setting]`` of ``cos(phi) X + sin(phi) Y``."""

    phi: tuple[tuple[float, ...], ...]

    @classmethod
    def default(cls, n: int, m: int, offset: float | None = None) -> "MeasurementAngles":
        # offsets summing to pi over the parties flip the sign of the cosine
        off = math.pi / n if offset is None else offset
        row = tuple(2 * math.pi * i / m + off for i in range(m))
        return cls(phi=(row,) * n)

    @property
    def n(self) -> int:
        return len(self.phi)


def _check_settings(scenario: Scenario, settings: Sequence[int], size: int):
    if len(settings) != size:
        raise ScenarioError(f"expected {size} settings, got {len(settings)}")
    if any(not 0 <= i < scenario.m for i in settings):
        raise ScenarioError(f"settings must lie in [0, {scenario.m})")


def joint_probability(scenario: Scenario, settings: Sequence[int]) -> float:
    """All-plus probability with the default angles: ``(1 - v cos(2 pi sum/m)) / 2**n``."""
    _check_settings(scenario, settings, scenario.n)
    total = sum(settings) % scenario.m
    return (1 - float(scenario.v) * math.cos(2 * math.pi * total / scenario.m)) / 2**scenario.n


@lru_cache(maxsize=32)
def _ghz_density(n: int, v: float) -> np.ndarray:
    dim = 2**n
    ghz = np.zeros(dim, dtype=complex)
    ghz[0] = ghz[-1] = 1 / math.sqrt(2)
    rho = v * np.outer(ghz, ghz.conj()) + (1 - v) * np.eye(dim) / dim
    rho.setflags(write=False)
    return rho


def ghz_density(n: int, v: float) -> np.ndarray:
    """``v |GHZ><GHZ| + (1 - v) I / 2**n`` as a dense (read-only) matrix."""
    if n > DENSE_MAX_PARTIES:
        raise ScenarioError(f"dense simulation limited to n <= {DENSE_MAX_PARTIES}")
    return _ghz_density(n, float(v))


def _eigvec(phi: float, outcome: int) -> np.ndarray:
    # eigenvector of cos(phi) X + sin(phi) Y with eigenvalue +-1
    return np.array([1, outcome * np.exp(1j * phi)]) / math.sqrt(2)


def _product(vectors) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for vec in vectors:
        out = np.kron(out, vec)
    return out


def outcome_probability_dense(
    scenario: Scenario,
    angles: MeasurementAngles,
    settings: Sequence[int],
    outcomes: Sequence[int],
) -> float:
    """Probability of the outcome string ``outcomes`` (entries +-1)."""
    _check_settings(scenario, settings, scenario.n)
    rho = ghz_density(scenario.n, scenario.v)
    psi = _product(_eigvec(angles.phi[k][i], o) for k, (i, o) in enumerate(zip(settings, outcomes)))
    return float(np.real(psi.conj() @ rho @ psi))


def joint_probability_dense(
    scenario: Scenario, angles: MeasurementAngles | None, settings: Sequence[int]
) -> float:
    if angles is None:
        angles = MeasurementAngles.default(scenario.n, scenario.m)
    return outcome_probability_dense(scenario, angles, settings, (1,) * scenario.n)


def marginal_probability(
    scenario: Scenario, parties: Sequence[int], settings: Sequence[int]
) -> Fraction:
    """All-plus probability of ``n - 1`` parties; the GHZ state has no such correlations."""
    n = scenario.n
    if len(parties) != n - 1 or len(set(parties)) != n - 1:
        raise ScenarioError("only (n-1)-party marginals are supported")
    _check_settings(scenario, settings, n - 1)
    return Fraction(1, 2 ** (n - 1))


def marginal_probability_dense(
    scenario: Scenario,
    parties: Sequence[int],
    settings: Sequence[int],
    angles: MeasurementAngles | None = None,
) -> float:
    """Trace against the product projector on ``parties`` and identity elsewhere."""
    n = scenario.n
    if angles is None:
        angles = MeasurementAngles.default(n, scenario.m)
    chosen = dict(zip(parties, settings))
    rho = ghz_density(n, scenario.v)
    basis = (np.array([1.0 + 0j, 0]), np.array([0, 1.0 + 0j]))
    free = [k for k in range(n) if k not in chosen]
    total = 0.0
    for picks in itertools.product(basis, repeat=len(free)):
        it = iter(picks)
        psi = _product(
            _eigvec(angles.phi[k][chosen[k]], 1) if k in chosen else next(it) for k in range(n)
        )
        total += float(np.real(psi.conj() @ rho @ psi))
    return total


def _direct_sums(scenario: Scenario, params: BellParams, budget: int) -> tuple[float, float]:
    """Unscaled full-correlation sum and marginal sum of the functional, term by term."""
    n, m = scenario.n, scenario.m
    if m**n > budget:
        raise ScenarioError(f"direct sum needs {m**n} terms (budget {budget}); use closed form")
    x, y = float(params.x), float(params.y)
    full = math.fsum(
        joint_probability(scenario, idx) * (y - (x if sum(idx) % m == 0 else 0.0))
        for idx in itertools.product(range(m), repeat=n)
    )
    marg = math.fsum(
        float(marginal_probability(scenario, [k for k in range(n) if k != omit], idx))
        for omit in range(n)
        for idx in itertools.product(range(m), repeat=n - 1)
    )
    return full, marg


def bell_value_quantum(
    scenario: Scenario,
    params: BellParams,
    eta: float,
    mode: str = "direct",
    budget: int = DIRECT_BUDGET,
) -> float:
    """Quantum value of the functional with detection efficiency ``eta``."""
    n, m, v = scenario.n, scenario.m, float(scenario.v)
    if mode == "direct":
        full, marg = _direct_sums(scenario, params, budget)
        return eta**n * full - eta ** (n - 1) * marg
    if mode == "closed":
        h = eta * m / 2
        return (float(params.y) - (1 - v) * float(params.x) / m) * h**n - n * h ** (n - 1)
    raise ValueError(f"unknown mode {mode!r}")


def threshold_closed_form(scenario: Scenario, params: BellParams) -> Fraction:
    D = scenario.m * params.y - (1 - scenario.v) * params.x
    if D <= 0:
        raise NoViolation(f"denominator m*y - (1-v)*x = {D} is not positive")
    return Fraction(2 * scenario.n) / D


def threshold_from_oracle(
    scenario: Scenario,
    params: BellParams,
    tol: float = 1e-13,
    budget: int = DIRECT_BUDGET,
    upper: float = 1.0,
) -> float:
    """Efficiency at which the direct-sum value changes sign, by bisection on ``(0, upper]``.

    ``upper > 1`` is unphysical but locates the root of the same polynomial.
    """
    full, marg = _direct_sums(scenario, params, budget)
    n = scenario.n

    def value(eta):
        return eta**n * full - eta ** (n - 1) * marg

    # a root exactly at the bracket end may evaluate a hair below zero
    if value(upper) < -1e-12 * max(1.0, marg):
        raise NoViolation(f"no violation at any efficiency in (0, {upper}]")
    lo, hi = 0.0, upper
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if value(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def reference_visibility_bounds(n: int) -> tuple[Fraction, float]:
    """(full separability threshold, two-setting full-correlation violation threshold)."""
    if n < 2:
        raise ScenarioError("n < 2")
    return Fraction(1, 1 + 2 ** (n - 1)), 2.0 ** (-(n - 1) / 2)

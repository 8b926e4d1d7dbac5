"""Desk-scale self-checks run by ``ghzbell verify``.

Each suite returns a :class:`SuiteResult`; a failing suite names the first
counterexample it met.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .asymptotics import check_conjecture
from .core import BellParams, DeterministicStrategy, is_prime, validate_scenario
from .envelope import (
    NoViolation,
    build_envelope,
    optimize_for_visibility,
    verify_local_bound,
)
from .quantum import (
    marginal_probability,
    marginal_probability_dense,
    threshold_closed_form,
    threshold_from_oracle,
)
from .strategies import (
    collect_lines,
    count_zero_sum_convolution,
    count_zero_sum_naive,
    enumerate_all,
)

SUITES = ("oracle", "envelope", "local-bound", "marginal", "threshold-root", "conjecture")
DEFAULT_SUITES = SUITES[:-1]


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checked: int = 0
    detail: str = ""
    notes: list[str] = field(default_factory=list)

    def fail(self, detail: str):
        if self.passed:
            self.passed = False
            self.detail = detail


def random_strategy(rng: random.Random, n: int, m: int) -> DeterministicStrategy:
    return DeterministicStrategy(m=m, masks=tuple(rng.randrange(1, 1 << m) for _ in range(n)))


def suite_oracle(seed: int = 0, samples: int = 2000) -> SuiteResult:
    res = SuiteResult("oracle")
    for n in range(2, 4):
        for m in range(2, 5):
            for s in enumerate_all(n, m):
                res.checked += 1
                if count_zero_sum_naive(s, m) != count_zero_sum_convolution(s, m):
                    res.fail(f"S mismatch for {s} (m={m})")
    rng = random.Random(seed)
    for _ in range(samples):
        n, m = rng.randint(2, 6), rng.randint(2, 8)
        s = random_strategy(rng, n, m)
        res.checked += 1
        if count_zero_sum_naive(s, m) != count_zero_sum_convolution(s, m):
            res.fail(f"S mismatch for {s} (m={m})")
    return res


def _prime_grid():
    for n in range(2, 5):
        for m in (2, 3, 5):
            yield n, m
    yield 5, 3


def suite_envelope() -> SuiteResult:
    res = SuiteResult("envelope")
    for n, m in _prime_grid():
        ex = build_envelope(collect_lines(n, m, "exhaustive"))
        reg = build_envelope(collect_lines(n, m, "regular", balanced_only=False))
        res.checked += 1
        if [ln.key for ln in ex.lines] != [ln.key for ln in reg.lines]:
            res.fail(f"exhaustive and regular envelopes differ at n={n}, m={m}")
    return res


def suite_local_bound(inject_fault: bool = False) -> SuiteResult:
    res = SuiteResult("local-bound")
    for n, m in [(2, 3), (3, 3), (3, 5), (4, 3)]:
        e = build_envelope(collect_lines(n, m, "exhaustive"))
        for x, y in e.vertices:
            if inject_fault:
                y += Fraction(1, 100)
            cert = verify_local_bound(BellParams(x, y, n, m), mode="exhaustive")
            res.checked += 1
            if cert.max_value != 0:
                res.fail(
                    f"n={n}, m={m}, (x, y)=({x}, {y}): max local value {cert.max_value} "
                    f"by strategy {cert.witness}"
                )
    return res


def suite_marginal(seed: int = 0, samples: int = 100) -> SuiteResult:
    res = SuiteResult("marginal")
    rng = random.Random(seed)
    for _ in range(samples):
        n, m = rng.randint(2, 4), rng.randint(2, 5)
        sc = validate_scenario(n, m, Fraction(rng.randint(0, 20), 20))
        omit = rng.randrange(n)
        parties = [k for k in range(n) if k != omit]
        settings = [rng.randrange(m) for _ in parties]
        dense = marginal_probability_dense(sc, parties, settings)
        res.checked += 1
        if abs(dense - float(marginal_probability(sc, parties, settings))) > 1e-12:
            res.fail(f"marginal {dense} != 1/2^{n - 1} at n={n}, m={m}, v={sc.v}")
    return res


def suite_threshold_root() -> SuiteResult:
    res = SuiteResult("threshold-root")
    for n in range(2, 5):
        for m in range(2, 6):
            e = build_envelope(collect_lines(n, m, "exhaustive"))
            for v in ("0.6", "0.8", "1"):
                sc = validate_scenario(n, m, v)
                try:
                    best = optimize_for_visibility(e, sc)
                except NoViolation:
                    continue
                if not best.violation_possible:
                    continue
                root = threshold_from_oracle(sc, best.params)
                res.checked += 1
                if abs(root - float(threshold_closed_form(sc, best.params))) > 1e-9:
                    res.fail(f"bisection root {root} vs {float(best.eta_star)} at n={n}, m={m}, v={v}")
    return res


def suite_conjecture(nmax: int = 30, mmax: int = 13) -> SuiteResult:
    """x_min must come from line (i) or (ii); the ``x_min <= nm`` flag is reported, not enforced."""
    res = SuiteResult("conjecture")
    exceed = []
    for m in range(2, mmax + 1):
        if not is_prime(m):
            continue
        for n in range(m, nmax + 1):
            rep = check_conjecture(n, m)
            res.checked += 1
            if rep.x_min != max(rep.x1, rep.x2):
                res.fail(f"n={n}, m={m}: x_min={rep.x_min} attained by another line ({rep.witness})")
            if not rep.holds:
                exceed.append(f"({n},{m})")
    if exceed:
        res.notes.append(
            f"x_min > nm in {len(exceed)} cells (x2 = 2^(m-1) dominates): " + " ".join(exceed)
        )
    return res


def run_suites(names=DEFAULT_SUITES, seed: int = 0, nmax: int = 30, mmax: int = 13,
               inject_fault: bool = False) -> list[SuiteResult]:
    out = []
    for name in names:
        if name == "oracle":
            out.append(suite_oracle(seed))
        elif name == "envelope":
            out.append(suite_envelope())
        elif name == "local-bound":
            out.append(suite_local_bound(inject_fault))
        elif name == "marginal":
            out.append(suite_marginal(seed))
        elif name == "threshold-root":
            out.append(suite_threshold_root())
        elif name == "conjecture":
            out.append(suite_conjecture(nmax, mmax))
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return out

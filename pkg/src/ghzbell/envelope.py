"""Lower envelope of constraint lines, threshold optimisation and local-bound
certificates.

A Bell inequality ``(x, y)`` has local bound at most zero iff ``(x, y)`` lies on
or below every constraint line, i.e. below the concave piecewise-linear
function ``min_k (p_k + q_k x)``.  The detection threshold is
``2n / (m y - (1 - v) x)``, so the best inequality maximises the linear form
``D = m y - (1 - v) x`` over that region; the optimum sits at an envelope
vertex (or anywhere on the terminal flat ray when ``v = 1``).

Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    BellParams,
    DeterministicStrategy,
    Scenario,
    ScenarioError,
    as_fraction,
    bell_value_deterministic,
)
from .strategies import (
    DEFAULT_BUDGET,
    ConstraintLine,
    RegularArrangement,
    collect_lines,
    count_all,
    exhaustive_line_table,
    regular_line_table,
    strategy_of,
)

__all__ = [
    "NoViolation",
    "UnboundedRegion",
    "Envelope",
    "ThresholdResult",
    "VisibilityBreakpoints",
    "LocalBoundCertificate",
    "build_envelope",
    "resolve_mode",
    "scenario_envelope",
    "y_max",
    "optimize_for_visibility",
    "visibility_sweep",
    "verify_local_bound",
    "lines_csv",
    "read_lines_csv",
    "LINES_SCHEMA",
]


class NoViolation(ValueError):
    """The quantum value never exceeds the local bound."""


class UnboundedRegion(ValueError):
    pass


@dataclass(frozen=True)
class Envelope:
    lines: tuple[ConstraintLine, ...]  # strictly decreasing slope
    vertices: tuple[tuple[Fraction, Fraction], ...]  # strictly increasing x

    @property
    def y_max(self) -> Fraction | None:
        last = self.lines[-1]
        return last.p if last.q == 0 else None

    def at(self, x: Fraction) -> Fraction:
        return min(line.at(x) for line in self.lines)

    def dominates(self, line: ConstraintLine) -> bool:
        """True iff ``line`` lies on or above the envelope everywhere."""
        if line.q > self.lines[0].q:
            return False  # steeper line dips below as x -> -inf
        if line.q < self.lines[-1].q:
            return False
        xs = [v[0] for v in self.vertices] or [Fraction(0)]
        return all(line.at(x) >= self.at(x) for x in xs)


def _intersect(a: ConstraintLine, b: ConstraintLine) -> Fraction:
    return (b.p - a.p) / (a.q - b.q)


def build_envelope(lines: Iterable[ConstraintLine]) -> Envelope:
    """Pointwise minimum of the lines; dominated and duplicate lines are dropped."""
    lines = list(lines)
    if not lines:
        raise ValueError("cannot build an envelope from no lines")
    # one line per slope: the lowest one (first witness kept on exact duplicates)
    best: dict[Fraction, ConstraintLine] = {}
    for line in lines:
        cur = best.get(line.q)
        if cur is None or line.p < cur.p:
            best[line.q] = line
    hull: list[ConstraintLine] = []
    for line in sorted(best.values(), key=lambda ln: ln.q, reverse=True):
        while len(hull) >= 2 and _intersect(hull[-2], hull[-1]) >= _intersect(hull[-1], line):
            hull.pop()
        hull.append(line)
    vertices = []
    for a, b in zip(hull, hull[1:]):
        x = _intersect(a, b)
        vertices.append((x, a.at(x)))
    return Envelope(lines=tuple(hull), vertices=tuple(vertices))


def resolve_mode(n: int, m: int, mode: str = "auto", budget: int = DEFAULT_BUDGET) -> str:
    """``auto`` means exhaustive whenever every strategy fits in the budget."""
    if mode == "auto":
        return "exhaustive" if count_all(n, m) <= budget else "regular"
    if mode not in ("exhaustive", "regular"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def scenario_envelope(
    n: int,
    m: int,
    mode: str = "auto",
    budget: int = DEFAULT_BUDGET,
    balanced_only: bool = True,
) -> tuple[Envelope, list[ConstraintLine], str]:
    """Lines and envelope for ``(n, m)``; returns the mode actually used."""
    used = resolve_mode(n, m, mode, budget)
    lines = collect_lines(n, m, used, budget=budget, balanced_only=balanced_only)
    return build_envelope(lines), lines, used


def y_max(e: Envelope) -> Fraction:
    value = e.y_max
    if value is None:
        raise UnboundedRegion("y unbounded on this line set: no zero-slope line")
    return value


@dataclass(frozen=True)
class ThresholdResult:
    params: BellParams
    eta_star: Fraction
    denominator: Fraction
    vertex: int | None  # index into Envelope.vertices; None for a lone flat line
    on_ray: bool  # v = 1: every point of the flat terminal ray is optimal
    violation_possible: bool

    @property
    def eta_float(self) -> float:
        return float(self.eta_star)


def _denominator(m: int, v: Fraction, x: Fraction, y: Fraction) -> Fraction:
    return m * y - (1 - v) * x


def optimize_for_visibility(e: Envelope, scenario: Scenario) -> ThresholdResult:
    """Best ``(x, y)`` on the envelope for the scenario's visibility.

    Ties between vertices go to the smallest ``x``, then smallest ``y``.
    """
    n, m, v = scenario.n, scenario.m, as_fraction(scenario.v)
    slope = (1 - v) / m
    if e.lines[0].q < slope:
        raise UnboundedRegion("objective unbounded: steepest line is flatter than (1-v)/m")
    if not e.vertices:
        if e.lines[0].q != 0 or v != 1:
            raise UnboundedRegion("a single line only bounds the objective when it is flat and v = 1")
        x, y, index = Fraction(0), e.lines[0].p, None
    else:
        if e.lines[-1].q > slope:
            raise UnboundedRegion("objective grows without bound along the last ray")
        # first vertex whose right-hand segment is no steeper than the objective
        index = next(k for k in range(len(e.vertices)) if e.lines[k + 1].q <= slope)
        x, y = e.vertices[index]
    on_ray = v == 1 and e.lines[-1].q == 0
    D = _denominator(m, v, x, y)
    if D <= 0:
        raise NoViolation(f"no quantum violation at this visibility (best denominator {D})")
    eta = Fraction(2 * n) / D
    return ThresholdResult(
        params=BellParams(x=x, y=y, n=n, m=m),
        eta_star=eta,
        denominator=D,
        vertex=index,
        on_ray=on_ray,
        violation_possible=eta <= 1,
    )


def optimize_by_scan(e: Envelope, scenario: Scenario) -> tuple[Fraction, Fraction, Fraction]:
    """Reference optimiser: evaluate the objective at every vertex."""
    m, v = scenario.m, as_fraction(scenario.v)
    best = max(e.vertices, key=lambda xy: (_denominator(m, v, *xy), -xy[0], -xy[1]))
    return best[0], best[1], _denominator(m, v, *best)


@dataclass(frozen=True)
class VisibilityBreakpoints:
    """``intervals[k] = (v_lo, v_hi, vertex)``: the vertex is optimal for ``v_lo < v <= v_hi``."""

    n: int
    m: int
    intervals: tuple[tuple[Fraction, Fraction, tuple[Fraction, Fraction]], ...]

    def vertex_for(self, v) -> tuple[Fraction, Fraction]:
        v = as_fraction(v)
        for lo, hi, vertex in self.intervals:
            if lo < v <= hi:
                return vertex
        raise ValueError(f"v={v} outside (0, 1]")


def visibility_sweep(e: Envelope, scenario: Scenario) -> VisibilityBreakpoints:
    """Exact visibility ranges on which each vertex maximises ``m y - (1-v) x``.

    The vertex between slopes ``q_hi > q_lo`` wins while ``q_lo <= (1-v)/m <= q_hi``,
    i.e. ``1 - m q_hi <= v <= 1 - m q_lo``; shared endpoints go to the vertex with
    the smaller ``x``, matching :func:`optimize_for_visibility`.
    """
    m = scenario.m
    if not e.vertices:
        return VisibilityBreakpoints(
            scenario.n, m, ((Fraction(0), Fraction(1), (Fraction(0), e.lines[0].p)),)
        )
    out = []
    for k, vertex in enumerate(e.vertices):
        lo = max(Fraction(0), 1 - m * e.lines[k].q)
        hi = min(Fraction(1), 1 - m * e.lines[k + 1].q)
        if lo < hi:
            out.append((lo, hi, vertex))
    return VisibilityBreakpoints(scenario.n, m, tuple(out))


@dataclass(frozen=True)
class LocalBoundCertificate:
    params: BellParams
    mode: str
    max_value: Fraction
    witness: DeterministicStrategy
    holds: bool
    conjecture_conditional: bool
    strategies_checked: int


def verify_local_bound(
    params: BellParams,
    scenario: Scenario | None = None,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    balanced_only: bool = False,
) -> LocalBoundCertificate:
    """Maximise the local functional at ``params`` and report the best strategy.

    The local value depends on a strategy only through its sorted counts and
    zero-sum count, so one witness per such class is evaluated.  Strategies in
    which some party never outputs +1 contribute at most 0 (the all-minus
    strategy attains it), so the maximum is never below 0.
    """
    n, m = params.n, params.m
    if scenario is not None and (scenario.n, scenario.m) != (n, m):
        raise ScenarioError("params and scenario disagree on (n, m)")
    if mode == "exhaustive":
        table = exhaustive_line_table(n, m, budget=budget)
        witnesses = list(table.values())
    elif mode == "regular":
        table = regular_line_table(n, m, balanced_only=balanced_only, budget=budget)
        witnesses = [strategy_of(r, n, m) for r in table.values()]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    best_value = Fraction(0)
    best = DeterministicStrategy(m=m, masks=(0,) * n)
    for s in witnesses:
        value = bell_value_deterministic(s, params)
        if value > best_value or (value == best_value and best.masks == (0,) * n):
            best_value, best = value, s
    return LocalBoundCertificate(
        params=params,
        mode=mode,
        max_value=best_value,
        witness=best,
        holds=best_value <= 0,
        conjecture_conditional=mode == "regular",
        strategies_checked=len(witnesses),
    )


# --- CSV interchange --------------------------------------------------------

LINES_SCHEMA = "# ghzbell-lines v1"
LINES_COLUMNS = ["p_num", "p_den", "q_num", "q_den", "p", "q", "relevant", "provenance"]


def _provenance(line: ConstraintLine) -> str:
    src = line.provenance
    if isinstance(src, DeterministicStrategy):
        return "strategy:" + str(src)
    if isinstance(src, RegularArrangement):
        return "regular:" + ",".join(map(str, src.counts)) + f"@{src.shift}"
    return "" if src is None else str(src)


def lines_csv(lines: Sequence[ConstraintLine], envelope: Envelope | None = None) -> str:
    """CSV text: one row per distinct line, flagged if it survives in the envelope."""
    keep = {line.key for line in envelope.lines} if envelope is not None else set()
    buf = io.StringIO()
    buf.write(LINES_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LINES_COLUMNS)
    seen = set()
    for line in lines:
        if line.key in seen:
            continue
        seen.add(line.key)
        writer.writerow([
            line.p.numerator, line.p.denominator, line.q.numerator, line.q.denominator,
            repr(float(line.p)), repr(float(line.q)), int(line.key in keep), _provenance(line),
        ])
    return buf.getvalue()


def read_lines_csv(text: str) -> list[tuple[ConstraintLine, bool]]:
    rows = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(rows):
        line = ConstraintLine(
            p=Fraction(int(row["p_num"]), int(row["p_den"])),
            q=Fraction(int(row["q_num"]), int(row["q_den"])),
            provenance=row["provenance"] or None,
        )
        out.append((line, row["relevant"] == "1"))
    return out


def envelope_rows(e: Envelope) -> list[dict]:
    return [
        {
            "x_num": x.numerator, "x_den": x.denominator,
            "y_num": y.numerator, "y_den": y.denominator,
            "x": float(x), "y": float(y),
        }
        for x, y in e.vertices
    ]

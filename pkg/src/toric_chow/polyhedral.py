"""Exact polyhedral computations: feasibility by the simplex method and optimization by Fourier–Motzkin elimination.

Everything is done in Fractions; there are no tolerances.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

logger = logging.getLogger(__name__)


class Tableau:
    """Phase-one simplex tableau for {x >= 0 : A x = b}, with one artificial variable per row.

    Entering and leaving variables are chosen by Bland's rule, so the method terminates.
    """

    def __init__(self, a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int], nvars: int):
        self.nvars = nvars
        self.nrows = len(a)
        self.rows: list[list[Fraction]] = []
        for i, (row, rhs) in enumerate(zip(a, b, strict=True)):
            sign = -1 if rhs < 0 else 1
            artificial = [Fraction(int(k == i)) for k in range(self.nrows)]
            self.rows.append([Fraction(sign * x) for x in row] + artificial + [Fraction(sign * rhs)])
        self.basis = [nvars + i for i in range(self.nrows)]

    def cost(self, j: int) -> int:
        return 1 if j >= self.nvars else 0

    def reduced_cost(self, j: int) -> Fraction:
        return self.cost(j) - sum((self.cost(self.basis[i]) * self.rows[i][j] for i in range(self.nrows)), Fraction(0))

    def objective(self) -> Fraction:
        return sum((self.cost(self.basis[i]) * self.rows[i][-1] for i in range(self.nrows)), Fraction(0))

    def pivot(self, i: int, j: int) -> None:
        pivot = self.rows[i][j]
        self.rows[i] = [x / pivot for x in self.rows[i]]
        for k in range(self.nrows):
            if k != i and self.rows[k][j] != 0:
                factor = self.rows[k][j]
                self.rows[k] = [x - factor * y for x, y in zip(self.rows[k], self.rows[i], strict=True)]
        self.basis[i] = j

    def step(self) -> bool:
        "Do one pivot. Return False at an optimum."
        width = self.nvars + self.nrows
        entering = next((j for j in range(width) if j not in self.basis and self.reduced_cost(j) < 0), None)
        if entering is None:
            return False
        candidates = [
            (self.rows[i][-1] / self.rows[i][entering], self.basis[i], i) for i in range(self.nrows) if self.rows[i][entering] > 0
        ]
        # phase one is bounded below by zero, so some row always qualifies
        assert candidates
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return True

    def solve(self) -> list[Fraction] | None:
        while self.step():
            pass
        if self.objective() != 0:
            return None
        x = [Fraction(0)] * self.nvars
        for i, j in enumerate(self.basis):
            if j < self.nvars:
                x[j] = self.rows[i][-1]
        return x


def feasible_point(a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int], nvars: int) -> list[Fraction] | None:
    """A point x >= 0 with A x = b, or None if there is none."""
    return Tableau(a, b, nvars).solve()


@dataclass(frozen=True)
class Inequality:
    """sum(coefficients[k] * x[k]) + constant >= 0.

    `history` records the input inequalities this one was combined from.
    """

    coefficients: tuple[Fraction, ...]
    constant: Fraction
    history: frozenset[int] = frozenset()

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * xi for a, xi in zip(self.coefficients, x, strict=True)), self.constant)

    def normalized(self) -> Inequality:
        scale = max((abs(a) for a in self.coefficients), default=Fraction(0))
        if scale == 0:
            return self
        return Inequality(tuple(a / scale for a in self.coefficients), self.constant / scale, self.history)

    def is_trivial(self) -> bool:
        return not any(self.coefficients)


def inequality(coefficients: Sequence[Fraction | int], constant: Fraction | int = 0, index: int | None = None) -> Inequality:
    history = frozenset() if index is None else frozenset({index})
    return Inequality(tuple(Fraction(a) for a in coefficients), Fraction(constant), history)


class Infeasible(Exception):
    pass


def _deduplicate(inequalities: Sequence[Inequality]) -> list[Inequality]:
    seen: dict[tuple, Inequality] = {}
    for ineq in inequalities:
        ineq = ineq.normalized()
        if ineq.is_trivial():
            if ineq.constant < 0:
                raise Infeasible
            continue
        key = (ineq.coefficients, ineq.constant)
        if key not in seen or len(ineq.history) < len(seen[key].history):
            seen[key] = ineq
    return list(seen.values())


def eliminate(inequalities: Sequence[Inequality], var: int, step: int) -> list[Inequality]:
    """Fourier–Motzkin elimination of one variable.

    Combinations whose history is longer than step + 1 are redundant (Chernikov's rule) and dropped.
    """
    positive = [q for q in inequalities if q.coefficients[var] > 0]
    negative = [q for q in inequalities if q.coefficients[var] < 0]
    result = [q for q in inequalities if q.coefficients[var] == 0]
    for p in positive:
        for n in negative:
            history = p.history | n.history
            if len(history) > step + 1:
                continue
            a, b = p.coefficients[var], -n.coefficients[var]
            coefficients = tuple(b * x + a * y for x, y in zip(p.coefficients, n.coefficients, strict=True))
            result.append(Inequality(coefficients, b * p.constant + a * n.constant, history))
    return _deduplicate(result)


def _elimination_cost(inequalities: Sequence[Inequality], var: int) -> int:
    positive = sum(1 for q in inequalities if q.coefficients[var] > 0)
    negative = sum(1 for q in inequalities if q.coefficients[var] < 0)
    return positive * negative - positive - negative


def _bounds(inequalities: Sequence[Inequality], var: int, x: Sequence[Fraction]) -> tuple[Fraction | None, Fraction | None]:
    "Interval for x[var] given the other coordinates of x."
    lower: Fraction | None = None
    upper: Fraction | None = None
    for q in inequalities:
        a = q.coefficients[var]
        if a == 0:
            continue
        rest = q.value(x) - a * x[var]
        bound = -rest / a
        if a > 0:
            lower = bound if lower is None else max(lower, bound)
        else:
            upper = bound if upper is None else min(upper, bound)
    return lower, upper


def maximize(inequalities: Sequence[Inequality], nvars: int, objective: int) -> tuple[Fraction, list[Fraction]] | None:
    """Maximize x[objective] subject to the inequalities.

    Eliminates every other variable, reads off the optimum, then back-substitutes choosing each
    eliminated variable as close to zero as its interval allows. Returns None if infeasible;
    raises ValueError if unbounded.
    """
    stages = []
    order: list[int] = []
    try:
        current = _deduplicate(inequalities)
        remaining = [k for k in range(nvars) if k != objective]
        while remaining:
            var = min(remaining, key=lambda k: (_elimination_cost(current, k), k))
            stages.append(current)
            order.append(var)
            remaining.remove(var)
            current = eliminate(current, var, len(order))
            logger.debug("Eliminated x%d, %d inequalities left", var, len(current))
    except Infeasible:
        return None

    x = [Fraction(0)] * nvars
    lower, upper = _bounds(current, objective, x)
    if upper is None:
        raise ValueError("objective is unbounded")
    if lower is not None and lower > upper:
        return None
    x[objective] = upper
    for var, stage in zip(reversed(order), reversed(stages), strict=True):
        x[var] = Fraction(0)
        lower, upper = _bounds(stage, var, x)
        if lower is not None and lower > 0:
            x[var] = lower
        elif upper is not None and upper < 0:
            x[var] = upper
    assert all(q.value(x) >= 0 for q in inequalities)
    return x[objective], x
